// Copyright 2026 The Feintsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "feint/feint_generator.h"

#include <algorithm>
#include <map>

#include "feint/error.h"

namespace feint {

using nlohmann::json;

std::string ReflectedId(std::string_view id) {
  if (id.ends_with(kReflectSuffix)) {
    return std::string(id.substr(0, id.size() - kReflectSuffix.size()));
  }
  return std::string(id) + std::string(kReflectSuffix);
}

std::vector<UnitAction> ReflectActions(std::span<const UnitAction> seq) {
  if (seq.empty()) Fail(ErrorCode::kEmptySequence, "cannot reflect an empty sequence");
  std::vector<UnitAction> out;
  out.reserve(seq.size());
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    out.push_back({ReflectedId(it->id), it->end_state, it->start_state});
  }
  return out;
}

std::vector<SourcedAction> SourceRange(const Behavior& b, std::size_t begin,
                                       std::size_t end) {
  std::vector<SourcedAction> out;
  for (std::size_t k = begin; k < end && k < b.actions.size(); ++k) {
    out.push_back({b.actions[k], b.id, k, false});
  }
  return out;
}

std::vector<SourcedAction> ReflectSourced(std::span<const SourcedAction> seq) {
  if (seq.empty()) Fail(ErrorCode::kEmptySequence, "cannot reflect an empty sequence");
  std::vector<SourcedAction> out;
  out.reserve(seq.size());
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    out.push_back({{ReflectedId(it->action.id), it->action.end_state,
                    it->action.start_state},
                   it->behavior_id,
                   it->index,
                   !it->reflected});
  }
  return out;
}

bool IsRewardStep(const SourcedAction& a, const Catalog& cat) {
  if (a.reflected) return false;
  const Behavior* b = cat.FindBehavior(a.behavior_id);
  return b != nullptr && b->kind == BehaviorKind::kAttack &&
         b->InRewardSequence(a.index);
}

std::string_view VariantName(TemplateVariant v) {
  switch (v) {
    case TemplateVariant::kSpliceSimilar: return "SpliceSimilar";
    case TemplateVariant::kPrefixPalindrome: return "PrefixPalindrome";
    case TemplateVariant::kSuffixPalindrome: return "SuffixPalindrome";
  }
  return "SpliceSimilar";
}

std::vector<PhysicalState> FeintBehavior::Trajectory() const {
  std::vector<PhysicalState> states;
  if (actions.empty()) return states;
  states.push_back(actions.front().action.start_state);
  for (const SourcedAction& a : actions) states.push_back(a.action.end_state);
  return states;
}

FeintBehavior GeneratePrefixPalindrome(const Behavior& b, std::size_t cut) {
  if (cut == 0 || cut > b.stretch_end || cut > b.actions.size()) {
    Fail(ErrorCode::kCutOutOfRange,
         "prefix cut " + std::to_string(cut) + " outside (0, " +
             std::to_string(b.stretch_end) + "] of behavior '" + b.id + "'");
  }
  FeintBehavior f;
  f.variant = TemplateVariant::kPrefixPalindrome;
  f.behavior_i = f.behavior_j = b.id;
  f.cut_index = cut;
  f.actions = SourceRange(b, 0, cut);
  std::vector<SourcedAction> back = ReflectSourced(f.actions);
  f.actions.insert(f.actions.end(), back.begin(), back.end());
  return f;
}

FeintBehavior GenerateSuffixPalindrome(const Behavior& b, std::size_t cut) {
  if (cut < b.reward_end || cut >= b.actions.size()) {
    Fail(ErrorCode::kCutOutOfRange,
         "suffix cut " + std::to_string(cut) + " outside [" +
             std::to_string(b.reward_end) + ", " +
             std::to_string(b.actions.size()) + ") of behavior '" + b.id + "'");
  }
  FeintBehavior f;
  f.variant = TemplateVariant::kSuffixPalindrome;
  f.behavior_i = f.behavior_j = b.id;
  f.cut_index = cut;
  std::vector<SourcedAction> tail = SourceRange(b, cut, b.actions.size());
  f.actions = ReflectSourced(tail);
  f.actions.insert(f.actions.end(), tail.begin(), tail.end());
  return f;
}

FeintBehavior GenerateSplice(const Behavior& bi, const Behavior& bj,
                             std::size_t idx_i, std::size_t idx_j,
                             double epsilon_state) {
  if (idx_i == 0 || idx_i > bi.actions.size() || idx_j >= bj.actions.size()) {
    Fail(ErrorCode::kCutOutOfRange,
         "splice indices (" + std::to_string(idx_i) + ", " +
             std::to_string(idx_j) + ") leave an empty half");
  }
  if (idx_i > bi.stretch_end) {
    Fail(ErrorCode::kRewardLeak,
         "splice prefix of '" + bi.id + "' reaches its Reward Sequence");
  }
  if (idx_j < bj.reward_end) {
    Fail(ErrorCode::kRewardLeak,
         "splice suffix of '" + bj.id + "' starts before its Retract Sequence");
  }
  const double d = StateDistance(bi.actions[idx_i - 1].end_state,
                                 bj.actions[idx_j].start_state, epsilon_state);
  if (d > epsilon_state) {
    Fail(ErrorCode::kNotSimilar,
         "splice states differ by " + std::to_string(d) + " > " +
             std::to_string(epsilon_state));
  }
  FeintBehavior f;
  f.variant = TemplateVariant::kSpliceSimilar;
  f.behavior_i = bi.id;
  f.behavior_j = bj.id;
  f.cut_index = idx_i;
  f.actions = SourceRange(bi, 0, idx_i);
  std::vector<SourcedAction> tail = SourceRange(bj, idx_j, bj.actions.size());
  f.actions.insert(f.actions.end(), tail.begin(), tail.end());
  return f;
}

std::vector<FeintBehavior> EnumerateFeintBehaviors(const Catalog& cat) {
  std::vector<FeintBehavior> out;
  for (const Behavior& b : cat.behaviors()) {
    for (std::size_t cut = 1; cut <= b.stretch_end; ++cut) {
      out.push_back(GeneratePrefixPalindrome(b, cut));
    }
    for (std::size_t cut = b.reward_end; cut < b.actions.size(); ++cut) {
      out.push_back(GenerateSuffixPalindrome(b, cut));
    }
  }
  const double eps = cat.epsilon_state();
  for (const Behavior& bi : cat.behaviors()) {
    for (const Behavior& bj : cat.behaviors()) {
      for (std::size_t idx_i = 1; idx_i <= bi.stretch_end; ++idx_i) {
        for (std::size_t idx_j = bj.reward_end; idx_j < bj.actions.size(); ++idx_j) {
          if (StateDistance(bi.actions[idx_i - 1].end_state,
                            bj.actions[idx_j].start_state, eps) <= eps) {
            out.push_back(GenerateSplice(bi, bj, idx_i, idx_j, eps));
          }
        }
      }
    }
  }
  return out;
}

std::string FeintTemplate::Key() const {
  return behavior_i + "/" + behavior_j + "/" + std::to_string(junction_index_i) +
         "/" + std::to_string(junction_index_j);
}

namespace {

bool SharesJunction(const UnitAction& a, const UnitAction& b,
                    CommonActionPredicate predicate, double eps) {
  if (a.id == b.id) return true;
  if (predicate == CommonActionPredicate::kIdentity) return false;
  return StateDistance(a.start_state, b.start_state, eps) <= eps &&
         StateDistance(a.end_state, b.end_state, eps) <= eps;
}


}  // namespace

std::string_view PredicateName(CommonActionPredicate p) {
  return p == CommonActionPredicate::kIdentity ? "identity" : "similar_state";
}

CommonActionPredicate PredicateFromName(std::string_view name) {
  if (name == "identity") return CommonActionPredicate::kIdentity;
  if (name == "similar_state") return CommonActionPredicate::kSimilarState;
  Fail(ErrorCode::kParse, "unknown template predicate '" + std::string(name) + "'");
}

TemplateSet PrecomputeTemplates(const Catalog& cat,
                                CommonActionPredicate predicate) {
  TemplateSet set;
  set.predicate = predicate;
  const double eps = cat.epsilon_state();
  for (const Behavior& bi : cat.behaviors()) {
    for (const Behavior& bj : cat.behaviors()) {
      for (std::size_t m = 0; m < bi.actions.size(); ++m) {
        for (std::size_t n = 0; n < bj.actions.size(); ++n) {
          if (!SharesJunction(bi.actions[m], bj.actions[n], predicate, eps)) {
            continue;
          }
          FeintTemplate t;
          t.behavior_i = bi.id;
          t.behavior_j = bj.id;
          t.junction_index_i = m;
          t.junction_index_j = n;
          t.junction_i = bi.actions[m].id;
          t.junction_j = bj.actions[n].id;
          for (std::size_t p = 0; p < m; ++p) t.avail_prefix.push_back(bi.actions[p].id);
          for (std::size_t q = n + 1; q < bj.actions.size(); ++q) {
            t.avail_suffix.push_back(bj.actions[q].id);
          }
          set.templates.push_back(std::move(t));
        }
      }
    }
  }
  std::sort(set.templates.begin(), set.templates.end());
  return set;
}

json TemplateSetToJson(const TemplateSet& set) {
  json templates = json::array();
  for (const FeintTemplate& t : set.templates) {
    templates.push_back({{"key", t.Key()},
                         {"behavior_i", t.behavior_i},
                         {"behavior_j", t.behavior_j},
                         {"junction_index_i", t.junction_index_i},
                         {"junction_index_j", t.junction_index_j},
                         {"junction_i", t.junction_i},
                         {"junction_j", t.junction_j},
                         {"avail_prefix", t.avail_prefix},
                         {"avail_suffix", t.avail_suffix},
                         {"variant", VariantName(t.variant)}});
  }
  return json{{"predicate", PredicateName(set.predicate)},
              {"templates", templates}};
}

TemplateSet TemplateSetFromJson(const json& j) {
  TemplateSet set;
  try {
    set.predicate = PredicateFromName(j.at("predicate").get<std::string>());
    for (const json& jt : j.at("templates")) {
      FeintTemplate t;
      t.behavior_i = jt.at("behavior_i").get<std::string>();
      t.behavior_j = jt.at("behavior_j").get<std::string>();
      t.junction_index_i = jt.at("junction_index_i").get<std::size_t>();
      t.junction_index_j = jt.at("junction_index_j").get<std::size_t>();
      t.junction_i = jt.at("junction_i").get<std::string>();
      t.junction_j = jt.at("junction_j").get<std::string>();
      t.avail_prefix = jt.at("avail_prefix").get<std::vector<std::string>>();
      t.avail_suffix = jt.at("avail_suffix").get<std::vector<std::string>>();
      set.templates.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("template set: ") + e.what());
  }
  std::sort(set.templates.begin(), set.templates.end());
  return set;
}

}  // namespace feint
