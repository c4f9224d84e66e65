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

#include "feint/dual_behavior.h"

#include <algorithm>

#include "feint/error.h"

namespace feint {

using nlohmann::json;

namespace {

bool Contains(const std::vector<std::string>& ids, std::string_view id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::size_t MaxStretchLength(const Catalog& cat) {
  std::size_t m = 0;
  for (const Behavior& b : cat.behaviors()) m = std::max(m, b.stretch_end);
  return m;
}

}  // namespace

std::vector<BackwardSelection> BackwardSearch(std::string_view a_t,
                                              std::string_view a_target,
                                              const TemplateSet& templates) {
  std::vector<BackwardSelection> out;
  for (const FeintTemplate& t : templates.templates) {
    if (!Contains(t.avail_suffix, a_target)) continue;
    for (std::size_t p = 0; p < t.avail_prefix.size(); ++p) {
      if (t.avail_prefix[p] != a_t) continue;
      BackwardSelection s;
      s.select_i.assign(t.avail_prefix.begin() + p, t.avail_prefix.end());
      s.junction = t.junction_i;
      s.select_j = t.avail_suffix;
      out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SourcedAction> DualBehaviorModel::Actions() const {
  std::vector<SourcedAction> all = feint.actions;
  all.insert(all.end(), followup.begin(), followup.end());
  return all;
}

std::string DualBehaviorModel::Id() const {
  return template_key + "@" + std::to_string(select_start) + "#" +
         std::to_string(feint.cut_index);
}

std::size_t DualBehaviorModel::RewardOffset(const Catalog& cat) const {
  for (std::size_t k = 0; k < followup.size(); ++k) {
    if (followup[k].behavior_id == target_behavior_id &&
        IsRewardStep(followup[k], cat)) {
      return k;
    }
  }
  return followup.size();
}

std::vector<DualBehaviorModel> ComposeDbms(std::string_view a_t,
                                           std::string_view a_target,
                                           const TemplateSet& templates,
                                           const Catalog& cat) {
  if (!cat.HasAction(a_t)) {
    Fail(ErrorCode::kUnknownAction, "unknown action '" + std::string(a_t) + "'");
  }
  if (!cat.HasAction(a_target)) {
    Fail(ErrorCode::kUnknownAction,
         "unknown action '" + std::string(a_target) + "'");
  }
  std::vector<DualBehaviorModel> out;
  for (const FeintTemplate& t : templates.templates) {
    if (!Contains(t.avail_suffix, a_target)) continue;
    const Behavior& bi = cat.behavior(t.behavior_i);
    const Behavior& bj = cat.behavior(t.behavior_j);
    const std::size_t k = t.junction_index_i;
    const std::size_t n = t.junction_index_j;
    // The stretch-out replayed in the follow-up must stay out of bi's
    // Reward Sequence, and the follow-up must still reach bj's.
    if (k > bi.stretch_end) continue;
    if (bj.kind != BehaviorKind::kAttack || n + 1 > bj.reward_end) continue;
    for (std::size_t p = 0; p < t.avail_prefix.size(); ++p) {
      if (t.avail_prefix[p] != a_t) continue;
      std::vector<SourcedAction> followup = SourceRange(bi, p, k);
      followup.push_back({bj.actions[n], bj.id, n, false});
      std::vector<SourcedAction> tail = SourceRange(bj, n + 1, bj.actions.size());
      followup.insert(followup.end(), tail.begin(), tail.end());
      for (std::size_t cut = 1; p + cut <= k; ++cut) {
        DualBehaviorModel dbm;
        dbm.feint.variant = TemplateVariant::kPrefixPalindrome;
        dbm.feint.behavior_i = dbm.feint.behavior_j = bi.id;
        dbm.feint.cut_index = cut;
        dbm.feint.actions = SourceRange(bi, p, p + cut);
        std::vector<SourcedAction> back = ReflectSourced(dbm.feint.actions);
        dbm.feint.actions.insert(dbm.feint.actions.end(), back.begin(), back.end());
        dbm.junction = t.junction_i;
        dbm.followup = followup;
        dbm.t_f = dbm.feint.length();
        dbm.t_s = dbm.t_f + followup.size();
        dbm.target_behavior_id = bj.id;
        dbm.template_key = t.Key();
        dbm.select_start = p;
        if (CheckDbm(dbm, cat).empty()) out.push_back(std::move(dbm));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> CheckDbm(const DualBehaviorModel& dbm,
                                  const Catalog& cat) {
  std::vector<std::string> problems;
  const double eps = cat.epsilon_state();
  if (dbm.feint.actions.empty() || dbm.followup.empty()) {
    problems.push_back("empty feint or follow-up");
    return problems;
  }
  if (StateDistance(dbm.feint.actions.back().action.end_state,
                    dbm.followup.front().action.start_state, eps) > eps) {
    problems.push_back("feint end is not similar to follow-up start");
  }
  const std::vector<SourcedAction> all = dbm.Actions();
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    if (StateDistance(all[k].action.end_state, all[k + 1].action.start_state,
                      eps) > eps) {
      problems.push_back("discontinuity at step " + std::to_string(k));
    }
  }
  for (const SourcedAction& a : dbm.feint.actions) {
    if (IsRewardStep(a, cat)) {
      problems.push_back("feint contains Reward-Sequence action '" +
                         a.action.id + "'");
    }
  }
  if (dbm.t_f != dbm.feint.length() ||
      dbm.t_s != dbm.t_f + dbm.followup.size() || !(dbm.t_f < dbm.t_s)) {
    problems.push_back("inconsistent t_f / t_s");
  }
  if (dbm.t_f < 2 || dbm.t_f > 2 * MaxStretchLength(cat)) {
    problems.push_back("feint length outside [2, 2 * max stretch-out length]");
  }
  if (dbm.RewardOffset(cat) == dbm.followup.size()) {
    problems.push_back("follow-up never reaches the target's Reward Sequence");
  }
  return problems;
}

json DbmToJson(const DualBehaviorModel& dbm) {
  json feint = json::array();
  for (const SourcedAction& a : dbm.feint.actions) feint.push_back(a.action.id);
  json followup = json::array();
  for (const SourcedAction& a : dbm.followup) followup.push_back(a.action.id);
  return json{{"id", dbm.Id()},
              {"template", dbm.template_key},
              {"target_behavior", dbm.target_behavior_id},
              {"junction", dbm.junction},
              {"feint", feint},
              {"followup", followup},
              {"t_f", dbm.t_f},
              {"t_s", dbm.t_s}};
}

std::string_view TimingClassName(TimingClass c) {
  switch (c) {
    case TimingClass::kTooShort: return "TooShort";
    case TimingClass::kProper: return "Proper";
    case TimingClass::kTooLong: return "TooLong";
  }
  return "Proper";
}

TimingClass ClassifyTiming(long t_a2, long t_b1, long t_b2) {
  if (t_b1 >= t_b2) {
    Fail(ErrorCode::kInvalidWindow, "timing window requires t_B1 < t_B2");
  }
  if (t_a2 < t_b1) return TimingClass::kTooShort;
  if (t_a2 < t_b2) return TimingClass::kProper;
  return TimingClass::kTooLong;
}

}  // namespace feint
