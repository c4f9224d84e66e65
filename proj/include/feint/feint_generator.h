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

#ifndef FEINT_FEINT_GENERATOR_H_
#define FEINT_FEINT_GENERATOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "feint/catalog.h"
#include "json.hpp"

namespace feint {

// Suffix marking a time-reversed action. Reflecting twice restores the id.
inline constexpr std::string_view kReflectSuffix = "~r";

std::string ReflectedId(std::string_view id);

// Reverses the sequence and swaps each action's start and end states.
// Throws kEmptySequence on empty input.
std::vector<UnitAction> ReflectActions(std::span<const UnitAction> seq);

// A unit action tagged with the catalog position it was taken from.
struct SourcedAction {
  UnitAction action;
  std::string behavior_id;
  std::size_t index = 0;
  bool reflected = false;

  bool operator==(const SourcedAction&) const = default;
  auto operator<=>(const SourcedAction& o) const {
    return std::tie(behavior_id, index, reflected, action.id) <=>
           std::tie(o.behavior_id, o.index, o.reflected, o.action.id);
  }
};

std::vector<SourcedAction> SourceRange(const Behavior& b, std::size_t begin,
                                       std::size_t end);
std::vector<SourcedAction> ReflectSourced(std::span<const SourcedAction> seq);

// True iff the action is a forward copy of a Reward-Sequence step.
bool IsRewardStep(const SourcedAction& a, const Catalog& cat);

enum class TemplateVariant { kSpliceSimilar, kPrefixPalindrome, kSuffixPalindrome };

std::string_view VariantName(TemplateVariant v);

struct FeintBehavior {
  std::vector<SourcedAction> actions;
  TemplateVariant variant = TemplateVariant::kPrefixPalindrome;
  // Source behavior ids; equal for the palindrome variants.
  std::string behavior_i;
  std::string behavior_j;
  std::size_t cut_index = 0;

  std::size_t length() const { return actions.size(); }
  // s_0 .. s_L: start state of the first action followed by every end state.
  std::vector<PhysicalState> Trajectory() const;
};

// Prefix palindrome: actions[0, cut) followed by their reflection. Requires
// 0 < cut <= stretch_end, otherwise kCutOutOfRange.
FeintBehavior GeneratePrefixPalindrome(const Behavior& b, std::size_t cut);

// Suffix palindrome: reflection of actions[cut, end) followed by the actions.
// Requires reward_end <= cut < |actions|, otherwise kCutOutOfRange.
FeintBehavior GenerateSuffixPalindrome(const Behavior& b, std::size_t cut);

// Similar-state splice: bi.actions[0, idx_i) ++ bj.actions[idx_j, end), joined at two
// similar physical states. Errors: kCutOutOfRange for empty halves,
// kRewardLeak when either half would include a Reward-Sequence step,
// kNotSimilar when the joined states are farther apart than epsilon_state.
FeintBehavior GenerateSplice(const Behavior& bi, const Behavior& bj,
                             std::size_t idx_i, std::size_t idx_j,
                             double epsilon_state);

// Every single-level feint the three generators can produce from `cat`.
std::vector<FeintBehavior> EnumerateFeintBehaviors(const Catalog& cat);

// How two behaviors are judged to share a junction action.
enum class CommonActionPredicate {
  kIdentity,      // same action id
  kSimilarState,  // same id, or start and end states both within epsilon
};

std::string_view PredicateName(CommonActionPredicate p);
CommonActionPredicate PredicateFromName(std::string_view name);

// A junction action shared by an ordered behavior pair, with the actions
// available before it in behavior_i and after it in behavior_j. In identity mode
// junction_i == junction_j; in similar-state mode they may differ.
struct FeintTemplate {
  std::string behavior_i;
  std::string behavior_j;
  std::size_t junction_index_i = 0;
  std::size_t junction_index_j = 0;
  std::string junction_i;
  std::string junction_j;
  std::vector<std::string> avail_prefix;  // behavior_i actions with index < k
  std::vector<std::string> avail_suffix;  // behavior_j actions with index > k
  TemplateVariant variant = TemplateVariant::kSpliceSimilar;

  std::string Key() const;
  bool operator==(const FeintTemplate&) const = default;
  auto operator<=>(const FeintTemplate& o) const {
    return std::tie(behavior_i, behavior_j, junction_index_i, junction_index_j,
                    junction_i, junction_j) <=>
           std::tie(o.behavior_i, o.behavior_j, o.junction_index_i,
                    o.junction_index_j, o.junction_i, o.junction_j);
  }
};

struct TemplateSet {
  CommonActionPredicate predicate = CommonActionPredicate::kIdentity;
  // Canonically sorted by (behavior_i, behavior_j, junction indices).
  std::vector<FeintTemplate> templates;

  bool operator==(const TemplateSet&) const = default;
};

// Precomputes the template lookup table over every ordered behavior pair,
// self-pairs included. Output is sorted and independent of the order in
// which behaviors appear in the catalog.
TemplateSet PrecomputeTemplates(
    const Catalog& cat,
    CommonActionPredicate predicate = CommonActionPredicate::kIdentity);

nlohmann::json TemplateSetToJson(const TemplateSet& set);
TemplateSet TemplateSetFromJson(const nlohmann::json& j);

}  // namespace feint

#endif  // FEINT_FEINT_GENERATOR_H_
