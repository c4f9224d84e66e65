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

#ifndef FEINT_DUAL_BEHAVIOR_H_
#define FEINT_DUAL_BEHAVIOR_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "feint/catalog.h"
#include "feint/feint_generator.h"
#include "json.hpp"

namespace feint {

// Raw result of the backward search over the template table: the actions
// from a_t up to the junction in behavior_i, the junction, and the actions
// after the junction in behavior_j.
struct BackwardSelection {
  std::vector<std::string> select_i;
  std::string junction;
  std::vector<std::string> select_j;

  bool operator==(const BackwardSelection&) const = default;
  auto operator<=>(const BackwardSelection&) const = default;
};

// One pass over `templates`; returns the de-duplicated, sorted selection set.
std::vector<BackwardSelection> BackwardSearch(std::string_view a_t,
                                              std::string_view a_target,
                                              const TemplateSet& templates);

// A feint joined to a follow-up that reaches a Reward Sequence.
//
// The feint is a prefix palindrome of the selected stretch-out actions, so
// it starts and ends exactly in the start state of a_t. The follow-up then
// replays the stretch-out into the junction and continues along
// behavior_j, which makes feint end == follow-up start.
struct DualBehaviorModel {
  FeintBehavior feint;
  std::string junction;
  std::vector<SourcedAction> followup;
  std::size_t t_f = 0;  // feint length in steps
  std::size_t t_s = 0;  // total length in steps
  std::string target_behavior_id;
  std::string template_key;
  std::size_t select_start = 0;  // index of a_t in behavior_i

  std::vector<SourcedAction> Actions() const;
  // Stable identifier: template key, a_t position and feint cut.
  std::string Id() const;
  // Offset of the first follow-up step that lies in the target behavior's
  // Reward Sequence.
  std::size_t RewardOffset(const Catalog& cat) const;

  bool operator==(const DualBehaviorModel& o) const { return Id() == o.Id(); }
  bool operator<(const DualBehaviorModel& o) const { return Id() < o.Id(); }
};

// Composes every Dual-Behavior Model reachable from a_t to a_target via the
// template table. Throws kUnknownAction if either id is not in `cat`.
std::vector<DualBehaviorModel> ComposeDbms(std::string_view a_t,
                                           std::string_view a_target,
                                           const TemplateSet& templates,
                                           const Catalog& cat);

// Junction continuity, feint length bounds and reward reachability.
std::vector<std::string> CheckDbm(const DualBehaviorModel& dbm,
                                  const Catalog& cat);

nlohmann::json DbmToJson(const DualBehaviorModel& dbm);

enum class TimingClass { kTooShort, kProper, kTooLong };

std::string_view TimingClassName(TimingClass c);

// Classifies a feint by when its follow-up reward begins (t_a2) relative to
// the end of the opponent's defense (t_b1) and the start of the opponent's
// own reward (t_b2). Ties: t_a2 == t_b1 is Proper, t_a2 == t_b2 is TooLong.
// Throws kInvalidWindow unless t_b1 < t_b2.
TimingClass ClassifyTiming(long t_a2, long t_b1, long t_b2);

}  // namespace feint

#endif  // FEINT_DUAL_BEHAVIOR_H_
