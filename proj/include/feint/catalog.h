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

#ifndef FEINT_CATALOG_H_
#define FEINT_CATALOG_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace feint {

inline constexpr double kDefaultEpsilonState = 0.05;

// Planar position plus stretch angle, normalized to [-1, 1].
using Joint = std::array<double, 3>;

enum class Footing { kLeftForward, kRightForward, kNeutral };

std::string_view FootingName(Footing footing);
Footing FootingFromName(std::string_view name);

struct PhysicalState {
  std::vector<Joint> joints;
  Footing footing = Footing::kNeutral;

  bool operator==(const PhysicalState&) const = default;
};

// One unit-time-step movement between two physical states.
struct UnitAction {
  std::string id;
  PhysicalState start_state;
  PhysicalState end_state;

  bool operator==(const UnitAction&) const = default;
};

enum class BehaviorKind { kAttack, kDefend };
enum class Direction { kHigh, kMid, kLow };

std::string_view DirectionName(Direction direction);
Direction DirectionFromName(std::string_view name);

// An attack (or defense) decomposed into three consecutive partitions:
//   Sequence 1 (stretch-out) = actions[0, stretch_end)
//   Sequence 2 (reward)      = actions[stretch_end, reward_end)
//   Sequence 3 (retract)     = actions[reward_end, actions.size())
struct Behavior {
  std::string id;
  std::string name;
  std::vector<UnitAction> actions;
  std::size_t stretch_end = 0;
  std::size_t reward_end = 0;
  double reward_value = 0.0;
  BehaviorKind kind = BehaviorKind::kAttack;
  Direction direction = Direction::kMid;

  bool InRewardSequence(std::size_t index) const {
    return index >= stretch_end && index < reward_end;
  }

  bool operator==(const Behavior&) const = default;
};

// L-infinity distance over all joint coordinates, plus a footing penalty of
// 2 * epsilon_state when the footings differ. This is a metric; two states
// are "similar" iff their distance is at most epsilon_state.
double StateDistance(const PhysicalState& a, const PhysicalState& b,
                     double epsilon_state = kDefaultEpsilonState);

struct Violation {
  enum class Kind { kContinuity, kPartition, kState, kDimension };
  Kind kind;
  // Index of the offending action, or of the left action of a discontinuous
  // adjacent pair.
  std::size_t index = 0;
  std::string message;
};

struct ValidationReport {
  std::string behavior_id;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t Count(Violation::Kind kind) const;
  std::string Summary() const;
};

class Catalog {
 public:
  Catalog(double epsilon_state, std::size_t joint_count,
          std::vector<Behavior> behaviors);

  double epsilon_state() const { return epsilon_state_; }
  std::size_t joint_count() const { return joint_count_; }
  const std::vector<Behavior>& behaviors() const { return behaviors_; }

  const Behavior& behavior(std::string_view id) const;
  const Behavior* FindBehavior(std::string_view id) const;
  const UnitAction* FindAction(std::string_view id) const;
  bool HasAction(std::string_view id) const {
    return FindAction(id) != nullptr;
  }

  bool operator==(const Catalog& other) const {
    return epsilon_state_ == other.epsilon_state_ &&
           joint_count_ == other.joint_count_ &&
           behaviors_ == other.behaviors_;
  }

 private:
  double epsilon_state_;
  std::size_t joint_count_;
  std::vector<Behavior> behaviors_;
  std::map<std::string, std::size_t, std::less<>> behavior_index_;
  std::map<std::string, UnitAction, std::less<>> actions_;
};

// Checks the partition indices, state ranges and adjacent-pair continuity of
// `b` against the catalog's tolerance and joint count. Never throws.
ValidationReport ValidateBehavior(const Behavior& b, double epsilon_state,
                                  std::size_t joint_count);
ValidationReport ValidateBehavior(const Behavior& b, const Catalog& cat);

Catalog CatalogFromJson(const nlohmann::json& j);
nlohmann::json CatalogToJson(const Catalog& cat);
nlohmann::json StateToJson(const PhysicalState& s);

Catalog LoadCatalog(const std::string& path);
Catalog ParseCatalog(std::string_view text);
void SaveCatalog(const Catalog& cat, const std::string& path);

}  // namespace feint

#endif  // FEINT_CATALOG_H_
