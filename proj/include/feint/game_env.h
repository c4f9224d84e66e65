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

#ifndef FEINT_GAME_ENV_H_
#define FEINT_GAME_ENV_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "feint/catalog.h"
#include "feint/dual_behavior.h"
#include "feint/feint_generator.h"
#include "json.hpp"

namespace feint {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

struct Spawn {
  Vec2 position;
  double orientation = 0.0;  // radians
};

struct ScenarioConfig {
  int agent_count = 2;
  std::vector<int> teams;
  std::vector<std::string> agent_names;
  std::vector<Spawn> spawns;
  double arena_size = 10.0;
  std::string catalog_path;
  double hit_range = 1.0;
  double hit_half_angle_deg = 60.0;
  double knockdown_ratio = 2.0;
  int knockdown_steps = 3;
  int episode_length = 60;
  double move_step = 0.25;
  double spawn_jitter = 0.0;

  void Validate() const;
  static ScenarioConfig OneVsOne();
  static ScenarioConfig ThreeVsThree();
};

// Parses the "scenario" object of a config file. Unknown fields are rejected.
ScenarioConfig ScenarioFromJson(const nlohmann::json& j);
nlohmann::json ScenarioToJson(const ScenarioConfig& c);

enum class PlanOwner { kRegular, kFeint };

// Per-step facts precomputed when a plan is built, so stepping never goes
// back to the catalog.
struct PlanStepInfo {
  bool reward_step = false;
  double reward_value = 0.0;
  bool defending = false;
  Direction direction = Direction::kMid;
  bool feint_step = false;
  bool extending = false;     // forward motion inside a stretch-out
  double source_reward = 0.0;  // reward of the behavior this step belongs to
  std::size_t segment_start = 0;
};

struct PlanScript {
  std::string id;
  PlanOwner owner = PlanOwner::kRegular;
  std::vector<SourcedAction> steps;
  std::vector<PlanStepInfo> info;
  std::size_t feint_length = 0;
  std::string target_behavior_id;
};

std::shared_ptr<const PlanScript> MakeBehaviorPlan(const Behavior& b,
                                                   const Catalog& cat);
std::shared_ptr<const PlanScript> MakeDbmPlan(const DualBehaviorModel& dbm,
                                              const Catalog& cat);

struct ActivePlan {
  std::shared_ptr<const PlanScript> script;
  std::size_t progress = 0;  // index of the next step to execute
  std::vector<std::size_t> spent_segments;
  double accumulated_reward = 0.0;
  long started_at = 0;
};

struct AgentState {
  int team = 0;
  Vec2 position;
  double orientation = 0.0;
  Vec2 linear_velocity;
  double angular_velocity = 0.0;
  PhysicalState physical_state;
  std::optional<ActivePlan> plan;
  int knockdown_remaining = 0;
  double score = 0.0;
  // Facts about the step just executed, exposed to observers.
  std::optional<PlanStepInfo> visible_step;
  std::string last_action;
};

struct GameState {
  std::vector<AgentState> agents;
  long step = 0;
  double arena_size = 10.0;
};

// Stable 64-bit digest of every field of the state.
std::uint64_t StateDigest(const GameState& state);

enum class MoveDir { kForward, kBack, kLeft, kRight };

struct AgentCommand {
  enum class Kind { kContinue, kIdle, kMove, kStartPlan };
  Kind kind = Kind::kContinue;
  MoveDir move = MoveDir::kForward;
  std::shared_ptr<const PlanScript> plan;

  static AgentCommand Continue() { return {}; }
  static AgentCommand Idle() { return {Kind::kIdle, MoveDir::kForward, nullptr}; }
  static AgentCommand Move(MoveDir d) { return {Kind::kMove, d, nullptr}; }
  static AgentCommand Start(std::shared_ptr<const PlanScript> p) {
    return {Kind::kStartPlan, MoveDir::kForward, std::move(p)};
  }
};

struct StepEvent {
  enum class Type {
    kHit,
    kBlocked,
    kInterrupted,
    kKnockdown,
    kFeintStarted,
    kDbmCompleted,
    kIllegalAction,
  };
  Type type;
  long step = 0;
  int agent = -1;  // attacker / acting agent
  int other = -1;  // defender, when applicable
  double value = 0.0;
  long index = -1;  // plan progress for Interrupted
  std::string detail;

  nlohmann::json ToJson() const;
};

std::string_view EventTypeName(StepEvent::Type t);

struct StepOutcome {
  std::vector<double> rewards;
  std::vector<StepEvent> events;
};

// Relative quantities from one agent to every other agent, in agent-id
// order: position (2, agent frame), orientation, linear velocity (2, agent
// frame), angular velocity.
using Observation = std::vector<double>;

class Env {
 public:
  Env(ScenarioConfig config, std::shared_ptr<const Catalog> catalog);

  const ScenarioConfig& config() const { return config_; }
  const Catalog& catalog() const { return *catalog_; }
  std::shared_ptr<const Catalog> catalog_ptr() const { return catalog_; }
  // Pose every agent returns to after an interruption or knockdown.
  const PhysicalState& rest_state() const { return rest_state_; }

  GameState Reset(std::uint64_t seed) const;

  // Advances `state` by one unit step in place. Busy agents continue their
  // plans; a command that cannot be honoured becomes a no-op and yields an
  // IllegalAction event.
  StepOutcome Step(GameState& state, std::span<const AgentCommand> commands) const;

  Observation Observe(const GameState& state, int agent) const;
  // Uniform grid key for occupancy estimation (bins per dimension).
  std::string DiscretizeObservation(const Observation& obs, int bins = 8) const;

  bool IsOpponent(const GameState& state, int a, int b) const {
    return a != b && state.agents[a].team != state.agents[b].team;
  }
  // Nearest opponent, ties broken by lower id; -1 if none.
  int NearestOpponent(const GameState& state, int agent) const;
  // Whether `target` lies within hit range and the attacker's facing cone.
  bool InStrikeZone(const GameState& state, int attacker, int target) const;

 private:
  ScenarioConfig config_;
  std::shared_ptr<const Catalog> catalog_;
  PhysicalState rest_state_;
};

}  // namespace feint

#endif  // FEINT_GAME_ENV_H_
