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

#include "feint/game_env.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <set>

#include "feint/error.h"
#include "feint/rng.h"

namespace feint {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

double WrapAngle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

Vec2 Rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double Dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

// ---------------------------------------------------------------------------
// Scenario configuration.

void ScenarioConfig::Validate() const {
  auto bad = [](const std::string& msg) { Fail(ErrorCode::kConfig, msg); };
  if (agent_count < 2) bad("agent_count must be >= 2");
  const auto k = static_cast<std::size_t>(agent_count);
  if (teams.size() != k) bad("teams must list one team per agent");
  if (spawns.size() != k) bad("spawns must list one spawn per agent");
  if (!agent_names.empty() && agent_names.size() != k) {
    bad("agent_names must be empty or list one name per agent");
  }
  if (std::set<int>(teams.begin(), teams.end()).size() < 2) {
    bad("at least two teams are required");
  }
  if (!(arena_size > 0.0)) bad("arena_size must be > 0");
  for (const Spawn& s : spawns) {
    if (s.position.x < 0.0 || s.position.x > arena_size || s.position.y < 0.0 ||
        s.position.y > arena_size) {
      bad("spawn outside the arena");
    }
  }
  if (!(hit_range > 0.0)) bad("hit_range must be > 0");
  if (!(hit_half_angle_deg > 0.0 && hit_half_angle_deg <= 180.0)) {
    bad("hit_half_angle_deg must lie in (0, 180]");
  }
  if (knockdown_ratio < 0.0 || knockdown_steps < 0) bad("negative knockdown constants");
  if (episode_length < 1) bad("episode_length must be >= 1");
  if (move_step < 0.0 || spawn_jitter < 0.0) bad("negative movement constants");
}

ScenarioConfig ScenarioConfig::OneVsOne() {
  ScenarioConfig c;
  c.agent_count = 2;
  c.teams = {0, 1};
  c.agent_names = {"Good", "Adv"};
  c.spawns = {{{4.55, 5.0}, 0.0}, {{5.45, 5.0}, kPi}};
  return c;
}

ScenarioConfig ScenarioConfig::ThreeVsThree() {
  ScenarioConfig c;
  c.agent_count = 6;
  c.teams = {0, 0, 0, 1, 1, 1};
  c.agent_names = {"Good 1", "Good 2", "Good 3", "Adv 1", "Adv 2", "Adv 3"};
  c.spawns = {{{4.55, 4.0}, 0.0}, {{4.55, 5.0}, 0.0}, {{4.55, 6.0}, 0.0},
              {{5.45, 4.0}, kPi}, {{5.45, 5.0}, kPi}, {{5.45, 6.0}, kPi}};
  return c;
}

ScenarioConfig ScenarioFromJson(const json& j) {
  if (!j.is_object()) Fail(ErrorCode::kConfig, "scenario must be an object");
  static const std::set<std::string> kKnown = {
      "agent_count", "teams",          "agent_names",  "spawns",
      "arena_size",  "catalog",        "hit_range",    "hit_half_angle_deg",
      "knockdown_ratio", "knockdown_steps", "episode_length", "move_step",
      "spawn_jitter"};
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.count(key)) Fail(ErrorCode::kConfig, "scenario: unknown field '" + key + "'");
  }
  ScenarioConfig c;
  try {
    c.agent_count = j.at("agent_count").get<int>();
    c.teams = j.at("teams").get<std::vector<int>>();
    c.agent_names = j.value("agent_names", std::vector<std::string>{});
    for (const json& s : j.at("spawns")) {
      c.spawns.push_back({{s.at("x").get<double>(), s.at("y").get<double>()},
                          s.value("orientation", 0.0)});
    }
    c.arena_size = j.value("arena_size", c.arena_size);
    c.catalog_path = j.value("catalog", std::string{});
    c.hit_range = j.value("hit_range", c.hit_range);
    c.hit_half_angle_deg = j.value("hit_half_angle_deg", c.hit_half_angle_deg);
    c.knockdown_ratio = j.value("knockdown_ratio", c.knockdown_ratio);
    c.knockdown_steps = j.value("knockdown_steps", c.knockdown_steps);
    c.episode_length = j.value("episode_length", c.episode_length);
    c.move_step = j.value("move_step", c.move_step);
    c.spawn_jitter = j.value("spawn_jitter", c.spawn_jitter);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("scenario: ") + e.what());
  }
  c.Validate();
  return c;
}

json ScenarioToJson(const ScenarioConfig& c) {
  json spawns = json::array();
  for (const Spawn& s : c.spawns) {
    spawns.push_back({{"x", s.position.x}, {"y", s.position.y}, {"orientation", s.orientation}});
  }
  return json{{"agent_count", c.agent_count},
              {"teams", c.teams},
              {"agent_names", c.agent_names},
              {"spawns", spawns},
              {"arena_size", c.arena_size},
              {"catalog", c.catalog_path},
              {"hit_range", c.hit_range},
              {"hit_half_angle_deg", c.hit_half_angle_deg},
              {"knockdown_ratio", c.knockdown_ratio},
              {"knockdown_steps", c.knockdown_steps},
              {"episode_length", c.episode_length},
              {"move_step", c.move_step},
              {"spawn_jitter", c.spawn_jitter}};
}

// ---------------------------------------------------------------------------
// Plans.

namespace {

PlanStepInfo InfoFor(const SourcedAction& a, const Catalog& cat) {
  PlanStepInfo info;
  const Behavior* b = cat.FindBehavior(a.behavior_id);
  if (b == nullptr) return info;
  info.reward_step = IsRewardStep(a, cat);
  info.reward_value = info.reward_step ? b->reward_value : 0.0;
  info.defending = b->kind == BehaviorKind::kDefend;
  info.direction = b->direction;
  info.extending = !a.reflected && b->kind == BehaviorKind::kAttack &&
                   a.index < b->stretch_end;
  info.source_reward = b->kind == BehaviorKind::kAttack ? b->reward_value : 0.0;
  return info;
}

void FillSegments(PlanScript& script) {
  for (std::size_t k = 0; k < script.info.size(); ++k) {
    PlanStepInfo& info = script.info[k];
    if (!info.reward_step) continue;
    const bool continues = k > 0 && script.info[k - 1].reward_step &&
                           script.steps[k - 1].behavior_id == script.steps[k].behavior_id &&
                           script.steps[k - 1].index + 1 == script.steps[k].index;
    info.segment_start = continues ? script.info[k - 1].segment_start : k;
  }
}

}  // namespace

std::shared_ptr<const PlanScript> MakeBehaviorPlan(const Behavior& b,
                                                   const Catalog& cat) {
  auto script = std::make_shared<PlanScript>();
  script->id = b.id;
  script->owner = PlanOwner::kRegular;
  script->steps = SourceRange(b, 0, b.actions.size());
  script->target_behavior_id = b.id;
  for (const SourcedAction& a : script->steps) script->info.push_back(InfoFor(a, cat));
  FillSegments(*script);
  return script;
}

std::shared_ptr<const PlanScript> MakeDbmPlan(const DualBehaviorModel& dbm,
                                              const Catalog& cat) {
  auto script = std::make_shared<PlanScript>();
  script->id = dbm.Id();
  script->owner = PlanOwner::kFeint;
  script->steps = dbm.Actions();
  script->feint_length = dbm.t_f;
  script->target_behavior_id = dbm.target_behavior_id;
  for (std::size_t k = 0; k < script->steps.size(); ++k) {
    PlanStepInfo info = InfoFor(script->steps[k], cat);
    if (k < dbm.t_f) {
      info.feint_step = true;
      info.reward_step = false;
      info.reward_value = 0.0;
      info.source_reward = 0.0;
    }
    script->info.push_back(info);
  }
  FillSegments(*script);
  return script;
}

// ---------------------------------------------------------------------------
// Digest.

namespace {

class Fnv {
 public:
  void Bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void Double(double d) {
    if (d == 0.0) d = 0.0;  // fold -0.0
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    U64(bits);
  }
  void U64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    Bytes(b, 8);
  }
  void Str(const std::string& s) {
    U64(s.size());
    Bytes(s.data(), s.size());
  }
  void State(const PhysicalState& s) {
    U64(s.joints.size());
    for (const Joint& j : s.joints) {
      for (double x : j) Double(x);
    }
    U64(static_cast<std::uint64_t>(s.footing));
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::uint64_t StateDigest(const GameState& state) {
  Fnv h;
  h.U64(static_cast<std::uint64_t>(state.step));
  h.Double(state.arena_size);
  for (const AgentState& a : state.agents) {
    h.U64(static_cast<std::uint64_t>(a.team));
    h.Double(a.position.x);
    h.Double(a.position.y);
    h.Double(a.orientation);
    h.Double(a.linear_velocity.x);
    h.Double(a.linear_velocity.y);
    h.Double(a.angular_velocity);
    h.State(a.physical_state);
    h.U64(a.plan.has_value());
    if (a.plan) {
      h.Str(a.plan->script->id);
      h.U64(a.plan->progress);
      h.U64(a.plan->spent_segments.size());
      for (std::size_t s : a.plan->spent_segments) h.U64(s);
      h.Double(a.plan->accumulated_reward);
      h.U64(static_cast<std::uint64_t>(a.plan->started_at));
    }
    h.U64(static_cast<std::uint64_t>(a.knockdown_remaining));
    h.Double(a.score);
    h.Str(a.last_action);
  }
  return h.value();
}

// ---------------------------------------------------------------------------
// Events.

std::string_view EventTypeName(StepEvent::Type t) {
  switch (t) {
    case StepEvent::Type::kHit: return "Hit";
    case StepEvent::Type::kBlocked: return "Blocked";
    case StepEvent::Type::kInterrupted: return "Interrupted";
    case StepEvent::Type::kKnockdown: return "Knockdown";
    case StepEvent::Type::kFeintStarted: return "FeintStarted";
    case StepEvent::Type::kDbmCompleted: return "DBMCompleted";
    case StepEvent::Type::kIllegalAction: return "IllegalAction";
  }
  return "Unknown";
}

json StepEvent::ToJson() const {
  json j{{"step", step}, {"type", EventTypeName(type)}, {"agent", agent}};
  if (other >= 0) j["other"] = other;
  if (type == Type::kHit || type == Type::kBlocked || type == Type::kDbmCompleted ||
      type == Type::kInterrupted) {
    j["value"] = value;
  }
  if (index >= 0) j["index"] = index;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

// ---------------------------------------------------------------------------
// Environment.

Env::Env(ScenarioConfig config, std::shared_ptr<const Catalog> catalog)
    : config_(std::move(config)), catalog_(std::move(catalog)) {
  config_.Validate();
  if (!catalog_ || catalog_->behaviors().empty()) {
    Fail(ErrorCode::kConfig, "environment needs a non-empty catalog");
  }
  rest_state_ = catalog_->behaviors().front().actions.front().start_state;
}

GameState Env::Reset(std::uint64_t seed) const {
  Rng rng(seed);
  GameState state;
  state.arena_size = config_.arena_size;
  for (int i = 0; i < config_.agent_count; ++i) {
    AgentState a;
    a.team = config_.teams[i];
    a.position = config_.spawns[i].position;
    a.orientation = config_.spawns[i].orientation;
    if (config_.spawn_jitter > 0.0) {
      a.position.x += config_.spawn_jitter * (2.0 * rng.Uniform() - 1.0);
      a.position.y += config_.spawn_jitter * (2.0 * rng.Uniform() - 1.0);
      a.position.x = std::clamp(a.position.x, 0.0, config_.arena_size);
      a.position.y = std::clamp(a.position.y, 0.0, config_.arena_size);
    }
    a.physical_state = rest_state_;
    state.agents.push_back(std::move(a));
  }
  return state;
}

int Env::NearestOpponent(const GameState& state, int agent) const {
  int best = -1;
  double best_d = 0.0;
  for (int j = 0; j < static_cast<int>(state.agents.size()); ++j) {
    if (!IsOpponent(state, agent, j)) continue;
    const double d = Dist(state.agents[agent].position, state.agents[j].position);
    if (best < 0 || d < best_d) {
      best = j;
      best_d = d;
    }
  }
  return best;
}

bool Env::InStrikeZone(const GameState& state, int attacker, int target) const {
  const AgentState& a = state.agents[attacker];
  const AgentState& t = state.agents[target];
  if (Dist(a.position, t.position) > config_.hit_range) return false;
  const double bearing = std::atan2(t.position.y - a.position.y, t.position.x - a.position.x);
  return std::abs(WrapAngle(bearing - a.orientation)) <=
         config_.hit_half_angle_deg * kPi / 180.0 + 1e-12;
}

StepOutcome Env::Step(GameState& state, std::span<const AgentCommand> commands) const {
  const int k = static_cast<int>(state.agents.size());
  if (static_cast<int>(commands.size()) != k) {
    Fail(ErrorCode::kInvalidArgument, "one command per agent is required");
  }
  const double eps = catalog_->epsilon_state();
  const long t = state.step;
  StepOutcome out;
  out.rewards.assign(k, 0.0);
  auto event = [&](StepEvent::Type type, int agent, int other, double value,
                   long index, std::string detail) {
    out.events.push_back({type, t, agent, other, value, index, std::move(detail)});
  };

  std::vector<Vec2> prev_pos(k);
  std::vector<double> prev_ori(k);
  std::vector<const PlanStepInfo*> current(k, nullptr);

  // Actions and movement.
  for (int i = 0; i < k; ++i) {
    AgentState& a = state.agents[i];
    const AgentCommand& cmd = commands[i];
    prev_pos[i] = a.position;
    prev_ori[i] = a.orientation;
    a.visible_step.reset();
    if (a.knockdown_remaining > 0) {
      --a.knockdown_remaining;
      continue;
    }
    if (a.plan) {
      if (cmd.kind != AgentCommand::Kind::kContinue) {
        event(StepEvent::Type::kIllegalAction, i, -1, 0.0, -1, "agent is busy with a plan");
      }
    } else {
      switch (cmd.kind) {
        case AgentCommand::Kind::kContinue:
        case AgentCommand::Kind::kIdle:
          break;
        case AgentCommand::Kind::kMove: {
          Vec2 dir{std::cos(a.orientation), std::sin(a.orientation)};
          if (cmd.move == MoveDir::kBack) dir = {-dir.x, -dir.y};
          if (cmd.move == MoveDir::kLeft) dir = {-dir.y, dir.x};
          if (cmd.move == MoveDir::kRight) dir = {dir.y, -dir.x};
          a.position.x = std::clamp(a.position.x + config_.move_step * dir.x, 0.0,
                                    config_.arena_size);
          a.position.y = std::clamp(a.position.y + config_.move_step * dir.y, 0.0,
                                    config_.arena_size);
          break;
        }
        case AgentCommand::Kind::kStartPlan: {
          if (!cmd.plan || cmd.plan->steps.empty()) {
            event(StepEvent::Type::kIllegalAction, i, -1, 0.0, -1, "empty plan");
            break;
          }
          const PhysicalState& start = cmd.plan->steps.front().action.start_state;
          if (start.joints.size() != a.physical_state.joints.size() ||
              StateDistance(a.physical_state, start, eps) > eps) {
            event(StepEvent::Type::kIllegalAction, i, -1, 0.0, -1,
                  "plan '" + cmd.plan->id + "' is not continuous with the current pose");
            break;
          }
          a.plan = ActivePlan{cmd.plan, 0, {}, 0.0, t};
          if (cmd.plan->owner == PlanOwner::kFeint) {
            event(StepEvent::Type::kFeintStarted, i, -1, 0.0, -1, cmd.plan->id);
          }
          break;
        }
      }
    }
    if (a.plan) {
      const PlanScript& script = *a.plan->script;
      const std::size_t p = a.plan->progress;
      current[i] = &script.info[p];
      a.visible_step = script.info[p];
      a.physical_state = script.steps[p].action.end_state;
      a.last_action = script.steps[p].action.id;
    }
  }

  // Facing and velocities.
  for (int i = 0; i < k; ++i) {
    AgentState& a = state.agents[i];
    const int opp = NearestOpponent(state, i);
    if (opp >= 0) {
      const Vec2 o = state.agents[opp].position;
      if (Dist(o, a.position) > 1e-12) {
        a.orientation = std::atan2(o.y - a.position.y, o.x - a.position.x);
      }
    }
    a.linear_velocity = {a.position.x - prev_pos[i].x, a.position.y - prev_pos[i].y};
    a.angular_velocity = WrapAngle(a.orientation - prev_ori[i]);
  }

  // Contacts, resolved in agent-id order.
  std::vector<bool> cancelled(k, false);
  for (int i = 0; i < k; ++i) {
    if (cancelled[i] || current[i] == nullptr || !current[i]->reward_step) continue;
    AgentState& a = state.agents[i];
    ActivePlan& plan = *a.plan;
    const std::size_t segment = current[i]->segment_start;
    if (std::find(plan.spent_segments.begin(), plan.spent_segments.end(), segment) !=
        plan.spent_segments.end()) {
      continue;
    }
    int target = -1;
    double target_d = 0.0;
    for (int j = 0; j < k; ++j) {
      if (!IsOpponent(state, i, j) || state.agents[j].knockdown_remaining > 0) continue;
      if (!InStrikeZone(state, i, j)) continue;
      const double d = Dist(a.position, state.agents[j].position);
      if (target < 0 || d < target_d) {
        target = j;
        target_d = d;
      }
    }
    if (target < 0) continue;  // whiff: the segment stays live
    plan.spent_segments.push_back(segment);
    AgentState& d = state.agents[target];
    const bool guarding = !cancelled[target] && current[target] != nullptr &&
                          current[target]->defending &&
                          current[target]->direction == current[i]->direction;
    if (guarding) {
      event(StepEvent::Type::kBlocked, i, target, 0.0, -1, plan.script->id);
      continue;
    }
    const double value = current[i]->reward_value;
    out.rewards[i] += value;
    a.score += value;
    event(StepEvent::Type::kHit, i, target, value, -1, plan.script->id);
    if (d.plan && !cancelled[target]) {
      const double victim_reward =
          current[target] != nullptr && !current[target]->feint_step
              ? current[target]->source_reward
              : 0.0;
      event(StepEvent::Type::kInterrupted, target, i, d.plan->accumulated_reward,
            static_cast<long>(d.plan->progress), d.plan->script->id);
      d.plan.reset();
      cancelled[target] = true;
      d.physical_state = rest_state_;
      if (value >= config_.knockdown_ratio * victim_reward) {
        event(StepEvent::Type::kKnockdown, target, i, 0.0, -1, "");
        d.knockdown_remaining = config_.knockdown_steps;
      }
    }
  }

  // Advance plans.
  for (int i = 0; i < k; ++i) {
    AgentState& a = state.agents[i];
    if (!a.plan) continue;
    a.plan->accumulated_reward += out.rewards[i];
    if (++a.plan->progress == a.plan->script->steps.size()) {
      if (a.plan->script->owner == PlanOwner::kFeint) {
        event(StepEvent::Type::kDbmCompleted, i, -1, a.plan->accumulated_reward, -1,
              a.plan->script->id);
      }
      a.plan.reset();
    }
  }
  ++state.step;
  return out;
}

Observation Env::Observe(const GameState& state, int agent) const {
  if (agent < 0 || agent >= static_cast<int>(state.agents.size())) {
    Fail(ErrorCode::kUnknownAgent, "unknown agent " + std::to_string(agent));
  }
  const AgentState& me = state.agents[agent];
  Observation obs;
  obs.reserve(6 * (state.agents.size() - 1));
  for (int j = 0; j < static_cast<int>(state.agents.size()); ++j) {
    if (j == agent) continue;
    const AgentState& o = state.agents[j];
    const Vec2 p = Rotate({o.position.x - me.position.x, o.position.y - me.position.y},
                          -me.orientation);
    const Vec2 v = Rotate({o.linear_velocity.x - me.linear_velocity.x,
                           o.linear_velocity.y - me.linear_velocity.y},
                          -me.orientation);
    obs.insert(obs.end(), {p.x, p.y, WrapAngle(o.orientation - me.orientation), v.x, v.y,
                           o.angular_velocity - me.angular_velocity});
  }
  return obs;
}

std::string Env::DiscretizeObservation(const Observation& obs, int bins) const {
  const double pos = config_.arena_size;
  const double vel = std::max(2.0 * config_.move_step, 1e-9);
  const double range[6] = {pos, pos, kPi, vel, vel, kPi};
  std::string key;
  for (std::size_t d = 0; d < obs.size(); ++d) {
    const double lim = range[d % 6];
    int b = static_cast<int>(std::floor((obs[d] + lim) / (2.0 * lim) * bins));
    b = std::clamp(b, 0, bins - 1);
    if (d > 0) key += '.';
    key += std::to_string(b);
  }
  return key;
}

}  // namespace feint
