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

#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "feint/dual_behavior.h"
#include "feint/error.h"
#include "feint/game_env.h"

namespace feint {
namespace {

using nlohmann::json;
using Type = StepEvent::Type;

std::shared_ptr<const Catalog> ShippedCatalog() {
  static const auto cat =
      std::make_shared<const Catalog>(LoadCatalog(std::string(FEINT_DATA_DIR) + "/catalog.json"));
  return cat;
}

struct Fixture {
  std::shared_ptr<const Catalog> cat = ShippedCatalog();
  Env env{ScenarioConfig::OneVsOne(), cat};
  GameState state = env.Reset(0);

  std::shared_ptr<const PlanScript> Behavior(const std::string& id) const {
    return MakeBehaviorPlan(cat->behavior(id), *cat);
  }
  std::shared_ptr<const PlanScript> Dbm(const std::string& id) const {
    const TemplateSet set = PrecomputeTemplates(*cat);
    for (const DualBehaviorModel& d : ComposeDbms("guard_up", "strike_low", set, *cat)) {
      if (d.Id() == id) return MakeDbmPlan(d, *cat);
    }
    FAIL("no DBM " << id);
    return nullptr;
  }
  std::vector<StepEvent> Step(AgentCommand a, AgentCommand b) {
    const std::vector<AgentCommand> cmds{std::move(a), std::move(b)};
    return env.Step(state, cmds).events;
  }
};

int Count(const std::vector<StepEvent>& events, Type t) {
  int n = 0;
  for (const StepEvent& e : events) n += e.type == t;
  return n;
}

TEST_CASE("scenario configs") {
  const ScenarioConfig one = ScenarioConfig::OneVsOne();
  one.Validate();
  CHECK(one.agent_count == 2);
  CHECK(one.agent_names == std::vector<std::string>{"Good", "Adv"});
  const ScenarioConfig three = ScenarioConfig::ThreeVsThree();
  three.Validate();
  CHECK(three.agent_count == 6);
  CHECK(three.teams == std::vector<int>{0, 0, 0, 1, 1, 1});

  const json j = ScenarioToJson(three);
  CHECK(ScenarioToJson(ScenarioFromJson(j)) == j);
  json bad = j;
  bad["gravity"] = 9.8;
  CHECK_THROWS_AS(ScenarioFromJson(bad), Error);
  ScenarioConfig broken = one;
  broken.teams = {0};
  CHECK_THROWS_AS(broken.Validate(), Error);
  broken = one;
  broken.episode_length = 0;
  CHECK_THROWS_AS(broken.Validate(), Error);
}

TEST_CASE("shipped scenario files parse") {
  for (const char* name : {"1v1.json", "3v3.json"}) {
    std::ifstream in(std::string(FEINT_DATA_DIR) + "/" + name);
    REQUIRE(in);
    const json j = json::parse(in);
    ScenarioFromJson(j.at("scenario")).Validate();
  }
}

TEST_CASE("reset is deterministic") {
  Fixture f;
  CHECK(StateDigest(f.env.Reset(4)) == StateDigest(f.env.Reset(4)));
  CHECK(f.state.agents[0].position == Vec2{4.55, 5.0});
  CHECK(f.state.agents[0].physical_state == f.env.rest_state());
  ScenarioConfig jittery = ScenarioConfig::OneVsOne();
  jittery.spawn_jitter = 0.1;
  const Env env(jittery, f.cat);
  CHECK(StateDigest(env.Reset(1)) == StateDigest(env.Reset(1)));
  CHECK(StateDigest(env.Reset(1)) != StateDigest(env.Reset(2)));
}

TEST_CASE("strike zone and nearest opponent") {
  Fixture f;
  CHECK(f.env.NearestOpponent(f.state, 0) == 1);
  CHECK(f.env.InStrikeZone(f.state, 0, 1));
  CHECK(f.env.InStrikeZone(f.state, 1, 0));
  f.state.agents[0].orientation = std::numbers::pi;  // facing away
  CHECK_FALSE(f.env.InStrikeZone(f.state, 0, 1));
  f.state.agents[0].orientation = 0.0;
  f.state.agents[1].position.x = 6.0;  // out of range
  CHECK_FALSE(f.env.InStrikeZone(f.state, 0, 1));
}

TEST_CASE("a landed jab on an idle opponent") {
  Fixture f;
  std::vector<StepEvent> all;
  double reward = 0.0;
  for (int t = 0; t < 6; ++t) {
    const std::vector<AgentCommand> cmds{
        t == 0 ? AgentCommand::Start(f.Behavior("jab_high")) : AgentCommand::Continue(),
        AgentCommand::Idle()};
    const StepOutcome out = f.env.Step(f.state, cmds);
    reward += out.rewards[0];
    all.insert(all.end(), out.events.begin(), out.events.end());
  }
  REQUIRE(Count(all, Type::kHit) == 1);
  CHECK(all[0].step == 3);
  CHECK(all[0].value == 0.7);
  CHECK(reward == 0.7);
  CHECK(f.state.agents[0].score == 0.7);
  // No plan to interrupt, so no knockdown either.
  CHECK(Count(all, Type::kInterrupted) == 0);
  CHECK(Count(all, Type::kKnockdown) == 0);
  CHECK_FALSE(f.state.agents[0].plan.has_value());
}

TEST_CASE("a matching guard blocks, a mismatched one does not") {
  for (const char* guard : {"guard_high", "guard_low"}) {
    Fixture f;
    std::vector<StepEvent> all;
    for (int t = 0; t < 6; ++t) {
      std::vector<StepEvent> ev =
          f.Step(t == 0 ? AgentCommand::Start(f.Behavior("jab_high")) : AgentCommand::Continue(),
                 t == 0 ? AgentCommand::Start(f.Behavior(guard)) : AgentCommand::Continue());
      all.insert(all.end(), ev.begin(), ev.end());
    }
    if (std::string(guard) == "guard_high") {
      CHECK(Count(all, Type::kBlocked) == 1);
      CHECK(Count(all, Type::kHit) == 0);
    } else {
      CHECK(Count(all, Type::kHit) == 1);
      CHECK(Count(all, Type::kInterrupted) == 1);
      // Guards carry no reward, so any hit reaches the knockdown threshold.
      CHECK(Count(all, Type::kKnockdown) == 1);
      CHECK(f.state.agents[1].physical_state == f.env.rest_state());
    }
  }
}

TEST_CASE("knocked-down agents skip their commands for the configured steps") {
  Fixture f;
  f.state.agents[1].knockdown_remaining = 2;
  const std::size_t before = StateDigest(f.state);
  f.Step(AgentCommand::Idle(), AgentCommand::Move(MoveDir::kBack));
  CHECK(f.state.agents[1].position == Vec2{5.45, 5.0});
  CHECK(f.state.agents[1].knockdown_remaining == 1);
  CHECK(StateDigest(f.state) != before);
  f.Step(AgentCommand::Idle(), AgentCommand::Idle());
  f.Step(AgentCommand::Idle(), AgentCommand::Move(MoveDir::kBack));
  CHECK(f.state.agents[1].position.x == doctest::Approx(5.7));
}

TEST_CASE("an out-of-range strike whiffs and stays live") {
  Fixture f;
  f.state.agents[1].position.x = 6.2;
  std::vector<StepEvent> all;
  for (int t = 0; t < 6; ++t) {
    std::vector<StepEvent> ev =
        f.Step(t == 0 ? AgentCommand::Start(f.Behavior("hook_low")) : AgentCommand::Continue(),
               t == 3 ? AgentCommand::Move(MoveDir::kForward) : AgentCommand::Idle());
    all.insert(all.end(), ev.begin(), ev.end());
  }
  // The strike step (3) whiffs; B steps in during the same step, but contact
  // is only checked on reward steps, which end after step 3.
  CHECK(Count(all, Type::kHit) == 0);
}

TEST_CASE("illegal actions") {
  Fixture f;
  std::vector<StepEvent> ev =
      f.Step(AgentCommand::Start(f.Behavior("jab_high")), AgentCommand::Idle());
  CHECK(Count(ev, Type::kIllegalAction) == 0);
  ev = f.Step(AgentCommand::Idle(), AgentCommand::Idle());
  CHECK(Count(ev, Type::kIllegalAction) == 1);
  CHECK(f.state.agents[0].plan.has_value());

  // Starting a behavior from a pose it does not begin in.
  Fixture g;
  g.state.agents[1].physical_state = g.cat->behavior("jab_high").actions[2].start_state;
  ev = g.Step(AgentCommand::Idle(), AgentCommand::Start(g.Behavior("hook_low")));
  REQUIRE(Count(ev, Type::kIllegalAction) == 1);
  CHECK(ev[0].agent == 1);
  CHECK_FALSE(g.state.agents[1].plan.has_value());
}

TEST_CASE("feint plans announce start and completion") {
  Fixture f;
  const auto plan = f.Dbm("hook_low/hook_low/1/1@0#1");
  REQUIRE(plan->owner == PlanOwner::kFeint);
  CHECK(plan->feint_length == 2);
  CHECK(plan->info[0].feint_step);
  CHECK(plan->info[0].source_reward == 0.0);
  CHECK_FALSE(plan->info[2].feint_step);
  f.state.agents[1].position.x = 9.0;  // keep the opponent out of reach
  std::vector<StepEvent> all;
  for (std::size_t t = 0; t < plan->steps.size(); ++t) {
    std::vector<StepEvent> ev =
        f.Step(t == 0 ? AgentCommand::Start(plan) : AgentCommand::Continue(), AgentCommand::Idle());
    all.insert(all.end(), ev.begin(), ev.end());
  }
  CHECK(Count(all, Type::kFeintStarted) == 1);
  REQUIRE(Count(all, Type::kDbmCompleted) == 1);
  CHECK(all.back().step == static_cast<long>(plan->steps.size()) - 1);
  CHECK(f.state.agents[0].physical_state == f.env.rest_state());
}

TEST_CASE("observations") {
  Fixture f;
  const Observation obs = f.env.Observe(f.state, 0);
  REQUIRE(obs.size() == 6);
  CHECK(obs[0] == doctest::Approx(0.9));  // opponent straight ahead
  CHECK(obs[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(obs[2]) == doctest::Approx(std::numbers::pi));
  CHECK_THROWS_AS(f.env.Observe(f.state, 5), Error);
  const std::string key = f.env.DiscretizeObservation(obs, 8);
  CHECK(key == f.env.DiscretizeObservation(f.env.Observe(f.env.Reset(0), 0), 8));
  CHECK(std::count(key.begin(), key.end(), '.') == 5);
}

TEST_CASE("steps are deterministic") {
  Fixture a;
  Fixture b;
  for (int t = 0; t < 12; ++t) {
    const AgentCommand ca = t == 0 ? AgentCommand::Start(a.Behavior("body_mid"))
                                   : AgentCommand::Continue();
    const AgentCommand cb = t % 3 == 0 ? AgentCommand::Move(MoveDir::kLeft) : AgentCommand::Idle();
    a.Step(ca, cb);
    b.Step(ca, cb);
    CHECK(StateDigest(a.state) == StateDigest(b.state));
  }
  CHECK(a.state.step == 12);
}

TEST_CASE("three-versus-three teams") {
  const Env env(ScenarioConfig::ThreeVsThree(), ShippedCatalog());
  const GameState s = env.Reset(0);
  CHECK(s.agents.size() == 6);
  CHECK(env.IsOpponent(s, 0, 3));
  CHECK_FALSE(env.IsOpponent(s, 0, 1));
  CHECK(env.Observe(s, 0).size() == 30);
  CHECK(env.NearestOpponent(s, 1) == 4);
}

}  // namespace
}  // namespace feint
