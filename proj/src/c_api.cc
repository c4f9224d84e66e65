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

#include "feint/feint_c.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "feint/catalog.h"
#include "feint/diversity.h"
#include "feint/dual_behavior.h"
#include "feint/error.h"
#include "feint/feint_generator.h"
#include "feint/game_env.h"
#include "feint/learning.h"
#include "json.hpp"

struct feint_catalog {
  std::shared_ptr<const feint::Catalog> catalog;
};

struct feint_trainer {
  std::unique_ptr<feint::Trainer> trainer;
};

namespace {

using feint::ErrorCode;
using nlohmann::json;

static_assert(static_cast<int>(ErrorCode::kParse) == FEINT_E_PARSE);
static_assert(static_cast<int>(ErrorCode::kIllegalAction) == FEINT_E_ILLEGAL_ACTION);
static_assert(static_cast<int>(ErrorCode::kInvalidArgument) == FEINT_E_INVALID_ARGUMENT);

thread_local std::string g_last_error;

template <typename F>
int Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return FEINT_OK;
  } catch (const feint::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return FEINT_E_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FEINT_E_INTERNAL;
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Require(const void* p, const char* what) {
  if (p == nullptr) {
    feint::Fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
  }
}

feint::ExperimentConfig ParseConfig(const char* text) {
  Require(text, "config_json");
  return feint::ExperimentFromJson(json::parse(text));
}

std::vector<feint::PolicySnapshot> ParsePool(const char* text, const char* what) {
  Require(text, what);
  const json j = json::parse(text);
  std::vector<feint::PolicySnapshot> pool;
  for (const json& p : j.at("policies")) pool.push_back(feint::SnapshotFromJson(p));
  if (pool.empty()) feint::Fail(ErrorCode::kEmptyPool, std::string(what) + " is empty");
  return pool;
}

// Every DBM the catalog admits, keyed by id.
std::map<std::string, feint::DualBehaviorModel> AllDbms(const feint::Catalog& cat,
                                                        const feint::TemplateSet& ts) {
  std::map<std::string, feint::DualBehaviorModel> out;
  std::vector<std::string> ids;
  for (const feint::Behavior& b : cat.behaviors()) {
    for (const feint::UnitAction& a : b.actions) ids.push_back(a.id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const std::string& a_t : ids) {
    for (const feint::Behavior& b : cat.behaviors()) {
      if (b.kind != feint::BehaviorKind::kAttack || b.stretch_end >= b.actions.size()) continue;
      for (const auto& m : feint::ComposeDbms(a_t, b.actions[b.stretch_end].id, ts, cat)) {
        out.emplace(m.Id(), m);
      }
    }
  }
  return out;
}

feint::AgentCommand ParseCommand(
    const std::string& s, const feint::CommandMenu& menu,
    std::map<std::string, std::shared_ptr<const feint::PlanScript>>& dbm_plans,
    const std::map<std::string, feint::DualBehaviorModel>& dbms,
    const feint::Catalog& cat) {
  if (s == "continue") return feint::AgentCommand::Continue();
  if (s.rfind("dbm:", 0) == 0) {
    const std::string id = s.substr(4);
    auto it = dbm_plans.find(id);
    if (it == dbm_plans.end()) {
      auto m = dbms.find(id);
      if (m == dbms.end()) feint::Fail(ErrorCode::kUnknownAction, "unknown DBM '" + id + "'");
      it = dbm_plans.emplace(id, feint::MakeDbmPlan(m->second, cat)).first;
    }
    return feint::AgentCommand::Start(it->second);
  }
  for (int k = 0; k < menu.size(); ++k) {
    if (menu.name(k) == s) return menu.Command(k);
  }
  feint::Fail(ErrorCode::kInvalidArgument, "unknown scripted command '" + s + "'");
}

}  // namespace

extern "C" {

const char* feint_version(void) { return "1.0.0"; }

const char* feint_last_error(void) { return g_last_error.c_str(); }

const char* feint_status_name(int status) {
  if (status == FEINT_OK) return "Ok";
  if (status == FEINT_E_INTERNAL) return "InternalError";
  if (status < FEINT_E_PARSE || status > FEINT_E_INVALID_ARGUMENT) return "UnknownStatus";
  return feint::ErrorCodeName(static_cast<ErrorCode>(status)).data();
}

void feint_string_free(char* s) { std::free(s); }

int feint_catalog_load(const char* path, feint_catalog** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new feint_catalog{std::make_shared<const feint::Catalog>(feint::LoadCatalog(path))};
  });
}

int feint_catalog_parse(const char* json_text, feint_catalog** out) {
  return Guard([&] {
    Require(json_text, "json_text");
    Require(out, "out");
    *out = new feint_catalog{
        std::make_shared<const feint::Catalog>(feint::ParseCatalog(json_text))};
  });
}

void feint_catalog_free(feint_catalog* catalog) { delete catalog; }

int feint_catalog_to_json(const feint_catalog* catalog, char** out_json) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(out_json, "out_json");
    *out_json = Dup(feint::CatalogToJson(*catalog->catalog).dump(1));
  });
}

int feint_catalog_summary(const feint_catalog* catalog, char** out_json) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(out_json, "out_json");
    const feint::Catalog& cat = *catalog->catalog;
    std::size_t actions = 0;
    json behaviors = json::array();
    for (const feint::Behavior& b : cat.behaviors()) {
      actions += b.actions.size();
      behaviors.push_back({{"id", b.id},
                           {"kind", b.kind == feint::BehaviorKind::kAttack ? "attack" : "defend"},
                           {"direction", feint::DirectionName(b.direction)},
                           {"length", b.actions.size()},
                           {"reward_value", b.reward_value}});
    }
    *out_json = Dup(json{{"epsilon_state", cat.epsilon_state()},
                         {"joint_count", cat.joint_count()},
                         {"behavior_count", cat.behaviors().size()},
                         {"action_count", actions},
                         {"behaviors", behaviors}}
                        .dump(1));
  });
}

int feint_templates(const feint_catalog* catalog, const char* predicate, char** out_json) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(out_json, "out_json");
    const auto pred = feint::PredicateFromName(predicate ? predicate : "identity");
    const feint::TemplateSet set = feint::PrecomputeTemplates(*catalog->catalog, pred);
    std::map<std::string, int> by_pair;
    for (const auto& t : set.templates) ++by_pair[t.behavior_i + "/" + t.behavior_j];
    json j = feint::TemplateSetToJson(set);
    j["count"] = set.templates.size();
    j["count_by_pair"] = by_pair;
    *out_json = Dup(j.dump(1));
  });
}

int feint_compose(const feint_catalog* catalog, const char* predicate, const char* a_t,
                  const char* a_target, char** out_json) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(a_t, "a_t");
    Require(a_target, "a_target");
    Require(out_json, "out_json");
    const auto pred = feint::PredicateFromName(predicate ? predicate : "identity");
    const feint::TemplateSet set = feint::PrecomputeTemplates(*catalog->catalog, pred);
    json selections = json::array();
    for (const auto& s : feint::BackwardSearch(a_t, a_target, set)) {
      selections.push_back(
          {{"select_i", s.select_i}, {"junction", s.junction}, {"select_j", s.select_j}});
    }
    json dbms = json::array();
    for (const auto& m : feint::ComposeDbms(a_t, a_target, set, *catalog->catalog)) {
      dbms.push_back(feint::DbmToJson(m));
    }
    *out_json = Dup(json{{"a_t", a_t},
                         {"a_target", a_target},
                         {"predicate", feint::PredicateName(pred)},
                         {"selections", selections},
                         {"dbms", dbms}}
                        .dump(1));
  });
}

int feint_classify_timing(long t_a2, long t_b1, long t_b2, char** out_name) {
  return Guard([&] {
    Require(out_name, "out_name");
    *out_name = Dup(std::string(feint::TimingClassName(feint::ClassifyTiming(t_a2, t_b1, t_b2))));
  });
}

int feint_simulate(const feint_catalog* catalog, const char* config_json,
                   const char* script_json, int episodes, uint64_t seed, char** out_events) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(out_events, "out_events");
    if (episodes < 1) feint::Fail(ErrorCode::kInvalidArgument, "episodes must be >= 1");
    feint::ExperimentConfig config = ParseConfig(config_json);
    config.seed = seed;
    std::string lines;
    auto emit = [&](int episode, json e) {
      e["episode"] = episode;
      lines += e.dump() + "\n";
    };
    if (script_json == nullptr) {
      feint::Trainer trainer(config, catalog->catalog);
      for (int ep = 0; ep < episodes; ++ep) {
        std::vector<json> events;
        trainer.RunEpisode(ep, false, &events);
        for (json& e : events) emit(ep, std::move(e));
      }
    } else {
      const json script = json::parse(script_json);
      const feint::Catalog& cat = *catalog->catalog;
      const feint::Env env(config.scenario, catalog->catalog);
      const feint::CommandMenu menu(cat);
      const auto dbms = AllDbms(cat, feint::PrecomputeTemplates(cat, config.harness.predicate));
      std::map<std::string, std::shared_ptr<const feint::PlanScript>> plans;
      for (int ep = 0; ep < episodes; ++ep) {
        feint::GameState state = env.Reset(feint::MixSeed(seed, ep));
        for (const json& row : script.at("steps")) {
          std::vector<feint::AgentCommand> cmds;
          for (const json& c : row) cmds.push_back(ParseCommand(c.get<std::string>(), menu, plans, dbms, cat));
          if (cmds.size() != state.agents.size()) {
            feint::Fail(ErrorCode::kInvalidArgument, "script rows need one command per agent");
          }
          for (const auto& e : env.Step(state, cmds).events) emit(ep, e.ToJson());
        }
      }
    }
    *out_events = Dup(lines);
  });
}

int feint_trainer_create(const feint_catalog* catalog, const char* config_json,
                         feint_trainer** out) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(out, "out");
    *out = new feint_trainer{
        std::make_unique<feint::Trainer>(ParseConfig(config_json), catalog->catalog)};
  });
}

void feint_trainer_free(feint_trainer* trainer) { delete trainer; }

int feint_trainer_train(feint_trainer* trainer, long episodes, char** out_csv) {
  return Guard([&] {
    Require(trainer, "trainer");
    Require(out_csv, "out_csv");
    const bool header = trainer->trainer->next_episode() == 0;
    *out_csv = Dup(trainer->trainer->Train(episodes).ToCsv(header));
  });
}

int feint_trainer_counters(const feint_trainer* trainer, char** out_json) {
  return Guard([&] {
    Require(trainer, "trainer");
    Require(out_json, "out_json");
    const feint::HarnessCounters& c = trainer->trainer->counters();
    *out_json = Dup(json{{"steps", c.steps},
                         {"episodes", c.episodes},
                         {"regular_inferences", c.regular_inferences},
                         {"feint_inferences", c.feint_inferences},
                         {"inference_violations", c.inference_violations},
                         {"imaginary_rollouts", c.imaginary_rollouts},
                         {"activations", c.activations},
                         {"commits", c.commits},
                         {"feint_started", c.feint_started},
                         {"commit_rule_violations", c.commit_rule_violations},
                         {"completed_dbms", c.completed_dbms},
                         {"feint_updates", c.feint_updates},
                         {"regular_updates", c.regular_updates}}
                        .dump(1));
  });
}

int feint_trainer_snapshot(const feint_trainer* trainer, int agent, const char* id,
                           char** out_json) {
  return Guard([&] {
    Require(trainer, "trainer");
    Require(out_json, "out_json");
    if (agent < 0 || agent >= trainer->trainer->config().scenario.agent_count) {
      feint::Fail(ErrorCode::kUnknownAgent, "unknown agent " + std::to_string(agent));
    }
    *out_json = Dup(
        feint::SnapshotToJson(trainer->trainer->Snapshot(agent, id ? id : "snapshot")).dump());
  });
}

int feint_evaluate(const feint_catalog* catalog, const char* config_json,
                   const char* pool_json, const char* opponents_json, int episodes,
                   uint64_t seed, char** out_json) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(out_json, "out_json");
    const feint::ExperimentConfig config = ParseConfig(config_json);
    const auto pool = ParsePool(pool_json, "pool");
    const auto opponents = ParsePool(opponents_json, "opponents");
    feint::PolicyPool rows;
    feint::PolicyPool cols;
    for (const auto& p : pool) rows.ids.push_back(p.id);
    for (const auto& p : opponents) cols.ids.push_back(p.id);
    const feint::PayoffMatrix a = feint::BuildPayoffMatrix(
        rows, cols,
        [&](std::size_t r, std::size_t c, std::uint64_t s) {
          return feint::EvaluatePair(config, catalog->catalog, pool[r], opponents[c], 1, s);
        },
        episodes, seed);
    json diversity = json::object();
    for (Eigen::Index k = 0; k < a.values.rows(); ++k) {
      feint::PayoffMatrix rest;
      rest.col_ids = a.col_ids;
      rest.values.resize(a.values.rows() - 1, a.values.cols());
      for (Eigen::Index r = 0, o = 0; r < a.values.rows(); ++r) {
        if (r != k) rest.values.row(o++) = a.values.row(r);
      }
      const Eigen::VectorXd row = a.values.row(k).transpose();
      diversity[a.row_ids[k]] =
          feint::ResponseDiversity(std::span<const double>(row.data(), row.size()), rest);
    }
    json values = json::array();
    for (Eigen::Index r = 0; r < a.values.rows(); ++r) {
      json line = json::array();
      for (Eigen::Index c = 0; c < a.values.cols(); ++c) line.push_back(a.values(r, c));
      values.push_back(line);
    }
    *out_json = Dup(json{{"exploitability", feint::UniformPoolExploitability(a)},
                         {"population_efficacy", feint::PopulationEfficacy(a)},
                         {"diversity", diversity},
                         {"rows", a.row_ids},
                         {"cols", a.col_ids},
                         {"payoffs", values},
                         {"payoff_csv", a.ToCsv()}}
                        .dump(1));
  });
}

int feint_bench_overhead(const feint_catalog* catalog, const char* config_json,
                         int episodes, uint64_t seed, char** out_json) {
  return Guard([&] {
    Require(catalog, "catalog");
    Require(out_json, "out_json");
    if (episodes < 1) feint::Fail(ErrorCode::kInvalidArgument, "episodes must be >= 1");
    feint::ExperimentConfig on = ParseConfig(config_json);
    on.episodes = episodes;
    on.seed = seed;
    if (on.feint_agents.empty()) on.feint_agents = {0};
    feint::ExperimentConfig off = on;
    off.feint_agents.clear();
    auto timed = [&](const feint::ExperimentConfig& c, feint::HarnessCounters& counters) {
      feint::Trainer trainer(c, catalog->catalog);
      const auto start = std::chrono::steady_clock::now();
      trainer.Train();
      const double s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      counters = trainer.counters();
      return s;
    };
    feint::HarnessCounters c_off;
    feint::HarnessCounters c_on;
    const double t_off = timed(off, c_off);
    const double t_on = timed(on, c_on);
    *out_json = Dup(json{{"episodes", episodes},
                         {"seed", seed},
                         {"feint_agents", on.feint_agents},
                         {"feint_off_seconds", t_off},
                         {"feint_on_seconds", t_on},
                         {"overhead_ratio", t_on / t_off},
                         {"inference_violations",
                          c_on.inference_violations + c_off.inference_violations},
                         {"steps", c_on.steps},
                         {"feint_inferences", c_on.feint_inferences},
                         {"regular_inferences", c_on.regular_inferences},
                         {"imaginary_rollouts", c_on.imaginary_rollouts},
                         {"commits", c_on.commits}}
                        .dump(1));
  });
}

}  // extern "C"
