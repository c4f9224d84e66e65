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

// Batch front end over the feint C API.
//
//   feint_cli templates --catalog data/catalog.json --out-dir out/t
//   feint_cli train --config data/1v1.json --seed 7 --out-dir out/run7
//   feint_cli evaluate --config data/1v1.json --pool out/run7/pool.json
//       --opponents out/run7/opponents.json --out-dir out/eval

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "feint/feint_c.h"
#include "json.hpp"

#ifndef FEINT_BUILD_ID
#define FEINT_BUILD_ID "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Status-carrying failure raised by any step of a subcommand.
struct CliError {
  int status;
  std::string message;
};

[[noreturn]] void Throw(int status, std::string message) {
  throw CliError{status, std::move(message)};
}

void Check(int status) {
  if (status != FEINT_OK) Throw(status, feint_last_error());
}

// Owns a string returned by the C API.
class CString {
 public:
  CString() = default;
  ~CString() { feint_string_free(p_); }
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  char** out() { return &p_; }
  std::string str() const { return p_ ? p_ : ""; }

 private:
  char* p_ = nullptr;
};

class Catalog {
 public:
  explicit Catalog(const std::string& path) { Check(feint_catalog_load(path.c_str(), &c_)); }
  ~Catalog() { feint_catalog_free(c_); }
  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;
  const feint_catalog* get() const { return c_; }

 private:
  feint_catalog* c_ = nullptr;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(FEINT_E_IO, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ParseJsonFile(const std::string& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    Throw(FEINT_E_PARSE, path + ": " + e.what());
  }
}

std::string Timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Options {
  std::string config;
  std::string catalog;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::optional<int> episodes;
  std::optional<std::string> feint_agents;
  std::optional<std::string> learner;
  std::optional<std::string> divergence;
  std::string predicate = "identity";
  std::string a_t;
  std::string a_target;
  std::string script;
  std::string pool;
  std::string opponents;
  int snapshots = 5;
};

class Run {
 public:
  Run(std::string subcommand, const Options& opt)
      : subcommand_(std::move(subcommand)), opt_(opt), started_(Timestamp()) {}

  const Options& opt() const { return opt_; }

  // Experiment config with command-line overrides applied.
  json Config() const {
    if (opt_.config.empty()) Throw(FEINT_E_CONFIG, "--config is required");
    json c = ParseJsonFile(opt_.config);
    c["seed"] = opt_.seed;
    if (opt_.episodes) c["episodes"] = *opt_.episodes;
    if (opt_.feint_agents) {
      std::vector<int> ids;
      std::stringstream ss(*opt_.feint_agents);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
          std::size_t used = 0;
          ids.push_back(std::stoi(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          Throw(FEINT_E_INVALID_ARGUMENT, "--feint-agents expects agent ids, got '" + tok + "'");
        }
      }
      c["feint_agents"] = ids;
    }
    if (opt_.learner) c["harness"]["learner"] = *opt_.learner;
    if (opt_.divergence) c["harness"]["f_divergence"] = *opt_.divergence;
    return c;
  }

  // --catalog, else the config's catalog path relative to the config file.
  std::string CatalogPath() {
    if (!opt_.catalog.empty()) return catalog_ = opt_.catalog;
    if (!opt_.config.empty()) {
      const json c = ParseJsonFile(opt_.config);
      const std::string rel = c.value("scenario", json::object()).value("catalog", "");
      if (!rel.empty()) return catalog_ = (fs::path(opt_.config).parent_path() / rel).string();
    }
    Throw(FEINT_E_CONFIG, "no catalog: pass --catalog or set scenario.catalog in the config");
  }

  void Write(const std::string& name, const std::string& content) {
    fs::create_directories(opt_.out_dir);
    const fs::path path = fs::path(opt_.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) Throw(FEINT_E_IO, "cannot write '" + path.string() + "'");
    artifacts_.push_back(name);
  }

  void WriteManifest() {
    json artifacts = json::array();
    for (const std::string& a : artifacts_) {
      artifacts.push_back(
          {{"path", a}, {"bytes", fs::file_size(fs::path(opt_.out_dir) / a)}});
    }
    const json m{{"subcommand", subcommand_},
                 {"config", opt_.config},
                 {"catalog", catalog_},
                 {"seed", opt_.seed},
                 {"out_dir", opt_.out_dir},
                 {"build", std::string(feint_version()) + "+" + FEINT_BUILD_ID},
                 {"started_at", started_},
                 {"finished_at", Timestamp()},
                 {"artifacts", artifacts}};
    fs::create_directories(opt_.out_dir);
    std::ofstream(fs::path(opt_.out_dir) / "manifest.json") << m.dump(1) << "\n";
  }

  void WriteError(const CliError& e) {
    const json rec{{"subcommand", subcommand_},
                   {"status", e.status},
                   {"error", feint_status_name(e.status)},
                   {"message", e.message}};
    std::cerr << rec.dump() << "\n";
    std::error_code ec;
    fs::create_directories(opt_.out_dir, ec);
    if (!ec) std::ofstream(fs::path(opt_.out_dir) / "error.json") << rec.dump(1) << "\n";
  }

 private:
  std::string subcommand_;
  const Options& opt_;
  std::string started_;
  std::string catalog_;
  std::vector<std::string> artifacts_;
};

void Templates(Run& run) {
  Catalog cat(run.CatalogPath());
  CString out;
  Check(feint_templates(cat.get(), run.opt().predicate.c_str(), out.out()));
  const json j = json::parse(out.str());
  run.Write("templates.json", j.dump(1) + "\n");
  const json summary{{"predicate", j["predicate"]},
                     {"count", j["count"]},
                     {"count_by_pair", j["count_by_pair"]}};
  run.Write("template_summary.json", summary.dump(1) + "\n");
  std::cout << "templates: " << j["count"].get<long>() << "\n";
}

void Compose(Run& run) {
  if (run.opt().a_t.empty() || run.opt().a_target.empty()) {
    Throw(FEINT_E_INVALID_ARGUMENT, "compose needs --a-t and --a-target");
  }
  Catalog cat(run.CatalogPath());
  CString out;
  Check(feint_compose(cat.get(), run.opt().predicate.c_str(), run.opt().a_t.c_str(),
                      run.opt().a_target.c_str(), out.out()));
  const json j = json::parse(out.str());
  run.Write("dbms.json", j.dump(1) + "\n");
  std::cout << "dbms: " << j["dbms"].size() << "\n";
}

void Simulate(Run& run) {
  Catalog cat(run.CatalogPath());
  const std::string config = run.Config().dump();
  std::string script;
  if (!run.opt().script.empty()) script = ReadFile(run.opt().script);
  CString out;
  Check(feint_simulate(cat.get(), config.c_str(), script.empty() ? nullptr : script.c_str(),
                       run.opt().episodes.value_or(1), run.opt().seed, out.out()));
  run.Write("events.jsonl", out.str());
}

void Train(Run& run) {
  Catalog cat(run.CatalogPath());
  const json config = run.Config();
  const long episodes = config.value("episodes", 100L);
  const int chunks = std::max(1, run.opt().snapshots);
  feint_trainer* raw = nullptr;
  Check(feint_trainer_create(cat.get(), config.dump().c_str(), &raw));
  std::unique_ptr<feint_trainer, void (*)(feint_trainer*)> trainer(raw, feint_trainer_free);
  const int agents = config["scenario"]["agent_count"].get<int>();
  std::vector<json> pools(agents, json::array());
  std::string csv;
  long done = 0;
  for (int c = 1; c <= chunks; ++c) {
    const long target = episodes * c / chunks;
    CString rows;
    Check(feint_trainer_train(trainer.get(), target - done, rows.out()));
    csv += rows.str();
    done = target;
    for (int a = 0; a < agents; ++a) {
      const std::string id = "seed" + std::to_string(run.opt().seed) + "/agent" +
                             std::to_string(a) + "/ep" + std::to_string(done);
      CString snap;
      Check(feint_trainer_snapshot(trainer.get(), a, id.c_str(), snap.out()));
      pools[a].push_back(json::parse(snap.str()));
    }
  }
  run.Write("training_log.csv", csv);
  CString counters;
  Check(feint_trainer_counters(trainer.get(), counters.out()));
  run.Write("counters.json", json::parse(counters.str()).dump(1) + "\n");
  json policies = json::object();
  for (int a = 0; a < agents; ++a) policies["agent" + std::to_string(a)] = pools[a];
  run.Write("snapshots.json", policies.dump() + "\n");
  // Agent 0's checkpoints and its opponents' checkpoints, ready for evaluate.
  json opponents = json::array();
  const int team0 = config["scenario"]["teams"][0].get<int>();
  for (int a = 0; a < agents; ++a) {
    if (config["scenario"]["teams"][a].get<int>() == team0) continue;
    for (const json& p : pools[a]) opponents.push_back(p);
  }
  run.Write("pool.json", json{{"policies", pools[0]}}.dump() + "\n");
  run.Write("opponents.json", json{{"policies", opponents}}.dump() + "\n");
}

void Evaluate(Run& run) {
  if (run.opt().pool.empty() || run.opt().opponents.empty()) {
    Throw(FEINT_E_INVALID_ARGUMENT, "evaluate needs --pool and --opponents");
  }
  Catalog cat(run.CatalogPath());
  const std::string config = run.Config().dump();
  const std::string pool = ReadFile(run.opt().pool);
  const std::string opponents = ReadFile(run.opt().opponents);
  CString out;
  Check(feint_evaluate(cat.get(), config.c_str(), pool.c_str(), opponents.c_str(),
                       run.opt().episodes.value_or(4), run.opt().seed, out.out()));
  json j = json::parse(out.str());
  run.Write("payoffs.csv", j["payoff_csv"].get<std::string>());
  j.erase("payoff_csv");
  run.Write("evaluation.json", j.dump(1) + "\n");
  std::cout << "exploitability " << j["exploitability"] << " population_efficacy "
            << j["population_efficacy"] << "\n";
}

void BenchOverhead(Run& run) {
  Catalog cat(run.CatalogPath());
  const std::string config = run.Config().dump();
  CString out;
  Check(feint_bench_overhead(cat.get(), config.c_str(), run.opt().episodes.value_or(1000),
                             run.opt().seed, out.out()));
  const json j = json::parse(out.str());
  run.Write("overhead.json", j.dump(1) + "\n");
  std::cout << "overhead_ratio " << j["overhead_ratio"] << " inference_violations "
            << j["inference_violations"] << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feint behavior formalization: templates, composition, simulation, "
               "training and evaluation"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Experiment config (JSON)");
    sub->add_option("--catalog", opt.catalog, "Behavior catalog (JSON)");
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--out-dir", opt.out_dir, "Directory for all outputs");
    sub->add_option("--episodes", opt.episodes, "Episode count");
    sub->add_option("--feint-agents", opt.feint_agents, "Comma-separated feint agent ids");
    sub->add_option("--learner", opt.learner, "Regular-policy learner");
    sub->add_option("--f-divergence", opt.divergence, "kl, tv or hellinger")
        ->check(CLI::IsMember({"kl", "tv", "hellinger"}));
    return sub;
  };

  struct Entry {
    CLI::App* app;
    void (*fn)(Run&);
  };
  std::vector<Entry> entries;
  auto* templates = common(app.add_subcommand("templates", "Precompute feint templates"));
  templates->add_option("--predicate", opt.predicate, "identity or similar_state");
  entries.push_back({templates, Templates});
  auto* compose = common(app.add_subcommand("compose", "Compose Dual-Behavior Models"));
  compose->add_option("--predicate", opt.predicate, "identity or similar_state");
  compose->add_option("--a-t", opt.a_t, "Current action id");
  compose->add_option("--a-target", opt.a_target, "Target action id");
  entries.push_back({compose, Compose});
  auto* simulate = common(app.add_subcommand("simulate", "Run episodes and log events"));
  simulate->add_option("--script", opt.script, "Scripted commands (JSON)");
  entries.push_back({simulate, Simulate});
  auto* train = common(app.add_subcommand("train", "Train policies"));
  train->add_option("--snapshots", opt.snapshots, "Policy checkpoints per run");
  entries.push_back({train, Train});
  auto* evaluate = common(app.add_subcommand("evaluate", "Exploitability, PE, diversity"));
  evaluate->add_option("--pool", opt.pool, "Policy pool (JSON)");
  evaluate->add_option("--opponents", opt.opponents, "Opponent pool (JSON)");
  entries.push_back({evaluate, Evaluate});
  entries.push_back({common(app.add_subcommand("bench-overhead", "Time feint on vs off")),
                     BenchOverhead});

  CLI11_PARSE(app, argc, argv);

  for (const Entry& e : entries) {
    if (!e.app->parsed()) continue;
    Run run(e.app->get_name(), opt);
    try {
      e.fn(run);
      run.WriteManifest();
      return 0;
    } catch (const CliError& err) {
      run.WriteError(err);
      return err.status;
    } catch (const std::exception& ex) {
      const CliError err{FEINT_E_INTERNAL, ex.what()};
      run.WriteError(err);
      return err.status;
    }
  }
  return FEINT_E_INVALID_ARGUMENT;
}
