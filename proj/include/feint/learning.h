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

#ifndef FEINT_LEARNING_H_
#define FEINT_LEARNING_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "feint/catalog.h"
#include "feint/dual_behavior.h"
#include "feint/feint_generator.h"
#include "feint/game_env.h"
#include "feint/reward_engine.h"
#include "feint/rng.h"
#include "json.hpp"

namespace feint {

// Policy features of `agent` against its nearest opponent: bias, distance,
// mutual strike-zone flags and the opponent's visible step (busy, extending
// per direction, striking, defending per direction, retracting, knocked
// down).
inline constexpr int kFeatureCount = 14;
std::vector<double> PolicyFeatures(const Env& env, const GameState& state,
                                   int agent);

// Discrete command choices of the regular policy: Idle, the four moves, then
// starting each catalog behavior in catalog order.
class CommandMenu {
 public:
  explicit CommandMenu(const Catalog& catalog);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_.at(index); }
  AgentCommand Command(int index) const;
  // Menu index of "start behavior `id`", or -1.
  int IndexOfBehavior(std::string_view id) const;
  // Idle and moves are always feasible; a behavior is feasible when its first
  // action starts within epsilon of the agent's pose.
  std::vector<bool> Mask(const Env& env, const GameState& state, int agent) const;

 private:
  static constexpr int kFixed = 5;
  std::vector<std::string> names_;
  std::vector<std::shared_ptr<const PlanScript>> plans_;
};

// One regular-policy decision and its discounted return.
struct DecisionRecord {
  std::vector<double> features;
  std::vector<bool> mask;
  int action = 0;
  long step = 0;
  double ret = 0.0;
};

// Pluggable learner for the regular policy.
class PolicyLearner {
 public:
  virtual ~PolicyLearner() = default;
  virtual std::string name() const = 0;
  virtual int num_actions() const = 0;
  // Distribution over the menu; masked entries get probability 0.
  virtual std::vector<double> Probabilities(std::span<const double> features,
                                            const std::vector<bool>& mask) const = 0;
  virtual void UpdateEpisode(std::span<const DecisionRecord> decisions) = 0;
  virtual std::unique_ptr<PolicyLearner> Clone() const = 0;
  virtual nlohmann::json ToJson() const = 0;
};

// Linear softmax actor with a linear state-value baseline.
class SoftmaxActorCritic : public PolicyLearner {
 public:
  SoftmaxActorCritic(int num_actions, int num_features, double actor_lr,
                     double critic_lr);

  std::string name() const override { return "actor-critic"; }
  int num_actions() const override { return num_actions_; }
  std::vector<double> Probabilities(std::span<const double> features,
                                    const std::vector<bool>& mask) const override;
  void UpdateEpisode(std::span<const DecisionRecord> decisions) override;
  std::unique_ptr<PolicyLearner> Clone() const override;
  nlohmann::json ToJson() const override;
  static SoftmaxActorCritic FromJson(const nlohmann::json& j);

  double Value(std::span<const double> features) const;
  // d log pi(action | features) / d theta, flattened row-major [action][feature].
  std::vector<double> LogProbGradient(std::span<const double> features,
                                      const std::vector<bool>& mask,
                                      int action) const;
  std::vector<double>& theta() { return theta_; }
  const std::vector<double>& theta() const { return theta_; }

 private:
  int num_actions_;
  int num_features_;
  double actor_lr_;
  double critic_lr_;
  std::vector<double> theta_;
  std::vector<double> value_;
};

std::unique_ptr<PolicyLearner> MakeLearner(std::string_view name, int num_actions,
                                           double actor_lr, double critic_lr);

// Tabular softmax over DBM ids with a running reward baseline.
class FeintPolicy {
 public:
  explicit FeintPolicy(double lr = 0.1, double baseline_rate = 0.1)
      : lr_(lr), baseline_rate_(baseline_rate) {}

  std::vector<double> Probabilities(std::span<const std::string> candidates) const;
  std::size_t Sample(std::span<const std::string> candidates, Rng& rng) const;
  void Update(std::span<const std::string> candidates, const std::string& chosen,
              double reward);

  const std::map<std::string, double>& logits() const { return logits_; }
  double baseline() const { return baseline_; }
  long updates() const { return updates_; }
  nlohmann::json ToJson() const;
  static FeintPolicy FromJson(const nlohmann::json& j);

 private:
  double lr_;
  double baseline_rate_;
  double baseline_ = 0.0;
  long updates_ = 0;
  std::map<std::string, double> logits_;
};

struct HarnessConfig {
  std::string learner = "actor-critic";
  double actor_lr = 0.05;
  double critic_lr = 0.05;
  double feint_lr = 0.1;
  double gamma = 0.9;
  double delta_near_scale = 2.0;  // in units of epsilon_state
  double p_low = 0.2;
  int imaginary_extra_steps = 8;
  int obs_bins = 8;
  FDivergence divergence = FDivergence::kKl;
  CommonActionPredicate predicate = CommonActionPredicate::kIdentity;
  double alpha_feint = 0.1;
  double alpha_attack = 1.0;
  double beta = 1.0;
  double lambda_short = 0.67;
  double lambda_long = 0.33;
  double mu1 = 0.5;
  double mu2 = 0.5;
  LambdaAdjuster lambda_adjuster;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  HarnessConfig harness;
  int episodes = 100;
  std::vector<int> feint_agents;
  std::uint64_t seed = 0;
};

// Parses {"scenario": ..., "weights": ..., "harness": ..., "episodes",
// "feint_agents", "seed"}. Unknown fields are rejected.
ExperimentConfig ExperimentFromJson(const nlohmann::json& j);
nlohmann::json ExperimentToJson(const ExperimentConfig& c);
// Hex FNV-1a digest of the canonical JSON form.
std::string ConfigHash(const ExperimentConfig& c);

struct ImaginaryDecision {
  bool activated = false;
  std::optional<std::string> a_target;
  std::vector<std::string> candidate_dbms;
  std::optional<std::string> chosen;
  double feint_value = 0.0;
  double baseline_value = 0.0;
  RewardBreakdown feint_breakdown;
  long step = 0;
  int agent = -1;
};

struct EpisodeRecord {
  long episode = 0;
  std::vector<double> rewards;      // real game reward per agent
  std::vector<double> net_rewards;  // rewards minus hits received
  RewardBreakdown breakdown;    // summed over committed decisions
  long activations = 0;
  long dbm_success = 0;
  long dbm_failure = 0;
  double wall_seconds = 0.0;
};

struct TrainingLog {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::string> agent_names;
  std::vector<EpisodeRecord> rows;

  // Wall time is left out so identical runs give identical files.
  std::string ToCsv(bool header = true) const;
};

struct HarnessCounters {
  long steps = 0;
  long regular_inferences = 0;
  long feint_inferences = 0;
  long inference_violations = 0;
  long imaginary_rollouts = 0;
  long activations = 0;
  long commits = 0;
  long feint_started = 0;
  long commit_rule_violations = 0;
  long completed_dbms = 0;
  long feint_updates = 0;
  long regular_updates = 0;
  long episodes = 0;
};

struct AgentPolicies {
  std::shared_ptr<PolicyLearner> regular;
  FeintPolicy feint;
  bool feint_enabled = false;
};

// Policies of one agent frozen for evaluation.
struct PolicySnapshot {
  std::string id;
  std::shared_ptr<const PolicyLearner> regular;
  FeintPolicy feint;
  bool feint_enabled = false;
};

class Trainer {
 public:
  Trainer(ExperimentConfig config, std::shared_ptr<const Catalog> catalog);

  const ExperimentConfig& config() const { return config_; }
  const Env& env() const { return env_; }
  const CommandMenu& menu() const { return menu_; }
  const TemplateSet& templates() const { return templates_; }
  const HarnessCounters& counters() const { return counters_; }
  AgentPolicies& policies(int agent) { return policies_.at(agent); }
  const std::vector<ImaginaryDecision>& committed() const { return committed_; }

  // Activation test: no DBM in progress, a DBM start within delta_near of the
  // current pose, and a low regular probability of the target's behavior.
  // The best activated target by reward value is returned.
  ImaginaryDecision ShouldActivate(const GameState& state, int agent) const;

  // Candidate DBMs for a target, from a_t actions startable at the agent's pose.
  std::vector<DualBehaviorModel> CandidateDbms(const GameState& state, int agent,
                                               const std::string& a_target) const;

  // Plays `plan` (or the regular policy when null) for agent `agent` on a copy
  // of `state` for window.horizon_end + 1 steps with frozen regular policies
  // for everyone else. Fills the agent's net-reward trajectory and its
  // occupancy counts.
  struct Rollout {
    Trajectory trajectory;
    std::map<OccupancyKey, double> counts;
    std::vector<std::string> states;
  };
  Rollout ImaginaryRollout(const GameState& state, int agent,
                           std::shared_ptr<const PlanScript> plan, long steps,
                           std::uint64_t seed) const;

  // Activation, feint choice and the feint/baseline comparison.
  ImaginaryDecision ImaginaryPlay(const GameState& state, int agent, Rng& rng);

  // One episode; learning applies both update schedules.
  EpisodeRecord RunEpisode(long episode, bool learn,
                           std::vector<nlohmann::json>* events = nullptr);
  // Runs `episodes` more episodes (the configured count when negative),
  // continuing the episode numbering of earlier calls.
  TrainingLog Train(long episodes = -1);
  long next_episode() const { return next_episode_; }

  PolicySnapshot Snapshot(int agent, std::string id) const;
  void LoadSnapshot(int agent, const PolicySnapshot& snap);

 private:
  AgentCommand ChooseCommand(GameState& state, int agent, Rng& rng,
                             std::vector<DecisionRecord>& decisions,
                             std::vector<int>& consulted);
  std::string OccupancyState(const GameState& state, int agent) const;

  ExperimentConfig config_;
  std::shared_ptr<const Catalog> catalog_;
  Env env_;
  CommandMenu menu_;
  TemplateSet templates_;
  std::vector<AgentPolicies> policies_;
  HarnessCounters counters_;
  std::vector<ImaginaryDecision> committed_;
  // Pending feint commitment per agent: candidate set and chosen id.
  struct Pending {
    std::vector<std::string> candidates;
    std::string chosen;
    double net_reward = 0.0;
    bool running = false;
  };
  std::vector<Pending> pending_;
  std::map<std::string, std::shared_ptr<const PlanScript>> dbm_plans_;
  mutable std::map<std::pair<std::string, std::string>,
                   std::vector<DualBehaviorModel>>
      dbm_cache_;
  EpisodeRecord* current_record_ = nullptr;
  long next_episode_ = 0;
};

// Net reward (own hits minus hits received) of each agent for one step.
std::vector<double> NetRewards(const StepOutcome& outcome, std::size_t agents);

nlohmann::json SnapshotToJson(const PolicySnapshot& snap);
PolicySnapshot SnapshotFromJson(const nlohmann::json& j);

// Mean net reward of `row` playing agent 0 against `col` playing every
// opponent seat, over `episodes` evaluation episodes.
double EvaluatePair(const ExperimentConfig& config,
                    std::shared_ptr<const Catalog> catalog,
                    const PolicySnapshot& row, const PolicySnapshot& col,
                    int episodes, std::uint64_t seed);

}  // namespace feint

#endif  // FEINT_LEARNING_H_
