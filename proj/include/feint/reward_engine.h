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

#ifndef FEINT_REWARD_ENGINE_H_
#define FEINT_REWARD_ENGINE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "feint/rng.h"
#include "json.hpp"

namespace feint {

// Step window of one feint cycle starting at t0:
//   feint steps   [t0, t0 + t_f]
//   attack steps  [t0 + t_f + 1, t0 + t_s]
//   long-term     [t0 + t_s + 1, horizon_end]
struct RewardWindow {
  long t0 = 0;
  long t_f = 0;
  long t_s = 0;
  long horizon_end = 0;  // T
};

struct WeightSchedule {
  std::vector<double> alpha_feint;   // length t_f + 1
  std::vector<double> alpha_attack;  // length t_s - t_f
  std::vector<double> beta;          // length T - t0 - t_s
  double lambda_short = 0.67;
  double lambda_long = 0.33;
  double mu1 = 0.5;
  double mu2 = 0.5;

  // Constant vectors sized to `window`.
  static WeightSchedule Uniform(const RewardWindow& window,
                                double alpha_feint = 0.1,
                                double alpha_attack = 1.0, double beta = 1.0);

  // Throws kWindowMismatch or kInvalidArgument if the schedule does not fit.
  void Validate(const RewardWindow& window) const;
};

// Per-step, per-agent reward samples R^i(s_t, a_t) starting at step t0.
struct Trajectory {
  long t0 = 0;
  std::vector<std::vector<double>> rewards;  // [t - t0][agent]

  long end() const { return t0 + static_cast<long>(rewards.size()); }
  // Throws kWindowMismatch when t lies outside the recorded steps.
  double Reward(long t, std::size_t agent) const;
  void Validate(std::size_t agent_count) const;
};

double RewShort(const Trajectory& traj, long t0, long t_f, long t_s,
                const WeightSchedule& w, std::size_t agent);
// Normalized by T itself, not by the window length.
double RewLong(const Trajectory& traj, long t0, long t_s, long horizon_end,
               const WeightSchedule& w, std::size_t agent);
double RewTemporal(const Trajectory& traj, const RewardWindow& window,
                   const WeightSchedule& w, std::size_t agent);

// Optional multiplicative adaptation of the short/long mixing weights:
// lambda_short <- clip(lambda_short * (1 + eta * sign(delta)), 0.1, 0.9),
// then lambda_long = 1 - lambda_short.
struct LambdaAdjuster {
  bool enabled = false;
  double eta = 0.01;
  bool has_previous = false;
  double previous = 0.0;

  void Update(WeightSchedule& w, double temporal_reward);
};

// Discretized (state, joint-action) key.
struct OccupancyKey {
  std::string state;
  std::string action;

  auto operator<=>(const OccupancyKey&) const = default;
};

class OccupancyMeasure {
 public:
  OccupancyMeasure() = default;
  static OccupancyMeasure FromCounts(const std::map<OccupancyKey, double>& counts);

  const std::map<OccupancyKey, double>& probs() const { return probs_; }
  double Prob(const OccupancyKey& key) const;
  bool Visits(std::string_view state) const;
  // Marginal over states.
  std::map<std::string, double> StateMarginal() const;
  // Action distribution conditioned on `state`; empty if never visited.
  std::map<std::string, double> ConditionalActions(std::string_view state) const;

 private:
  std::map<OccupancyKey, double> probs_;
};

// A Markov process observed as (state, joint-action) keys.
class RolloutModel {
 public:
  virtual ~RolloutModel() = default;
  virtual void Reset(Rng& rng) = 0;
  // Emits the key at the current step, then advances one step.
  virtual OccupancyKey Step(Rng& rng) = 0;
};

// Empirical distribution over `rollouts` episodes of `horizon` steps. Each
// rollout draws from its own stream derived from `seed`.
OccupancyMeasure EstimateOccupancy(RolloutModel& model, int horizon,
                                   int rollouts, std::uint64_t seed);

enum class FDivergence { kKl, kTotalVariation, kHellinger };

std::string_view FDivergenceName(FDivergence f);
FDivergence FDivergenceFromName(std::string_view name);

inline constexpr double kDivergenceSmoothing = 1e-6;

// D_f(p || q) over aligned non-negative vectors. Both sides receive additive
// smoothing and are renormalized first. Hellinger is the squared distance.
double Divergence(std::span<const double> p, std::span<const double> q,
                  FDivergence f, double smoothing = kDivergenceSmoothing);

// Divergence between the conditional action distributions of the two
// measures at `state`. Throws kUnsupportedState if neither visits it.
double RewSpatial(const OccupancyMeasure& rho_new, const OccupancyMeasure& rho_old,
                  std::string_view state, FDivergence f = FDivergence::kKl);

struct RewardBreakdown {
  double rew_short = 0.0;
  double rew_long = 0.0;
  double rew_temporal = 0.0;
  double rew_spatial_sum = 0.0;
  double rew_collective = 0.0;
};

// mu1 * sum of temporal rewards over `agents` (reward columns of `traj`)
// + mu2 * sum of spatial rewards over the visited `states` s_0 .. s_T.
// The short/long/temporal fields of the result refer to agents.front().
RewardBreakdown RewCollective(const Trajectory& traj, const RewardWindow& window,
                              const WeightSchedule& w,
                              std::span<const std::size_t> agents,
                              const OccupancyMeasure& rho_new,
                              const OccupancyMeasure& rho_old,
                              std::span<const std::string> states,
                              FDivergence f = FDivergence::kKl);

nlohmann::json WeightScheduleToJson(const WeightSchedule& w);

}  // namespace feint

#endif  // FEINT_REWARD_ENGINE_H_
