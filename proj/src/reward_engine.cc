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

#include "feint/reward_engine.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "feint/error.h"

namespace feint {

namespace {

void CheckLength(const std::vector<double>& v, long expected, const char* name) {
  if (expected < 0 || v.size() != static_cast<std::size_t>(expected)) {
    Fail(ErrorCode::kWindowMismatch,
         std::string(name) + " has " + std::to_string(v.size()) +
             " weights, window needs " + std::to_string(expected));
  }
}

void CheckNonNegative(const std::vector<double>& v, const char* name) {
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      Fail(ErrorCode::kInvalidArgument, std::string(name) + " weights must be >= 0");
    }
  }
}

void CheckShortWindow(long t_f, long t_s, const WeightSchedule& w) {
  if (t_f < 0 || t_s <= t_f) {
    Fail(ErrorCode::kWindowMismatch, "short-term window requires 0 <= t_f < t_s");
  }
  CheckLength(w.alpha_feint, t_f + 1, "alpha_feint");
  CheckLength(w.alpha_attack, t_s - t_f, "alpha_attack");
}

void CheckLongWindow(long t0, long t_s, long horizon_end, const WeightSchedule& w) {
  if (horizon_end <= 0 || horizon_end < t0 + t_s) {
    Fail(ErrorCode::kWindowMismatch, "long-term window requires T >= t0 + t_s and T > 0");
  }
  CheckLength(w.beta, horizon_end - t0 - t_s, "beta");
}

}  // namespace

WeightSchedule WeightSchedule::Uniform(const RewardWindow& window,
                                       double alpha_feint, double alpha_attack,
                                       double beta) {
  WeightSchedule w;
  w.alpha_feint.assign(std::max<long>(window.t_f + 1, 0), alpha_feint);
  w.alpha_attack.assign(std::max<long>(window.t_s - window.t_f, 0), alpha_attack);
  w.beta.assign(std::max<long>(window.horizon_end - window.t0 - window.t_s, 0), beta);
  return w;
}

void WeightSchedule::Validate(const RewardWindow& window) const {
  CheckShortWindow(window.t_f, window.t_s, *this);
  CheckLongWindow(window.t0, window.t_s, window.horizon_end, *this);
  CheckNonNegative(alpha_feint, "alpha_feint");
  CheckNonNegative(alpha_attack, "alpha_attack");
  CheckNonNegative(beta, "beta");
  if (lambda_short < 0.0 || lambda_long < 0.0 ||
      std::abs(lambda_short + lambda_long - 1.0) > 1e-12) {
    Fail(ErrorCode::kInvalidArgument, "lambda weights must be >= 0 and sum to 1");
  }
  if (mu1 < 0.0 || mu2 < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "mu weights must be >= 0");
  }
}

double Trajectory::Reward(long t, std::size_t agent) const {
  if (t < t0 || t >= end()) {
    Fail(ErrorCode::kWindowMismatch,
         "step " + std::to_string(t) + " outside trajectory [" +
             std::to_string(t0) + ", " + std::to_string(end()) + ")");
  }
  const std::vector<double>& row = rewards[static_cast<std::size_t>(t - t0)];
  if (agent >= row.size()) {
    Fail(ErrorCode::kWindowMismatch, "agent " + std::to_string(agent) + " out of range");
  }
  return row[agent];
}

void Trajectory::Validate(std::size_t agent_count) const {
  for (const auto& row : rewards) {
    if (row.size() != agent_count) {
      Fail(ErrorCode::kWindowMismatch, "trajectory row width != agent count");
    }
  }
}

double RewShort(const Trajectory& traj, long t0, long t_f, long t_s,
                const WeightSchedule& w, std::size_t agent) {
  CheckShortWindow(t_f, t_s, w);
  double total = 0.0;
  for (long t = t0; t <= t0 + t_f; ++t) {
    total += w.alpha_feint[t - t0] * traj.Reward(t, agent);
  }
  for (long t = t0 + t_f + 1; t <= t0 + t_s; ++t) {
    total += w.alpha_attack[t - t0 - t_f - 1] * traj.Reward(t, agent);
  }
  return total;
}

double RewLong(const Trajectory& traj, long t0, long t_s, long horizon_end,
               const WeightSchedule& w, std::size_t agent) {
  CheckLongWindow(t0, t_s, horizon_end, w);
  double total = 0.0;
  for (long t = t0 + t_s + 1; t <= horizon_end; ++t) {
    total += w.beta[t - t0 - t_s - 1] * traj.Reward(t, agent);
  }
  return total / static_cast<double>(horizon_end);
}

double RewTemporal(const Trajectory& traj, const RewardWindow& window,
                   const WeightSchedule& w, std::size_t agent) {
  return w.lambda_short *
             RewShort(traj, window.t0, window.t_f, window.t_s, w, agent) +
         w.lambda_long *
             RewLong(traj, window.t0, window.t_s, window.horizon_end, w, agent);
}

void LambdaAdjuster::Update(WeightSchedule& w, double temporal_reward) {
  if (!enabled) return;
  if (has_previous) {
    const double delta = temporal_reward - previous;
    const double sign = delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0);
    w.lambda_short = std::clamp(w.lambda_short * (1.0 + eta * sign), 0.1, 0.9);
    w.lambda_long = 1.0 - w.lambda_short;
  }
  has_previous = true;
  previous = temporal_reward;
}

// ---------------------------------------------------------------------------
// Occupancy measures.

OccupancyMeasure OccupancyMeasure::FromCounts(
    const std::map<OccupancyKey, double>& counts) {
  OccupancyMeasure m;
  double total = 0.0;
  for (const auto& [_, c] : counts) total += c;
  if (total <= 0.0) return m;
  for (const auto& [key, c] : counts) {
    if (c > 0.0) m.probs_[key] = c / total;
  }
  return m;
}

double OccupancyMeasure::Prob(const OccupancyKey& key) const {
  auto it = probs_.find(key);
  return it == probs_.end() ? 0.0 : it->second;
}

bool OccupancyMeasure::Visits(std::string_view state) const {
  auto it = probs_.lower_bound(OccupancyKey{std::string(state), ""});
  return it != probs_.end() && it->first.state == state;
}

std::map<std::string, double> OccupancyMeasure::StateMarginal() const {
  std::map<std::string, double> out;
  for (const auto& [key, p] : probs_) out[key.state] += p;
  return out;
}

std::map<std::string, double> OccupancyMeasure::ConditionalActions(
    std::string_view state) const {
  std::map<std::string, double> out;
  double mass = 0.0;
  for (auto it = probs_.lower_bound(OccupancyKey{std::string(state), ""});
       it != probs_.end() && it->first.state == state; ++it) {
    out[it->first.action] += it->second;
    mass += it->second;
  }
  for (auto& [_, p] : out) p /= mass;
  return out;
}

OccupancyMeasure EstimateOccupancy(RolloutModel& model, int horizon, int rollouts,
                                   std::uint64_t seed) {
  if (horizon < 1 || rollouts < 1) {
    Fail(ErrorCode::kInvalidArgument, "horizon and rollouts must be >= 1");
  }
  std::map<OccupancyKey, double> counts;
  for (int r = 0; r < rollouts; ++r) {
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(r)));
    model.Reset(rng);
    for (int t = 0; t < horizon; ++t) counts[model.Step(rng)] += 1.0;
  }
  return OccupancyMeasure::FromCounts(counts);
}

std::string_view FDivergenceName(FDivergence f) {
  switch (f) {
    case FDivergence::kKl: return "kl";
    case FDivergence::kTotalVariation: return "tv";
    case FDivergence::kHellinger: return "hellinger";
  }
  return "kl";
}

FDivergence FDivergenceFromName(std::string_view name) {
  if (name == "kl") return FDivergence::kKl;
  if (name == "tv") return FDivergence::kTotalVariation;
  if (name == "hellinger") return FDivergence::kHellinger;
  Fail(ErrorCode::kInvalidArgument, "unknown f-divergence '" + std::string(name) + "'");
}

double Divergence(std::span<const double> p, std::span<const double> q,
                  FDivergence f, double smoothing) {
  if (p.size() != q.size()) {
    Fail(ErrorCode::kDimension, "divergence over vectors of different length");
  }
  if (p.empty()) return 0.0;
  auto normalize = [smoothing](std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    double total = 0.0;
    for (double& x : out) {
      x = std::max(x, 0.0) + smoothing;
      total += x;
    }
    for (double& x : out) x /= total;
    return out;
  };
  const std::vector<double> ps = normalize(p);
  const std::vector<double> qs = normalize(q);
  double d = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    switch (f) {
      case FDivergence::kKl:
        d += ps[k] * std::log(ps[k] / qs[k]);
        break;
      case FDivergence::kTotalVariation:
        d += 0.5 * std::abs(ps[k] - qs[k]);
        break;
      case FDivergence::kHellinger: {
        const double r = std::sqrt(ps[k]) - std::sqrt(qs[k]);
        d += 0.5 * r * r;
        break;
      }
    }
  }
  return std::max(d, 0.0);
}

double RewSpatial(const OccupancyMeasure& rho_new, const OccupancyMeasure& rho_old,
                  std::string_view state, FDivergence f) {
  const auto p_new = rho_new.ConditionalActions(state);
  const auto p_old = rho_old.ConditionalActions(state);
  if (p_new.empty() && p_old.empty()) {
    Fail(ErrorCode::kUnsupportedState,
         "state '" + std::string(state) + "' unvisited by both measures");
  }
  std::set<std::string> support;
  for (const auto& [a, _] : p_new) support.insert(a);
  for (const auto& [a, _] : p_old) support.insert(a);
  std::vector<double> p, q;
  for (const std::string& a : support) {
    auto in = p_new.find(a);
    auto io = p_old.find(a);
    p.push_back(in == p_new.end() ? 0.0 : in->second);
    q.push_back(io == p_old.end() ? 0.0 : io->second);
  }
  return Divergence(p, q, f);
}

RewardBreakdown RewCollective(const Trajectory& traj, const RewardWindow& window,
                              const WeightSchedule& w,
                              std::span<const std::size_t> agents,
                              const OccupancyMeasure& rho_new,
                              const OccupancyMeasure& rho_old,
                              std::span<const std::string> states, FDivergence f) {
  RewardBreakdown out;
  double temporal_sum = 0.0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const double temporal = RewTemporal(traj, window, w, agents[i]);
    temporal_sum += temporal;
    if (i == 0) {
      out.rew_short = RewShort(traj, window.t0, window.t_f, window.t_s, w, agents[i]);
      out.rew_long =
          RewLong(traj, window.t0, window.t_s, window.horizon_end, w, agents[i]);
      out.rew_temporal = temporal;
    }
  }
  for (const std::string& s : states) {
    out.rew_spatial_sum += RewSpatial(rho_new, rho_old, s, f);
  }
  out.rew_collective = w.mu1 * temporal_sum + w.mu2 * out.rew_spatial_sum;
  return out;
}

nlohmann::json WeightScheduleToJson(const WeightSchedule& w) {
  return nlohmann::json{{"alpha_feint", w.alpha_feint},
                        {"alpha_attack", w.alpha_attack},
                        {"beta", w.beta},
                        {"lambda_short", w.lambda_short},
                        {"lambda_long", w.lambda_long},
                        {"mu1", w.mu1},
                        {"mu2", w.mu2}};
}

}  // namespace feint
