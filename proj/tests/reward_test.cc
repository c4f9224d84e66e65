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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "feint/error.h"
#include "feint/reward_engine.h"
#include "oracles.h"

namespace feint {
namespace {

double RelErr(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

Trajectory Constant(long steps, double value, int agents = 1) {
  Trajectory t;
  t.rewards.assign(steps, std::vector<double>(agents, value));
  return t;
}

TEST_CASE("worked fixtures") {
  // t0 = 0, t_f = 1, t_s = 3, T = 8.
  const RewardWindow window{0, 1, 3, 8};
  WeightSchedule w = WeightSchedule::Uniform(window, 0.1, 1.0, 1.0);
  CHECK(RelErr(RewShort(Constant(9, 1.0), 0, 1, 3, w, 0), 2.2) < 1e-12);
  CHECK(RelErr(RewLong(Constant(9, 2.0), 0, 3, 8, w, 0), 1.25) < 1e-12);

  // Rewards are 1 through t_s and 2 afterwards, so both fixtures apply at once.
  Trajectory mixed = Constant(9, 1.0);
  for (long t = 4; t <= 8; ++t) mixed.rewards[t][0] = 2.0;
  CHECK(w.lambda_short == 0.67);
  CHECK(w.lambda_long == 0.33);
  CHECK(RelErr(RewTemporal(mixed, window, w, 0), 1.8865) < 1e-12);
}

TEST_CASE("zero weights and lambda extremes") {
  const RewardWindow window{2, 2, 4, 12};
  const Trajectory traj = Constant(13, 3.0);
  WeightSchedule zero = WeightSchedule::Uniform(window, 0.0, 0.0, 0.0);
  CHECK(RewShort(traj, 2, 2, 4, zero, 0) == 0.0);
  CHECK(RewLong(traj, 2, 4, 12, zero, 0) == 0.0);
  WeightSchedule w = WeightSchedule::Uniform(window);
  w.lambda_short = 1.0;
  w.lambda_long = 0.0;
  CHECK(RewTemporal(traj, window, w, 0) == RewShort(traj, 2, 2, 4, w, 0));
}

TEST_CASE("window errors") {
  const RewardWindow window{0, 1, 3, 8};
  const WeightSchedule w = WeightSchedule::Uniform(window);
  CHECK_THROWS_AS(RewLong(Constant(5, 1.0), 0, 3, 8, w, 0), Error);
  CHECK_THROWS_AS(RewShort(Constant(9, 1.0), 0, 2, 3, w, 0), Error);  // alpha sizes
  WeightSchedule bad = w;
  bad.beta.pop_back();
  CHECK_THROWS_AS(bad.Validate(window), Error);
  CHECK_THROWS_AS(WeightSchedule::Uniform(RewardWindow{0, 3, 2, 8}).Validate({0, 3, 2, 8}),
                  Error);
}

TEST_CASE("random windows match straight-line sums") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const long t0 = gen() % 5;
    const long t_f = gen() % 4;
    const long t_s = t_f + 1 + static_cast<long>(gen() % 5);
    const long horizon = t0 + t_s + static_cast<long>(gen() % 8);
    const int agents = 1 + static_cast<int>(gen() % 3);
    Trajectory traj;
    traj.rewards.assign(horizon + 1, std::vector<double>(agents));
    for (auto& row : traj.rewards) {
      for (double& x : row) x = u(gen);
    }
    const RewardWindow window{t0, t_f, t_s, horizon};
    WeightSchedule w = WeightSchedule::Uniform(window);
    for (double& a : w.alpha_feint) a = u(gen);
    for (double& a : w.alpha_attack) a = u(gen);
    for (double& b : w.beta) b = u(gen);
    w.lambda_short = u(gen) / 2.0;
    w.lambda_long = 1.0 - w.lambda_short;
    const int agent = static_cast<int>(gen() % agents);

    const double s = oracle::RewShort(traj.rewards, t0, t_f, t_s, w.alpha_feint, w.alpha_attack,
                                      agent);
    const double l = oracle::RewLong(traj.rewards, t0, t_s, horizon, w.beta, agent);
    CHECK(RelErr(RewShort(traj, t0, t_f, t_s, w, agent), s) < 1e-12);
    CHECK(RelErr(RewLong(traj, t0, t_s, horizon, w, agent) + 1.0, l + 1.0) < 1e-12);
    const double temporal = RewTemporal(traj, window, w, agent);
    CHECK(RelErr(temporal, w.lambda_short * s + w.lambda_long * l) < 1e-12);
    CHECK(temporal >= std::min(s, l) - 1e-12);
    CHECK(temporal <= std::max(s, l) + 1e-12);

    // Linearity in R.
    const double c = u(gen) + 0.5;
    Trajectory scaled = traj;
    for (auto& row : scaled.rewards) {
      for (double& x : row) x *= c;
    }
    CHECK(RelErr(RewShort(scaled, t0, t_f, t_s, w, agent), c * s) < 1e-12);
    CHECK(RelErr(RewLong(scaled, t0, t_s, horizon, w, agent) + 1.0, c * l + 1.0) < 1e-12);
  }
}

TEST_CASE("divergences") {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> q{0.25, 0.75};
  CHECK(Divergence(p, q, FDivergence::kKl) == doctest::Approx(0.1438).epsilon(1e-3));
  CHECK(Divergence(p, q, FDivergence::kTotalVariation) == doctest::Approx(0.25).epsilon(1e-5));
  for (FDivergence f : {FDivergence::kKl, FDivergence::kTotalVariation, FDivergence::kHellinger}) {
    CHECK(Divergence(p, p, f) == 0.0);
    const double disjoint = Divergence(std::vector<double>{1, 0}, std::vector<double>{0, 1}, f);
    CHECK(std::isfinite(disjoint));
    CHECK(disjoint > Divergence(p, q, f));
  }
  CHECK_THROWS_AS(Divergence(p, std::vector<double>{1.0}, FDivergence::kKl), Error);
  CHECK(FDivergenceFromName(FDivergenceName(FDivergence::kHellinger)) == FDivergence::kHellinger);
}

TEST_CASE("divergence non-negativity and identity") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(1 + gen() % 6), b(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      a[k] = u(gen);
      b[k] = u(gen);
    }
    for (FDivergence f : {FDivergence::kKl, FDivergence::kTotalVariation, FDivergence::kHellinger}) {
      CHECK(Divergence(a, b, f) >= 0.0);
      CHECK(Divergence(a, a, f) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("spatial reward") {
  std::map<OccupancyKey, double> counts_new{{{"s", "x"}, 1}, {{"s", "y"}, 1}, {{"t", "x"}, 2}};
  std::map<OccupancyKey, double> counts_old{{{"s", "x"}, 1}, {{"s", "y"}, 3}};
  const OccupancyMeasure rho_new = OccupancyMeasure::FromCounts(counts_new);
  const OccupancyMeasure rho_old = OccupancyMeasure::FromCounts(counts_old);
  CHECK(RewSpatial(rho_new, rho_new, "s") == 0.0);
  CHECK(RewSpatial(rho_new, rho_old, "s") == doctest::Approx(0.1438).epsilon(1e-3));
  // Unvisited on one side: that side smooths to uniform over the union support.
  CHECK(RewSpatial(rho_new, rho_old, "t") == 0.0);
  CHECK_THROWS_AS(RewSpatial(rho_new, rho_old, "u"), Error);
  CHECK(rho_new.Prob({"t", "x"}) == 0.5);
  CHECK(rho_new.StateMarginal().at("s") == 0.5);
}

TEST_CASE("collective reward") {
  // Two agents, t0 = 0, t_f = 0, t_s = 1, T = 2.
  Trajectory traj;
  traj.rewards = {{1.0, 0.0}, {2.0, 1.0}, {4.0, 2.0}};
  const RewardWindow window{0, 0, 1, 2};
  WeightSchedule w = WeightSchedule::Uniform(window, 0.5, 1.0, 1.0);
  const OccupancyMeasure rho_new =
      OccupancyMeasure::FromCounts({{{"s", "x"}, 1}, {{"s", "y"}, 1}, {{"t", "x"}, 1}});
  const OccupancyMeasure rho_old =
      OccupancyMeasure::FromCounts({{{"s", "x"}, 1}, {{"s", "y"}, 3}, {{"t", "x"}, 1}});
  const std::vector<std::size_t> agents{0, 1};
  const std::vector<std::string> states{"s", "t"};

  // Agent 0: short = 0.5 * 1 + 1 * 2 = 2.5, long = 4 / 2 = 2.
  // Agent 1: short = 0 + 1 = 1, long = 2 / 2 = 1.
  const double temporal0 = 0.67 * 2.5 + 0.33 * 2.0;
  const double temporal1 = 0.67 * 1.0 + 0.33 * 1.0;
  const double spatial = Divergence(std::vector<double>{0.5, 0.5},
                                    std::vector<double>{0.25, 0.75}, FDivergence::kKl);
  RewardBreakdown b = RewCollective(traj, window, w, agents, rho_new, rho_old, states);
  CHECK(b.rew_short == doctest::Approx(2.5));
  CHECK(b.rew_long == doctest::Approx(2.0));
  CHECK(b.rew_temporal == doctest::Approx(temporal0));
  CHECK(b.rew_spatial_sum == doctest::Approx(spatial));
  CHECK(b.rew_collective == doctest::Approx(0.5 * (temporal0 + temporal1) + 0.5 * spatial));

  w.mu2 = 0.0;
  b = RewCollective(traj, window, w, agents, rho_new, rho_old, states);
  CHECK(b.rew_collective == doctest::Approx(0.5 * (temporal0 + temporal1)));
  w.mu1 = 0.0;
  CHECK(RewCollective(traj, window, w, agents, rho_new, rho_old, states).rew_collective == 0.0);
}

TEST_CASE("lambda adjuster") {
  WeightSchedule w = WeightSchedule::Uniform(RewardWindow{0, 0, 1, 2});
  LambdaAdjuster off;
  off.Update(w, 1.0);
  off.Update(w, 2.0);
  CHECK(w.lambda_short == 0.67);
  LambdaAdjuster on;
  on.enabled = true;
  on.Update(w, 1.0);
  CHECK(w.lambda_short == 0.67);
  on.Update(w, 2.0);
  CHECK(w.lambda_short == doctest::Approx(0.67 * 1.01));
  CHECK(w.lambda_short + w.lambda_long == doctest::Approx(1.0));
  for (int k = 0; k < 1000; ++k) on.Update(w, 3.0 + k);
  CHECK(w.lambda_short == doctest::Approx(0.9));
}

TEST_CASE("occupancy: degenerate and alternating chains") {
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  oracle::MarkovChainModel single(one, Eigen::VectorXd::Ones(1));
  const OccupancyMeasure point = EstimateOccupancy(single, 5, 3, 1);
  CHECK(point.Prob({"s0", "a"}) == 1.0);

  Eigen::MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  Eigen::VectorXd start(2);
  start << 1, 0;
  oracle::MarkovChainModel alternator(flip, start);
  const auto marginal = EstimateOccupancy(alternator, 4, 1, 0).StateMarginal();
  CHECK(marginal.at("s0") == 0.5);
  CHECK(marginal.at("s1") == 0.5);
  CHECK_THROWS_AS(EstimateOccupancy(alternator, 0, 1, 0), Error);
}

TEST_CASE("occupancy: stochastic chain within 3 sigma, error shrinks with rollouts") {
  Eigen::MatrixXd p(3, 3);
  p << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.4, 0.4, 0.2;
  Eigen::VectorXd init(3);
  init << 1, 0, 0;
  const int horizon = 10;
  const Eigen::VectorXd exact = oracle::ChainOccupancy(p, init, horizon);
  oracle::MarkovChainModel chain(p, init);

  const int rollouts = 2000;
  const auto marginal = EstimateOccupancy(chain, horizon, rollouts, 42).StateMarginal();
  for (int s = 0; s < 3; ++s) {
    const double sigma = std::sqrt(exact[s] * (1.0 - exact[s]) / rollouts);
    CHECK(std::abs(marginal.at("s" + std::to_string(s)) - exact[s]) <= 3.0 * sigma);
  }

  auto mean_l1 = [&](int n) {
    double total = 0.0;
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
      const auto m = EstimateOccupancy(chain, horizon, n, 1000 + r).StateMarginal();
      for (int s = 0; s < 3; ++s) {
        auto it = m.find("s" + std::to_string(s));
        total += std::abs((it == m.end() ? 0.0 : it->second) - exact[s]);
      }
    }
    return total / reps;
  };
  const double ratio = mean_l1(100) / mean_l1(50);
  CHECK(ratio >= 0.25);
  CHECK(ratio <= 0.75);
}

}  // namespace
}  // namespace feint
