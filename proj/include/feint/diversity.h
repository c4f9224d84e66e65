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

#ifndef FEINT_DIVERSITY_H_
#define FEINT_DIVERSITY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace feint {

// Empirical payoffs of a row pool (size M) against a column pool (size N).
struct PayoffMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  Eigen::MatrixXd values;  // M x N

  void Validate() const;
  std::string ToCsv() const;
};

struct PolicyPool {
  std::vector<std::string> ids;

  void Validate() const;
};

// Payoff of row policy `row` against column policy `col` for one episode.
using PairEvaluator =
    std::function<double(std::size_t row, std::size_t col, std::uint64_t seed)>;

// Each cell averages `episodes` evaluations under cell-specific seeds, so the
// result depends only on `seed` and not on evaluation order.
PayoffMatrix BuildPayoffMatrix(const PolicyPool& rows, const PolicyPool& cols,
                               const PairEvaluator& evaluator, int episodes,
                               std::uint64_t seed);

// Distance from `a_new` to its orthogonal projection onto the row space of
// `a`. Residuals below 1e-9 * max(1, |a_new|) are reported as exactly 0.
double ResponseDiversity(std::span<const double> a_new, const PayoffMatrix& a);

// Finite n-player normal-form game; payoffs[player][joint] with the joint
// index in row-major order over num_actions.
struct NormalFormGame {
  std::vector<int> num_actions;
  std::vector<std::vector<double>> payoffs;

  static NormalFormGame TwoPlayer(const Eigen::MatrixXd& row_payoff,
                                  const Eigen::MatrixXd& col_payoff);
  static NormalFormGame ZeroSum(const Eigen::MatrixXd& row_payoff);

  int num_players() const { return static_cast<int>(num_actions.size()); }
  void Validate() const;
};

using MixedProfile = std::vector<std::vector<double>>;

double ExpectedPayoff(const NormalFormGame& game, const MixedProfile& profile,
                      int player);

// Sum over players of (best pure-response payoff - current payoff).
// Throws kUnboundedGame for non-finite payoffs or empty strategy sets.
double Exploitability(const NormalFormGame& game, const MixedProfile& profile);

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;  // maximizer
  std::vector<double> col_strategy;  // minimizer
};

// Exact value of the zero-sum matrix game max_x min_y x^T A y by the simplex
// method.
MatrixGameSolution SolveZeroSumGame(const Eigen::MatrixXd& a);

// min over opponent mixtures, max over simplex weights on the pool, of the
// aggregated payoff. Rows are pool policies, columns the opponent space.
double PopulationEfficacy(const PayoffMatrix& a);

// Exploitability of the profile in which each side plays its pool uniformly,
// in the zero-sum game defined by the payoff matrix.
double UniformPoolExploitability(const PayoffMatrix& a);

}  // namespace feint

#endif  // FEINT_DIVERSITY_H_
