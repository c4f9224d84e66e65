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

#include "feint/diversity.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "feint/error.h"
#include "feint/rng.h"

namespace feint {

namespace {

void CheckUnique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size()) {
    Fail(ErrorCode::kInvalidArgument, std::string(what) + " ids must be unique");
  }
}

}  // namespace

void PayoffMatrix::Validate() const {
  if (values.rows() != static_cast<Eigen::Index>(row_ids.size()) ||
      values.cols() != static_cast<Eigen::Index>(col_ids.size())) {
    Fail(ErrorCode::kDimension, "payoff matrix shape does not match its ids");
  }
  if (!values.allFinite()) Fail(ErrorCode::kInvalidArgument, "non-finite payoff");
  CheckUnique(row_ids, "row");
  CheckUnique(col_ids, "column");
}

std::string PayoffMatrix::ToCsv() const {
  std::ostringstream out;
  out << std::setprecision(17) << "policy";
  for (const std::string& c : col_ids) out << "," << c;
  out << "\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out << row_ids[r];
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << "," << values(r, c);
    out << "\n";
  }
  return out.str();
}

void PolicyPool::Validate() const {
  if (ids.empty()) Fail(ErrorCode::kEmptyPool, "policy pool is empty");
  CheckUnique(ids, "policy");
}

PayoffMatrix BuildPayoffMatrix(const PolicyPool& rows, const PolicyPool& cols,
                               const PairEvaluator& evaluator, int episodes,
                               std::uint64_t seed) {
  rows.Validate();
  cols.Validate();
  if (episodes < 1) Fail(ErrorCode::kInvalidArgument, "episodes must be >= 1");
  PayoffMatrix m;
  m.row_ids = rows.ids;
  m.col_ids = cols.ids;
  m.values.resize(rows.ids.size(), cols.ids.size());
  for (std::size_t k = 0; k < rows.ids.size(); ++k) {
    for (std::size_t j = 0; j < cols.ids.size(); ++j) {
      const std::uint64_t cell_seed = MixSeed(seed, k * cols.ids.size() + j);
      double total = 0.0;
      for (int e = 0; e < episodes; ++e) {
        double v;
        try {
          v = evaluator(k, j, MixSeed(cell_seed, static_cast<std::uint64_t>(e)));
        } catch (const std::exception& ex) {
          Fail(ErrorCode::kEvaluationFailure, "evaluating (" + rows.ids[k] + ", " +
                                                  cols.ids[j] + "): " + ex.what());
        }
        if (!std::isfinite(v)) {
          Fail(ErrorCode::kEvaluationFailure, "evaluating (" + rows.ids[k] + ", " +
                                                  cols.ids[j] + "): non-finite payoff");
        }
        total += v;
      }
      m.values(k, j) = total / episodes;
    }
  }
  return m;
}

double ResponseDiversity(std::span<const double> a_new, const PayoffMatrix& a) {
  if (static_cast<Eigen::Index>(a_new.size()) != a.values.cols()) {
    Fail(ErrorCode::kDimension, "payoff vector length " + std::to_string(a_new.size()) +
                                    " != opponent pool size " +
                                    std::to_string(a.values.cols()));
  }
  const Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(a_new.data(), a_new.size());
  if (a.values.rows() == 0) return v.norm();
  const Eigen::MatrixXd basis = a.values.transpose();  // N x M, columns = rows of A
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(basis);
  const Eigen::VectorXd coeffs = cod.solve(v);
  const double residual = (basis * coeffs - v).norm();
  const double tol = 1e-9 * std::max(1.0, v.norm());
  return residual < tol ? 0.0 : residual;
}

NormalFormGame NormalFormGame::TwoPlayer(const Eigen::MatrixXd& row_payoff,
                                         const Eigen::MatrixXd& col_payoff) {
  if (row_payoff.rows() != col_payoff.rows() || row_payoff.cols() != col_payoff.cols()) {
    Fail(ErrorCode::kDimension, "bimatrix payoff shapes differ");
  }
  NormalFormGame g;
  g.num_actions = {static_cast<int>(row_payoff.rows()),
                   static_cast<int>(row_payoff.cols())};
  g.payoffs.assign(2, {});
  for (Eigen::Index r = 0; r < row_payoff.rows(); ++r) {
    for (Eigen::Index c = 0; c < row_payoff.cols(); ++c) {
      g.payoffs[0].push_back(row_payoff(r, c));
      g.payoffs[1].push_back(col_payoff(r, c));
    }
  }
  return g;
}

NormalFormGame NormalFormGame::ZeroSum(const Eigen::MatrixXd& row_payoff) {
  return TwoPlayer(row_payoff, -row_payoff);
}

void NormalFormGame::Validate() const {
  if (num_actions.empty() || payoffs.size() != num_actions.size()) {
    Fail(ErrorCode::kUnboundedGame, "game needs one payoff table per player");
  }
  std::size_t joint = 1;
  for (int n : num_actions) {
    if (n <= 0) Fail(ErrorCode::kUnboundedGame, "every player needs >= 1 strategy");
    joint *= static_cast<std::size_t>(n);
  }
  for (const auto& table : payoffs) {
    if (table.size() != joint) Fail(ErrorCode::kDimension, "payoff table size mismatch");
    for (double v : table) {
      if (!std::isfinite(v)) Fail(ErrorCode::kUnboundedGame, "non-finite payoff");
    }
  }
}

namespace {

void CheckProfile(const NormalFormGame& game, const MixedProfile& profile) {
  if (profile.size() != game.num_actions.size()) {
    Fail(ErrorCode::kDimension, "profile needs one strategy per player");
  }
  for (std::size_t p = 0; p < profile.size(); ++p) {
    if (profile[p].size() != static_cast<std::size_t>(game.num_actions[p])) {
      Fail(ErrorCode::kDimension, "strategy length mismatch for player " +
                                      std::to_string(p));
    }
    double total = 0.0;
    for (double x : profile[p]) {
      if (x < -1e-12) Fail(ErrorCode::kInvalidArgument, "negative probability");
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      Fail(ErrorCode::kInvalidArgument, "strategy does not sum to 1");
    }
  }
}

// Expected payoff of `player` when it plays pure `action` (or its mixed
// strategy if action < 0) and everyone else follows `profile`.
double PayoffAgainst(const NormalFormGame& game, const MixedProfile& profile,
                     int player, int action) {
  const int n = game.num_players();
  std::vector<int> idx(n, 0);
  double total = 0.0;
  const std::vector<double>& table = game.payoffs[player];
  for (std::size_t joint = 0; joint < table.size(); ++joint) {
    double prob = 1.0;
    for (int p = 0; p < n && prob != 0.0; ++p) {
      if (p == player && action >= 0) {
        prob *= idx[p] == action ? 1.0 : 0.0;
      } else {
        prob *= profile[p][idx[p]];
      }
    }
    total += prob * table[joint];
    for (int p = n - 1; p >= 0; --p) {
      if (++idx[p] < game.num_actions[p]) break;
      idx[p] = 0;
    }
  }
  return total;
}

}  // namespace

double ExpectedPayoff(const NormalFormGame& game, const MixedProfile& profile,
                      int player) {
  game.Validate();
  CheckProfile(game, profile);
  return PayoffAgainst(game, profile, player, -1);
}

double Exploitability(const NormalFormGame& game, const MixedProfile& profile) {
  game.Validate();
  CheckProfile(game, profile);
  double total = 0.0;
  for (int p = 0; p < game.num_players(); ++p) {
    const double current = PayoffAgainst(game, profile, p, -1);
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < game.num_actions[p]; ++a) {
      best = std::max(best, PayoffAgainst(game, profile, p, a));
    }
    total += std::max(0.0, best - current);
  }
  return total;
}

MatrixGameSolution SolveZeroSumGame(const Eigen::MatrixXd& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m == 0 || n == 0) Fail(ErrorCode::kEmptyPool, "matrix game has an empty side");
  if (!a.allFinite()) Fail(ErrorCode::kUnboundedGame, "non-finite payoff");

  // Shift to strictly positive payoffs; the column player's LP
  //   max 1^T y  s.t.  A' y <= 1, y >= 0
  // is then feasible at y = 0 and bounded, and its optimum is 1 / value.
  const double shift = 1.0 - a.minCoeff();
  const Eigen::MatrixXd ap = a.array() + shift;

  const Eigen::Index cols = n + m + 1;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, cols);
  tab.block(0, 0, m, n) = ap;
  tab.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  tab.col(cols - 1).head(m).setOnes();
  tab.row(m).head(n).setConstant(-1.0);
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  constexpr double kTol = 1e-12;
  // Bland's rule: smallest entering index, ties in the ratio test broken by
  // smallest basic index. Guarantees termination on degenerate games.
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (tab(m, j) < -kTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab(i, enter) > kTol) {
        const double ratio = tab(i, cols - 1) / tab(i, enter);
        if (leave < 0 || ratio < best_ratio - kTol ||
            (std::abs(ratio - best_ratio) <= kTol && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) Fail(ErrorCode::kUnboundedGame, "matrix game LP is unbounded");
    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && tab(i, enter) != 0.0) {
        tab.row(i) -= tab(i, enter) * tab.row(leave);
      }
    }
    basis[leave] = enter;
  }

  const double sum_y = tab(m, cols - 1);
  MatrixGameSolution sol;
  sol.value = 1.0 / sum_y - shift;
  sol.col_strategy.assign(n, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) sol.col_strategy[basis[i]] = tab(i, cols - 1) / sum_y;
  }
  sol.row_strategy.assign(m, 0.0);
  double dual_total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    sol.row_strategy[i] = std::max(0.0, tab(m, n + i));
    dual_total += sol.row_strategy[i];
  }
  for (double& x : sol.row_strategy) x /= dual_total;
  return sol;
}

double PopulationEfficacy(const PayoffMatrix& a) {
  if (a.values.rows() == 0) Fail(ErrorCode::kEmptyPool, "policy pool is empty");
  if (a.values.cols() == 0) Fail(ErrorCode::kEmptyPool, "opponent space is empty");
  return SolveZeroSumGame(a.values).value;
}

double UniformPoolExploitability(const PayoffMatrix& a) {
  if (a.values.rows() == 0 || a.values.cols() == 0) {
    Fail(ErrorCode::kEmptyPool, "policy pool is empty");
  }
  const NormalFormGame game = NormalFormGame::ZeroSum(a.values);
  MixedProfile profile = {
      std::vector<double>(a.values.rows(), 1.0 / a.values.rows()),
      std::vector<double>(a.values.cols(), 1.0 / a.values.cols())};
  return Exploitability(game, profile);
}

}  // namespace feint
