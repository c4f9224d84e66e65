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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace feint::oracle {

using nlohmann::json;

namespace {

constexpr int kStates = 5;

json StateJson(int s, double jitter) {
  const double x = -0.6 + 0.3 * s;
  json joints = json::array();
  joints.push_back({x + jitter, 0.1 * s, 0.0});
  joints.push_back({0.0, -0.2 * s, 0.5});
  return {{"joints", joints}, {"footing", s == kStates - 1 ? "LeftForward" : "Neutral"}};
}

std::string Join(const std::vector<std::string>& v) {
  std::string out;
  for (const std::string& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::vector<std::string> Ids(const Behavior& b, std::size_t begin, std::size_t end) {
  std::vector<std::string> out;
  for (std::size_t k = begin; k < end && k < b.actions.size(); ++k) {
    out.push_back(b.actions[k].id);
  }
  return out;
}

bool Shares(const UnitAction& x, const UnitAction& y, bool similar, double eps) {
  if (x.id == y.id) return true;
  return similar && Distance(x.start_state, y.start_state, eps) <= eps &&
         Distance(x.end_state, y.end_state, eps) <= eps;
}

std::string DbmLine(const std::string& bi, const std::string& bj, std::size_t p,
                    std::size_t cut, const std::vector<std::string>& feint_forward,
                    const std::vector<std::string>& followup, std::size_t t_f,
                    std::size_t t_s) {
  std::ostringstream ss;
  ss << bi << "|" << bj << "|" << p << "|" << cut << "|" << Join(feint_forward) << "|"
     << Join(followup) << "|" << t_f << "|" << t_s;
  return ss.str();
}

}  // namespace

json RandomCatalogJson(std::uint64_t seed, int max_behaviors, int max_actions) {
  std::mt19937_64 gen(seed);
  auto below = [&](int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(gen);
  };
  std::bernoulli_distribution twin(0.2);
  std::bernoulli_distribution attack(0.8);
  std::uniform_real_distribution<double> reward(0.5, 2.0);
  const char* dirs[] = {"High", "Mid", "Low"};

  json behaviors = json::array();
  const int nb = below(2, max_behaviors);
  for (int b = 0; b < nb; ++b) {
    const int len = below(2, max_actions);
    json actions = json::array();
    int s = 0;
    for (int k = 0; k < len; ++k) {
      const int e = below(0, kStates - 1);
      const bool alias = twin(gen);
      // A twin differs from its original by a fixed offset inside epsilon.
      const double jitter = alias ? 0.02 : 0.0;
      actions.push_back({{"id", (alias ? "v" : "a") + std::to_string(s) + std::to_string(e)},
                         {"start_state", StateJson(s, jitter)},
                         {"end_state", StateJson(e, jitter)}});
      s = e;
    }
    const int stretch = below(1, len);
    const int reward_end = below(stretch, len);
    behaviors.push_back({{"id", "b" + std::to_string(b)},
                         {"name", "behavior " + std::to_string(b)},
                         {"kind", attack(gen) ? "attack" : "defend"},
                         {"direction", dirs[below(0, 2)]},
                         {"reward_value", reward(gen)},
                         {"stretch_end", stretch},
                         {"reward_end", reward_end},
                         {"actions", actions}});
  }
  return {{"epsilon_state", 0.05}, {"joint_count", 2}, {"behaviors", behaviors}};
}

Catalog RandomCatalog(std::uint64_t seed, int max_behaviors, int max_actions) {
  return CatalogFromJson(RandomCatalogJson(seed, max_behaviors, max_actions));
}

std::vector<std::string> ActionIds(const Catalog& cat) {
  std::vector<std::string> out;
  for (const Behavior& b : cat.behaviors()) {
    for (const UnitAction& a : b.actions) {
      if (std::find(out.begin(), out.end(), a.id) == out.end()) out.push_back(a.id);
    }
  }
  return out;
}

double Distance(const PhysicalState& a, const PhysicalState& b, double eps) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.joints.size(); ++j) {
    for (std::size_t c = 0; c < 3; ++c) d = std::max(d, std::abs(a.joints[j][c] - b.joints[j][c]));
  }
  return d + (a.footing == b.footing ? 0.0 : 2.0 * eps);
}

std::string Render(const FeintTemplate& t) {
  std::ostringstream ss;
  ss << t.behavior_i << "|" << t.behavior_j << "|" << t.junction_index_i << "|"
     << t.junction_index_j << "|" << t.junction_i << "|" << t.junction_j << "|"
     << Join(t.avail_prefix) << "|" << Join(t.avail_suffix);
  return ss.str();
}

std::string Render(const DualBehaviorModel& d) {
  std::vector<std::string> forward;
  for (std::size_t k = 0; k < d.feint.cut_index && k < d.feint.actions.size(); ++k) {
    forward.push_back(d.feint.actions[k].action.id);
  }
  std::vector<std::string> followup;
  for (const SourcedAction& a : d.followup) followup.push_back(a.action.id);
  return DbmLine(d.feint.behavior_i, d.target_behavior_id, d.select_start, d.feint.cut_index,
                 forward, followup, d.t_f, d.t_s);
}

std::vector<std::string> Templates(const Catalog& cat, bool similar_state) {
  const double eps = cat.epsilon_state();
  std::vector<std::string> out;
  for (const Behavior& bi : cat.behaviors()) {
    for (const Behavior& bj : cat.behaviors()) {
      for (std::size_t m = 0; m < bi.actions.size(); ++m) {
        for (std::size_t n = 0; n < bj.actions.size(); ++n) {
          if (!Shares(bi.actions[m], bj.actions[n], similar_state, eps)) continue;
          std::ostringstream ss;
          ss << bi.id << "|" << bj.id << "|" << m << "|" << n << "|" << bi.actions[m].id << "|"
             << bj.actions[n].id << "|" << Join(Ids(bi, 0, m)) << "|"
             << Join(Ids(bj, n + 1, bj.actions.size()));
          out.push_back(ss.str());
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Dbms(const Catalog& cat, bool similar_state, const std::string& a_t,
                              const std::string& a_target) {
  const double eps = cat.epsilon_state();
  std::size_t max_stretch = 0;
  for (const Behavior& b : cat.behaviors()) max_stretch = std::max(max_stretch, b.stretch_end);
  std::vector<std::string> out;
  for (const Behavior& bi : cat.behaviors()) {
    for (const Behavior& bj : cat.behaviors()) {
      if (bj.kind != BehaviorKind::kAttack) continue;
      for (std::size_t m = 0; m < bi.actions.size(); ++m) {
        for (std::size_t n = 0; n < bj.actions.size(); ++n) {
          if (!Shares(bi.actions[m], bj.actions[n], similar_state, eps)) continue;
          bool target_after = false;
          for (std::size_t q = n + 1; q < bj.actions.size(); ++q) {
            target_after |= bj.actions[q].id == a_target;
          }
          if (!target_after || m > bi.stretch_end || n + 1 > bj.reward_end) continue;
          // The follow-up must reach bj's Reward Sequence.
          bool rewarded = false;
          for (std::size_t q = n; q < bj.actions.size(); ++q) {
            rewarded |= q >= bj.stretch_end && q < bj.reward_end;
          }
          if (!rewarded) continue;
          for (std::size_t p = 0; p < m; ++p) {
            if (bi.actions[p].id != a_t) continue;
            // Follow-up: bi[p, m), bj[n], bj[n+1, end).
            std::vector<const UnitAction*> follow;
            for (std::size_t k = p; k < m; ++k) follow.push_back(&bi.actions[k]);
            for (std::size_t k = n; k < bj.actions.size(); ++k) follow.push_back(&bj.actions[k]);
            bool continuous = true;
            for (std::size_t k = 0; k + 1 < follow.size(); ++k) {
              continuous &= Distance(follow[k]->end_state, follow[k + 1]->start_state, eps) <= eps;
            }
            if (!continuous) continue;
            std::vector<std::string> follow_ids;
            for (const UnitAction* a : follow) follow_ids.push_back(a->id);
            for (std::size_t cut = 1; p + cut <= m; ++cut) {
              // The palindrome returns exactly to bi[p].start, the follow-up start.
              const std::size_t t_f = 2 * cut;
              if (t_f > 2 * max_stretch) continue;
              out.push_back(DbmLine(bi.id, bj.id, p, cut, Ids(bi, p, p + cut), follow_ids, t_f,
                                    t_f + follow.size()));
            }
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double RewShort(const std::vector<std::vector<double>>& r, long t0, long t_f, long t_s,
                const std::vector<double>& alpha_feint,
                const std::vector<double>& alpha_attack, int agent) {
  double total = 0.0;
  for (long k = 0; k <= t_f; ++k) total += alpha_feint[k] * r[t0 + k][agent];
  for (long k = 0; k < t_s - t_f; ++k) total += alpha_attack[k] * r[t0 + t_f + 1 + k][agent];
  return total;
}

double RewLong(const std::vector<std::vector<double>>& r, long t0, long t_s, long horizon,
               const std::vector<double>& beta, int agent) {
  double total = 0.0;
  long k = 0;
  for (long t = t0 + t_s + 1; t <= horizon; ++t, ++k) total += beta[k] * r[t][agent];
  return total / static_cast<double>(horizon);
}

void MarkovChainModel::Reset(Rng& rng) {
  state_ = static_cast<int>(
      rng.Categorical(std::span<const double>(initial_.data(), initial_.size())));
}

OccupancyKey MarkovChainModel::Step(Rng& rng) {
  OccupancyKey key{"s" + std::to_string(state_), "a"};
  const Eigen::RowVectorXd row = transition_.row(state_);
  state_ = static_cast<int>(rng.Categorical(std::span<const double>(row.data(), row.size())));
  return key;
}

Eigen::VectorXd ChainOccupancy(const Eigen::MatrixXd& transition,
                               const Eigen::VectorXd& initial, int horizon) {
  Eigen::RowVectorXd dist = initial.transpose();
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(initial.size());
  for (int t = 0; t < horizon; ++t) {
    sum += dist;
    dist = dist * transition;
  }
  return (sum / horizon).transpose();
}

std::vector<Equilibrium> SupportEnumeration2x2(const Eigen::Matrix2d& row,
                                               const Eigen::Matrix2d& col) {
  std::vector<Equilibrium> out;
  // Pure profiles.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (row(i, j) >= row(1 - i, j) && col(i, j) >= col(i, 1 - j)) {
        out.push_back({i == 0 ? 1.0 : 0.0, j == 0 ? 1.0 : 0.0});
      }
    }
  }
  // Fully mixed: each side makes the other indifferent.
  const double dq = row(0, 0) - row(0, 1) - row(1, 0) + row(1, 1);
  const double dp = col(0, 0) - col(0, 1) - col(1, 0) + col(1, 1);
  if (std::abs(dq) > 1e-12 && std::abs(dp) > 1e-12) {
    const double q = (row(1, 1) - row(0, 1)) / dq;
    const double p = (col(1, 1) - col(1, 0)) / dp;
    if (p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) out.push_back({p, q});
  }
  return out;
}

double GridSearchValue(const Eigen::MatrixXd& a, double step) {
  const int m = static_cast<int>(a.rows());
  const int units = static_cast<int>(std::lround(1.0 / step));
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> w(m, 0);
  std::function<void(int, int)> rec = [&](int row, int left) {
    if (row == m - 1) {
      w[row] = left;
      Eigen::VectorXd alpha(m);
      for (int k = 0; k < m; ++k) alpha[k] = static_cast<double>(w[k]) / units;
      best = std::max(best, (alpha.transpose() * a).minCoeff());
      return;
    }
    for (int v = 0; v <= left; ++v) {
      w[row] = v;
      rec(row + 1, left - v);
    }
  };
  rec(0, units);
  return best;
}

}  // namespace feint::oracle
