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

#include "feint/learning.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "feint/error.h"

namespace feint {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Features and the command menu.

std::vector<double> PolicyFeatures(const Env& env, const GameState& state,
                                   int agent) {
  std::vector<double> x(kFeatureCount, 0.0);
  x[0] = 1.0;
  const int opp = env.NearestOpponent(state, agent);
  if (opp < 0) return x;
  const AgentState& me = state.agents[agent];
  const AgentState& o = state.agents[opp];
  const double d = std::hypot(o.position.x - me.position.x, o.position.y - me.position.y);
  x[1] = std::min(d / env.config().hit_range, 3.0) / 3.0;
  x[2] = env.InStrikeZone(state, agent, opp) ? 1.0 : 0.0;
  x[3] = env.InStrikeZone(state, opp, agent) ? 1.0 : 0.0;
  if (o.knockdown_remaining > 0) x[13] = 1.0;
  if (o.visible_step) {
    // Only what an onlooker could see; whether a step is a feint is hidden.
    const PlanStepInfo& v = *o.visible_step;
    const int dir = static_cast<int>(v.direction);
    x[4] = 1.0;
    if (v.defending) {
      x[9 + dir] = 1.0;
    } else if (v.reward_step) {
      x[8] = 1.0;
    } else if (v.extending) {
      x[5 + dir] = 1.0;
    } else {
      x[12] = 1.0;
    }
  }
  return x;
}

CommandMenu::CommandMenu(const Catalog& catalog) {
  names_ = {"idle", "move_forward", "move_back", "move_left", "move_right"};
  for (const Behavior& b : catalog.behaviors()) {
    names_.push_back("start:" + b.id);
    plans_.push_back(MakeBehaviorPlan(b, catalog));
  }
}

AgentCommand CommandMenu::Command(int index) const {
  if (index < 0 || index >= size()) {
    Fail(ErrorCode::kInvalidArgument, "menu index out of range");
  }
  switch (index) {
    case 0: return AgentCommand::Idle();
    case 1: return AgentCommand::Move(MoveDir::kForward);
    case 2: return AgentCommand::Move(MoveDir::kBack);
    case 3: return AgentCommand::Move(MoveDir::kLeft);
    case 4: return AgentCommand::Move(MoveDir::kRight);
    default: return AgentCommand::Start(plans_[index - kFixed]);
  }
}

int CommandMenu::IndexOfBehavior(std::string_view id) const {
  for (std::size_t k = 0; k < plans_.size(); ++k) {
    if (plans_[k]->id == id) return static_cast<int>(k) + kFixed;
  }
  return -1;
}

std::vector<bool> CommandMenu::Mask(const Env& env, const GameState& state,
                                    int agent) const {
  std::vector<bool> mask(names_.size(), true);
  const PhysicalState& pose = state.agents[agent].physical_state;
  const double eps = env.catalog().epsilon_state();
  for (std::size_t k = 0; k < plans_.size(); ++k) {
    const PhysicalState& start = plans_[k]->steps.front().action.start_state;
    mask[k + kFixed] = start.joints.size() == pose.joints.size() &&
                       StateDistance(pose, start, eps) <= eps;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Regular learner.

SoftmaxActorCritic::SoftmaxActorCritic(int num_actions, int num_features,
                                       double actor_lr, double critic_lr)
    : num_actions_(num_actions),
      num_features_(num_features),
      actor_lr_(actor_lr),
      critic_lr_(critic_lr),
      theta_(static_cast<std::size_t>(num_actions) * num_features, 0.0),
      value_(num_features, 0.0) {
  if (num_actions < 1 || num_features < 1) {
    Fail(ErrorCode::kInvalidArgument, "learner needs at least one action and feature");
  }
}

std::vector<double> SoftmaxActorCritic::Probabilities(
    std::span<const double> features, const std::vector<bool>& mask) const {
  if (static_cast<int>(features.size()) != num_features_ ||
      static_cast<int>(mask.size()) != num_actions_) {
    Fail(ErrorCode::kDimension, "feature or mask size does not match the learner");
  }
  std::vector<double> logits(num_actions_, -std::numeric_limits<double>::infinity());
  double top = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_actions_; ++a) {
    if (!mask[a]) continue;
    double z = 0.0;
    for (int f = 0; f < num_features_; ++f) z += theta_[a * num_features_ + f] * features[f];
    logits[a] = z;
    top = std::max(top, z);
  }
  if (!std::isfinite(top)) Fail(ErrorCode::kInvalidArgument, "every action is masked");
  std::vector<double> p(num_actions_, 0.0);
  double total = 0.0;
  for (int a = 0; a < num_actions_; ++a) {
    if (!mask[a]) continue;
    p[a] = std::exp(logits[a] - top);
    total += p[a];
  }
  for (double& v : p) v /= total;
  return p;
}

double SoftmaxActorCritic::Value(std::span<const double> features) const {
  double v = 0.0;
  for (int f = 0; f < num_features_; ++f) v += value_[f] * features[f];
  return v;
}

std::vector<double> SoftmaxActorCritic::LogProbGradient(
    std::span<const double> features, const std::vector<bool>& mask,
    int action) const {
  const std::vector<double> p = Probabilities(features, mask);
  std::vector<double> g(theta_.size(), 0.0);
  for (int a = 0; a < num_actions_; ++a) {
    const double coef = (a == action ? 1.0 : 0.0) - p[a];
    for (int f = 0; f < num_features_; ++f) g[a * num_features_ + f] = coef * features[f];
  }
  return g;
}

void SoftmaxActorCritic::UpdateEpisode(std::span<const DecisionRecord> decisions) {
  for (const DecisionRecord& d : decisions) {
    const double v = Value(d.features);
    const double advantage = d.ret - v;
    const std::vector<double> g = LogProbGradient(d.features, d.mask, d.action);
    for (std::size_t k = 0; k < theta_.size(); ++k) theta_[k] += actor_lr_ * advantage * g[k];
    for (int f = 0; f < num_features_; ++f) value_[f] += critic_lr_ * advantage * d.features[f];
  }
}

std::unique_ptr<PolicyLearner> SoftmaxActorCritic::Clone() const {
  return std::make_unique<SoftmaxActorCritic>(*this);
}

json SoftmaxActorCritic::ToJson() const {
  return json{{"learner", name()},         {"num_actions", num_actions_},
              {"num_features", num_features_}, {"actor_lr", actor_lr_},
              {"critic_lr", critic_lr_},   {"theta", theta_},
              {"value", value_}};
}

SoftmaxActorCritic SoftmaxActorCritic::FromJson(const json& j) {
  try {
    SoftmaxActorCritic l(j.at("num_actions").get<int>(), j.at("num_features").get<int>(),
                         j.at("actor_lr").get<double>(), j.at("critic_lr").get<double>());
    auto theta = j.at("theta").get<std::vector<double>>();
    auto value = j.at("value").get<std::vector<double>>();
    if (theta.size() != l.theta_.size() || value.size() != l.value_.size()) {
      Fail(ErrorCode::kDimension, "learner parameter sizes do not match");
    }
    l.theta_ = std::move(theta);
    l.value_ = std::move(value);
    return l;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("learner: ") + e.what());
  }
}

std::unique_ptr<PolicyLearner> MakeLearner(std::string_view name, int num_actions,
                                           double actor_lr, double critic_lr) {
  if (name == "actor-critic") {
    return std::make_unique<SoftmaxActorCritic>(num_actions, kFeatureCount, actor_lr,
                                                critic_lr);
  }
  Fail(ErrorCode::kConfig, "unknown learner '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Feint policy.

std::vector<double> FeintPolicy::Probabilities(
    std::span<const std::string> candidates) const {
  if (candidates.empty()) Fail(ErrorCode::kInvalidArgument, "no candidate DBMs");
  std::vector<double> z(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    auto it = logits_.find(candidates[k]);
    z[k] = it == logits_.end() ? 0.0 : it->second;
  }
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
  return z;
}

std::size_t FeintPolicy::Sample(std::span<const std::string> candidates,
                                Rng& rng) const {
  const std::vector<double> p = Probabilities(candidates);
  return rng.Categorical(p);
}

void FeintPolicy::Update(std::span<const std::string> candidates,
                         const std::string& chosen, double reward) {
  const std::vector<double> p = Probabilities(candidates);
  const double advantage = reward - baseline_;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double coef = (candidates[k] == chosen ? 1.0 : 0.0) - p[k];
    logits_[candidates[k]] += lr_ * advantage * coef;
  }
  baseline_ += baseline_rate_ * (reward - baseline_);
  ++updates_;
}

json FeintPolicy::ToJson() const {
  return json{{"lr", lr_},
              {"baseline_rate", baseline_rate_},
              {"baseline", baseline_},
              {"updates", updates_},
              {"logits", logits_}};
}

FeintPolicy FeintPolicy::FromJson(const json& j) {
  try {
    FeintPolicy p(j.at("lr").get<double>(), j.at("baseline_rate").get<double>());
    p.baseline_ = j.at("baseline").get<double>();
    p.updates_ = j.at("updates").get<long>();
    p.logits_ = j.at("logits").get<std::map<std::string, double>>();
    return p;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("feint policy: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Configuration.

namespace {

void RejectUnknown(const json& j, const std::set<std::string>& known,
                   const std::string& where) {
  if (!j.is_object()) Fail(ErrorCode::kConfig, where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      Fail(ErrorCode::kConfig, where + ": unknown field '" + key + "'");
    }
  }
}

std::string Hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ExperimentConfig ExperimentFromJson(const json& j) {
  RejectUnknown(j, {"scenario", "weights", "harness", "episodes", "feint_agents", "seed"},
                "config");
  ExperimentConfig c;
  if (!j.contains("scenario")) Fail(ErrorCode::kConfig, "config: missing 'scenario'");
  c.scenario = ScenarioFromJson(j.at("scenario"));
  HarnessConfig& h = c.harness;
  try {
    if (auto it = j.find("weights"); it != j.end()) {
      const json& w = *it;
      RejectUnknown(w, {"alpha_feint", "alpha_attack", "beta", "lambda_short",
                        "lambda_long", "mu1", "mu2", "lambda_adjust"},
                    "weights");
      h.alpha_feint = w.value("alpha_feint", h.alpha_feint);
      h.alpha_attack = w.value("alpha_attack", h.alpha_attack);
      h.beta = w.value("beta", h.beta);
      h.lambda_short = w.value("lambda_short", h.lambda_short);
      h.lambda_long = w.value("lambda_long", h.lambda_long);
      h.mu1 = w.value("mu1", h.mu1);
      h.mu2 = w.value("mu2", h.mu2);
      if (auto la = w.find("lambda_adjust"); la != w.end()) {
        RejectUnknown(*la, {"enabled", "eta"}, "weights.lambda_adjust");
        h.lambda_adjuster.enabled = la->value("enabled", false);
        h.lambda_adjuster.eta = la->value("eta", h.lambda_adjuster.eta);
      }
    }
    if (auto it = j.find("harness"); it != j.end()) {
      const json& hj = *it;
      RejectUnknown(hj, {"learner", "actor_lr", "critic_lr", "feint_lr", "gamma",
                         "delta_near_scale", "p_low", "imaginary_extra_steps", "obs_bins",
                         "f_divergence", "template_predicate"},
                    "harness");
      h.learner = hj.value("learner", h.learner);
      h.actor_lr = hj.value("actor_lr", h.actor_lr);
      h.critic_lr = hj.value("critic_lr", h.critic_lr);
      h.feint_lr = hj.value("feint_lr", h.feint_lr);
      h.gamma = hj.value("gamma", h.gamma);
      h.delta_near_scale = hj.value("delta_near_scale", h.delta_near_scale);
      h.p_low = hj.value("p_low", h.p_low);
      h.imaginary_extra_steps = hj.value("imaginary_extra_steps", h.imaginary_extra_steps);
      h.obs_bins = hj.value("obs_bins", h.obs_bins);
      if (hj.contains("f_divergence")) {
        h.divergence = FDivergenceFromName(hj.at("f_divergence").get<std::string>());
      }
      if (hj.contains("template_predicate")) {
        h.predicate = PredicateFromName(hj.at("template_predicate").get<std::string>());
      }
    }
    c.episodes = j.value("episodes", c.episodes);
    c.feint_agents = j.value("feint_agents", std::vector<int>{});
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  if (c.episodes < 0) Fail(ErrorCode::kConfig, "episodes must be >= 0");
  if (h.obs_bins < 1 || h.imaginary_extra_steps < 0 || h.gamma < 0.0 || h.gamma > 1.0) {
    Fail(ErrorCode::kConfig, "harness constants out of range");
  }
  return c;
}

json ExperimentToJson(const ExperimentConfig& c) {
  const HarnessConfig& h = c.harness;
  return json{
      {"scenario", ScenarioToJson(c.scenario)},
      {"weights",
       {{"alpha_feint", h.alpha_feint},
        {"alpha_attack", h.alpha_attack},
        {"beta", h.beta},
        {"lambda_short", h.lambda_short},
        {"lambda_long", h.lambda_long},
        {"mu1", h.mu1},
        {"mu2", h.mu2},
        {"lambda_adjust",
         {{"enabled", h.lambda_adjuster.enabled}, {"eta", h.lambda_adjuster.eta}}}}},
      {"harness",
       {{"learner", h.learner},
        {"actor_lr", h.actor_lr},
        {"critic_lr", h.critic_lr},
        {"feint_lr", h.feint_lr},
        {"gamma", h.gamma},
        {"delta_near_scale", h.delta_near_scale},
        {"p_low", h.p_low},
        {"imaginary_extra_steps", h.imaginary_extra_steps},
        {"obs_bins", h.obs_bins},
        {"f_divergence", FDivergenceName(h.divergence)},
        {"template_predicate", PredicateName(h.predicate)}}},
      {"episodes", c.episodes},
      {"feint_agents", c.feint_agents},
      {"seed", c.seed}};
}

std::string ConfigHash(const ExperimentConfig& c) {
  const std::string text = ExperimentToJson(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return Hex64(h);
}

std::string TrainingLog::ToCsv(bool header) const {
  std::string out = "episode";
  const std::size_t k = rows.empty() ? agent_names.size() : rows.front().rewards.size();
  for (std::size_t i = 0; i < k; ++i) out += ",reward_" + std::to_string(i);
  for (std::size_t i = 0; i < k; ++i) out += ",net_" + std::to_string(i);
  out +=
      ",rew_short,rew_long,rew_temporal,rew_spatial_sum,rew_collective,"
      "feint_activations,dbm_success,dbm_failure\n";
  if (!header) out.clear();
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (const EpisodeRecord& r : rows) {
    out += std::to_string(r.episode);
    for (double v : r.rewards) out += "," + num(v);
    for (double v : r.net_rewards) out += "," + num(v);
    out += "," + num(r.breakdown.rew_short) + "," + num(r.breakdown.rew_long) + "," +
           num(r.breakdown.rew_temporal) + "," + num(r.breakdown.rew_spatial_sum) + "," +
           num(r.breakdown.rew_collective) + "," + std::to_string(r.activations) + "," +
           std::to_string(r.dbm_success) + "," + std::to_string(r.dbm_failure) + "\n";
  }
  return out;
}

std::vector<double> NetRewards(const StepOutcome& outcome, std::size_t agents) {
  std::vector<double> net(agents, 0.0);
  for (std::size_t i = 0; i < agents && i < outcome.rewards.size(); ++i) {
    net[i] = outcome.rewards[i];
  }
  for (const StepEvent& e : outcome.events) {
    if (e.type == StepEvent::Type::kHit && e.other >= 0 &&
        static_cast<std::size_t>(e.other) < agents) {
      net[e.other] -= e.value;
    }
  }
  return net;
}

// ---------------------------------------------------------------------------
// Trainer.

Trainer::Trainer(ExperimentConfig config, std::shared_ptr<const Catalog> catalog)
    : config_(std::move(config)),
      catalog_(std::move(catalog)),
      env_(config_.scenario, catalog_),
      menu_(*catalog_),
      templates_(PrecomputeTemplates(*catalog_, config_.harness.predicate)) {
  const int k = config_.scenario.agent_count;
  for (int i = 0; i < k; ++i) {
    AgentPolicies p;
    p.regular = MakeLearner(config_.harness.learner, menu_.size(), config_.harness.actor_lr,
                            config_.harness.critic_lr);
    p.feint = FeintPolicy(config_.harness.feint_lr);
    policies_.push_back(std::move(p));
  }
  for (int a : config_.feint_agents) {
    if (a < 0 || a >= k) Fail(ErrorCode::kUnknownAgent, "unknown feint agent " + std::to_string(a));
    policies_[a].feint_enabled = true;
  }
  pending_.resize(k);
}

std::vector<DualBehaviorModel> Trainer::CandidateDbms(const GameState& state, int agent,
                                                      const std::string& a_target) const {
  const Catalog& cat = *catalog_;
  const double eps = cat.epsilon_state();
  const PhysicalState& pose = state.agents[agent].physical_state;
  std::set<std::string> seen;
  std::vector<DualBehaviorModel> out;
  for (const Behavior& b : cat.behaviors()) {
    for (const UnitAction& a : b.actions) {
      if (!seen.insert(a.id).second) continue;
      if (a.start_state.joints.size() != pose.joints.size() ||
          StateDistance(pose, a.start_state, eps) > eps) {
        continue;
      }
      auto key = std::make_pair(a.id, a_target);
      auto it = dbm_cache_.find(key);
      if (it == dbm_cache_.end()) {
        it = dbm_cache_.emplace(key, ComposeDbms(a.id, a_target, templates_, cat)).first;
      }
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ImaginaryDecision Trainer::ShouldActivate(const GameState& state, int agent) const {
  ImaginaryDecision d;
  d.agent = agent;
  d.step = state.step;
  const AgentState& a = state.agents.at(agent);
  // A running plan of either kind leaves no decision to make this step.
  if (a.plan || a.knockdown_remaining > 0) return d;
  const Catalog& cat = *catalog_;
  const double eps = cat.epsilon_state();
  const double delta_near = config_.harness.delta_near_scale * eps;
  const std::vector<double> p = policies_[agent].regular->Probabilities(
      PolicyFeatures(env_, state, agent), menu_.Mask(env_, state, agent));

  std::vector<const Behavior*> targets;
  for (const Behavior& b : cat.behaviors()) {
    if (b.kind == BehaviorKind::kAttack && b.reward_value > 0.0 &&
        b.stretch_end < b.reward_end) {
      targets.push_back(&b);
    }
  }
  std::stable_sort(targets.begin(), targets.end(), [](const Behavior* x, const Behavior* y) {
    return x->reward_value > y->reward_value;
  });
  for (const Behavior* b : targets) {
    const int idx = menu_.IndexOfBehavior(b->id);
    if (idx < 0 || p[idx] >= config_.harness.p_low) continue;
    const std::string a_target = b->actions[b->stretch_end].id;
    std::vector<DualBehaviorModel> dbms = CandidateDbms(state, agent, a_target);
    bool near = false;
    for (const DualBehaviorModel& m : dbms) {
      const PhysicalState& s_r = m.feint.actions.front().action.start_state;
      if (StateDistance(a.physical_state, s_r, eps) <= delta_near) near = true;
    }
    if (!near) continue;
    d.activated = true;
    d.a_target = a_target;
    for (const DualBehaviorModel& m : dbms) d.candidate_dbms.push_back(m.Id());
    return d;
  }
  return d;
}

std::string Trainer::OccupancyState(const GameState& state, int agent) const {
  std::string key = env_.DiscretizeObservation(env_.Observe(state, agent),
                                               config_.harness.obs_bins);
  // The opponent's visible step belongs to the observable state.
  const std::vector<double> x = PolicyFeatures(env_, state, agent);
  key += '|';
  for (int f = 4; f < kFeatureCount; ++f) key += x[f] > 0.5 ? '1' : '0';
  return key;
}

Trainer::Rollout Trainer::ImaginaryRollout(const GameState& state, int agent,
                                           std::shared_ptr<const PlanScript> plan,
                                           long steps, std::uint64_t seed) const {
  GameState s = state;
  Rng rng(seed);
  const int k = static_cast<int>(s.agents.size());
  Rollout out;
  out.trajectory.t0 = 0;
  std::vector<AgentCommand> cmds(k);
  std::set<std::string> states;
  for (long t = 0; t < steps; ++t) {
    std::string own_choice = "idle";
    for (int j = 0; j < k; ++j) {
      const AgentState& a = s.agents[j];
      if (a.plan || a.knockdown_remaining > 0) {
        cmds[j] = AgentCommand::Continue();
      } else if (j == agent && t == 0 && plan) {
        cmds[j] = AgentCommand::Start(plan);
      } else {
        const std::vector<double> p = policies_[j].regular->Probabilities(
            PolicyFeatures(env_, s, j), menu_.Mask(env_, s, j));
        const int idx = static_cast<int>(rng.Categorical(p));
        cmds[j] = menu_.Command(idx);
        if (j == agent) own_choice = menu_.name(idx);
      }
    }
    const std::string key = OccupancyState(s, agent);
    const StepOutcome outcome = env_.Step(s, cmds);
    const std::vector<double> net = NetRewards(outcome, k);
    out.trajectory.rewards.push_back({net[agent]});
    const AgentState& me = s.agents[agent];
    const std::string action = me.visible_step ? me.last_action : own_choice;
    out.counts[{key, action}] += 1.0;
    states.insert(key);
  }
  out.states.assign(states.begin(), states.end());
  return out;
}

ImaginaryDecision Trainer::ImaginaryPlay(const GameState& state, int agent, Rng& rng) {
  ImaginaryDecision d = ShouldActivate(state, agent);
  if (!d.activated) return d;
  ++counters_.activations;
  std::vector<DualBehaviorModel> dbms = CandidateDbms(state, agent, *d.a_target);
  if (dbms.empty()) return d;
  const std::size_t pick = policies_[agent].feint.Sample(d.candidate_dbms, rng);
  const DualBehaviorModel& dbm = dbms[pick];
  auto plan_it = dbm_plans_.find(dbm.Id());
  if (plan_it == dbm_plans_.end()) {
    plan_it = dbm_plans_.emplace(dbm.Id(), MakeDbmPlan(dbm, *catalog_)).first;
  }

  const HarnessConfig& h = config_.harness;
  RewardWindow window{0, static_cast<long>(dbm.t_f), static_cast<long>(dbm.t_s),
                      static_cast<long>(dbm.t_s) + h.imaginary_extra_steps};
  WeightSchedule w = WeightSchedule::Uniform(window, h.alpha_feint, h.alpha_attack, h.beta);
  w.lambda_short = h.lambda_short;
  w.lambda_long = h.lambda_long;
  w.mu1 = h.mu1;
  w.mu2 = h.mu2;

  const std::uint64_t seed = rng.NextU64();
  const long steps = window.horizon_end + 1;
  const Rollout feint = ImaginaryRollout(state, agent, plan_it->second, steps, seed);
  const Rollout base = ImaginaryRollout(state, agent, nullptr, steps, seed);
  counters_.imaginary_rollouts += 2;

  const OccupancyMeasure rho_new = OccupancyMeasure::FromCounts(feint.counts);
  const OccupancyMeasure rho_old = OccupancyMeasure::FromCounts(base.counts);
  const std::size_t self[] = {0};
  d.feint_breakdown = RewCollective(feint.trajectory, window, w, self, rho_new, rho_old,
                                    feint.states, h.divergence);
  const RewardBreakdown base_bd = RewCollective(base.trajectory, window, w, self, rho_old,
                                                rho_old, base.states, h.divergence);
  d.feint_value = d.feint_breakdown.rew_collective;
  d.baseline_value = base_bd.rew_collective;
  if (d.feint_value > d.baseline_value) d.chosen = dbm.Id();

  if (config_.harness.lambda_adjuster.enabled) {
    config_.harness.lambda_adjuster.Update(w, d.feint_breakdown.rew_temporal);
    config_.harness.lambda_short = w.lambda_short;
    config_.harness.lambda_long = w.lambda_long;
  }
  return d;
}

AgentCommand Trainer::ChooseCommand(GameState& state, int agent, Rng& rng,
                                    std::vector<DecisionRecord>& decisions,
                                    std::vector<int>& consulted) {
  const AgentState& a = state.agents[agent];
  ++consulted[agent];
  if (a.plan) {
    // Plans run verbatim; the model that chose the plan owns the step.
    if (a.plan->script->owner == PlanOwner::kFeint) {
      ++counters_.feint_inferences;
    } else {
      ++counters_.regular_inferences;
    }
    return AgentCommand::Continue();
  }
  if (a.knockdown_remaining > 0) {
    ++counters_.regular_inferences;
    return AgentCommand::Idle();
  }
  if (policies_[agent].feint_enabled) {
    ImaginaryDecision d = ImaginaryPlay(state, agent, rng);
    if (d.activated && current_record_ != nullptr) ++current_record_->activations;
    if (d.chosen) {
      ++counters_.commits;
      ++counters_.feint_inferences;
      if (current_record_ != nullptr) {
        RewardBreakdown& b = current_record_->breakdown;
        b.rew_short += d.feint_breakdown.rew_short;
        b.rew_long += d.feint_breakdown.rew_long;
        b.rew_temporal += d.feint_breakdown.rew_temporal;
        b.rew_spatial_sum += d.feint_breakdown.rew_spatial_sum;
        b.rew_collective += d.feint_breakdown.rew_collective;
      }
      pending_[agent] = {d.candidate_dbms, *d.chosen, 0.0, true};
      const std::string id = *d.chosen;
      committed_.push_back(std::move(d));
      return AgentCommand::Start(dbm_plans_.at(id));
    }
  }
  ++counters_.regular_inferences;
  std::vector<double> x = PolicyFeatures(env_, state, agent);
  std::vector<bool> mask = menu_.Mask(env_, state, agent);
  const std::vector<double> p = policies_[agent].regular->Probabilities(x, mask);
  const int idx = static_cast<int>(rng.Categorical(p));
  decisions.push_back({std::move(x), std::move(mask), idx, state.step, 0.0});
  return menu_.Command(idx);
}

EpisodeRecord Trainer::RunEpisode(long episode, bool learn, std::vector<json>* events) {
  const auto started = std::chrono::steady_clock::now();
  const int k = config_.scenario.agent_count;
  EpisodeRecord record;
  record.episode = episode;
  record.rewards.assign(k, 0.0);
  record.net_rewards.assign(k, 0.0);
  current_record_ = &record;

  GameState state = env_.Reset(MixSeed(config_.seed, 2 * static_cast<std::uint64_t>(episode)));
  Rng rng(MixSeed(config_.seed, 2 * static_cast<std::uint64_t>(episode) + 1));
  std::vector<std::vector<DecisionRecord>> decisions(k);
  std::vector<std::vector<double>> step_net(k);
  for (Pending& p : pending_) p = Pending{};

  std::vector<AgentCommand> cmds(k);
  for (int t = 0; t < config_.scenario.episode_length; ++t) {
    std::vector<int> consulted(k, 0);
    for (int i = 0; i < k; ++i) cmds[i] = ChooseCommand(state, i, rng, decisions[i], consulted);
    for (int c : consulted) {
      if (c != 1) ++counters_.inference_violations;
    }
    const StepOutcome outcome = env_.Step(state, cmds);
    const std::vector<double> net = NetRewards(outcome, k);
    for (int i = 0; i < k; ++i) {
      step_net[i].push_back(net[i]);
      record.rewards[i] += outcome.rewards[i];
      record.net_rewards[i] += net[i];
      if (pending_[i].running) pending_[i].net_reward += net[i];
    }
    for (const StepEvent& e : outcome.events) {
      if (events != nullptr) events->push_back(e.ToJson());
      Pending& p = pending_[e.agent];
      switch (e.type) {
        case StepEvent::Type::kFeintStarted:
          ++counters_.feint_started;
          if (!p.running || committed_.empty() ||
              !(committed_.back().feint_value > committed_.back().baseline_value)) {
            ++counters_.commit_rule_violations;
          }
          break;
        case StepEvent::Type::kDbmCompleted:
        case StepEvent::Type::kInterrupted:
          if (!p.running || e.detail != p.chosen) break;
          ++counters_.completed_dbms;
          ++(e.type == StepEvent::Type::kDbmCompleted ? record.dbm_success
                                                      : record.dbm_failure);
          if (learn) {
            policies_[e.agent].feint.Update(p.candidates, p.chosen, p.net_reward);
            ++counters_.feint_updates;
          }
          p.running = false;
          break;
        case StepEvent::Type::kIllegalAction:
          if (p.running && !state.agents[e.agent].plan) p.running = false;
          break;
        default:
          break;
      }
    }
    ++counters_.steps;
  }

  if (learn) {
    for (int i = 0; i < k; ++i) {
      std::vector<double> ret(step_net[i].size() + 1, 0.0);
      for (std::size_t t = step_net[i].size(); t > 0; --t) {
        ret[t - 1] = step_net[i][t - 1] + config_.harness.gamma * ret[t];
      }
      for (DecisionRecord& d : decisions[i]) d.ret = ret[d.step];
      policies_[i].regular->UpdateEpisode(decisions[i]);
    }
    ++counters_.regular_updates;
  }
  ++counters_.episodes;
  current_record_ = nullptr;
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

TrainingLog Trainer::Train(long episodes) {
  TrainingLog log;
  log.seed = config_.seed;
  log.config_hash = ConfigHash(config_);
  for (int i = 0; i < config_.scenario.agent_count; ++i) {
    log.agent_names.push_back(i < static_cast<int>(config_.scenario.agent_names.size())
                                  ? config_.scenario.agent_names[i]
                                  : "agent" + std::to_string(i));
  }
  const long n = episodes < 0 ? config_.episodes : episodes;
  for (long e = 0; e < n; ++e) log.rows.push_back(RunEpisode(next_episode_++, true));
  return log;
}

PolicySnapshot Trainer::Snapshot(int agent, std::string id) const {
  const AgentPolicies& p = policies_.at(agent);
  return {std::move(id), std::shared_ptr<const PolicyLearner>(p.regular->Clone()), p.feint,
          p.feint_enabled};
}

void Trainer::LoadSnapshot(int agent, const PolicySnapshot& snap) {
  AgentPolicies& p = policies_.at(agent);
  p.regular = std::shared_ptr<PolicyLearner>(snap.regular->Clone());
  p.feint = snap.feint;
  p.feint_enabled = snap.feint_enabled;
}

json SnapshotToJson(const PolicySnapshot& snap) {
  return json{{"id", snap.id},
              {"feint_enabled", snap.feint_enabled},
              {"regular", snap.regular->ToJson()},
              {"feint", snap.feint.ToJson()}};
}

PolicySnapshot SnapshotFromJson(const json& j) {
  PolicySnapshot s;
  try {
    s.id = j.at("id").get<std::string>();
    s.feint_enabled = j.at("feint_enabled").get<bool>();
    const json& r = j.at("regular");
    const std::string learner = r.at("learner").get<std::string>();
    if (learner != "actor-critic") {
      Fail(ErrorCode::kConfig, "unknown learner '" + learner + "'");
    }
    s.regular = std::make_shared<SoftmaxActorCritic>(SoftmaxActorCritic::FromJson(r));
    s.feint = FeintPolicy::FromJson(j.at("feint"));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("snapshot: ") + e.what());
  }
  return s;
}

double EvaluatePair(const ExperimentConfig& config, std::shared_ptr<const Catalog> catalog,
                    const PolicySnapshot& row, const PolicySnapshot& col, int episodes,
                    std::uint64_t seed) {
  if (episodes < 1) Fail(ErrorCode::kInvalidArgument, "episodes must be >= 1");
  ExperimentConfig c = config;
  c.seed = seed;
  c.feint_agents.clear();
  Trainer trainer(c, std::move(catalog));
  const int k = c.scenario.agent_count;
  const int team = c.scenario.teams[0];
  for (int i = 0; i < k; ++i) {
    trainer.LoadSnapshot(i, c.scenario.teams[i] == team ? row : col);
  }
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) total += trainer.RunEpisode(e, false).net_rewards[0];
  return total / episodes;
}

}  // namespace feint
