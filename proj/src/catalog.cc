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

#include "feint/catalog.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "feint/error.h"

namespace feint {

using nlohmann::json;

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kDimension: return "DimensionError";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kCutOutOfRange: return "CutOutOfRange";
    case ErrorCode::kNotSimilar: return "NotSimilar";
    case ErrorCode::kRewardLeak: return "RewardLeak";
    case ErrorCode::kUnknownAction: return "UnknownAction";
    case ErrorCode::kInvalidWindow: return "InvalidWindow";
    case ErrorCode::kWindowMismatch: return "WindowMismatch";
    case ErrorCode::kUnsupportedState: return "UnsupportedState";
    case ErrorCode::kEvaluationFailure: return "EvaluationFailure";
    case ErrorCode::kUnboundedGame: return "UnboundedGame";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kUnknownAgent: return "UnknownAgent";
    case ErrorCode::kIllegalAction: return "IllegalAction";
    case ErrorCode::kSnapshotFailure: return "SnapshotFailure";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

std::string_view FootingName(Footing footing) {
  switch (footing) {
    case Footing::kLeftForward: return "LeftForward";
    case Footing::kRightForward: return "RightForward";
    case Footing::kNeutral: return "Neutral";
  }
  return "Neutral";
}

Footing FootingFromName(std::string_view name) {
  if (name == "LeftForward") return Footing::kLeftForward;
  if (name == "RightForward") return Footing::kRightForward;
  if (name == "Neutral") return Footing::kNeutral;
  Fail(ErrorCode::kParse, "unknown footing '" + std::string(name) + "'");
}

std::string_view DirectionName(Direction direction) {
  switch (direction) {
    case Direction::kHigh: return "High";
    case Direction::kMid: return "Mid";
    case Direction::kLow: return "Low";
  }
  return "Mid";
}

Direction DirectionFromName(std::string_view name) {
  if (name == "High") return Direction::kHigh;
  if (name == "Mid") return Direction::kMid;
  if (name == "Low") return Direction::kLow;
  Fail(ErrorCode::kParse, "unknown direction '" + std::string(name) + "'");
}

double StateDistance(const PhysicalState& a, const PhysicalState& b,
                     double epsilon_state) {
  if (a.joints.size() != b.joints.size()) {
    Fail(ErrorCode::kDimension,
         "joint count mismatch: " + std::to_string(a.joints.size()) + " vs " +
             std::to_string(b.joints.size()));
  }
  double d = 0.0;
  for (std::size_t j = 0; j < a.joints.size(); ++j) {
    for (std::size_t c = 0; c < 3; ++c) {
      d = std::max(d, std::abs(a.joints[j][c] - b.joints[j][c]));
    }
  }
  if (a.footing != b.footing) d += 2.0 * epsilon_state;
  return d;
}

std::size_t ValidationReport::Count(Violation::Kind kind) const {
  return std::count_if(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::Summary() const {
  std::ostringstream out;
  out << "behavior '" << behavior_id << "'";
  for (const Violation& v : violations) out << "; " << v.message;
  return out.str();
}

namespace {

bool StateInRange(const PhysicalState& s) {
  for (const Joint& joint : s.joints) {
    for (double x : joint) {
      if (!std::isfinite(x) || x < -1.0 || x > 1.0) return false;
    }
  }
  return true;
}

}  // namespace

ValidationReport ValidateBehavior(const Behavior& b, double epsilon_state,
                                  std::size_t joint_count) {
  ValidationReport report{b.id, {}};
  auto add = [&](Violation::Kind kind, std::size_t index, std::string msg) {
    report.violations.push_back({kind, index, std::move(msg)});
  };
  const std::size_t n = b.actions.size();
  if (!(b.stretch_end > 0 && b.stretch_end <= b.reward_end &&
        b.reward_end <= n)) {
    add(Violation::Kind::kPartition, 0,
        "partition requires 0 < stretch_end <= reward_end <= |actions| (got " +
            std::to_string(b.stretch_end) + ", " +
            std::to_string(b.reward_end) + ", " + std::to_string(n) + ")");
  }
  if (!std::isfinite(b.reward_value) || b.reward_value < 0.0) {
    add(Violation::Kind::kPartition, 0, "reward_value must be >= 0");
  }
  bool dims_ok = true;
  for (std::size_t k = 0; k < n; ++k) {
    const UnitAction& a = b.actions[k];
    for (const PhysicalState* s : {&a.start_state, &a.end_state}) {
      if (s->joints.size() != joint_count) {
        dims_ok = false;
        add(Violation::Kind::kDimension, k,
            "action '" + a.id + "' has " + std::to_string(s->joints.size()) +
                " joints, expected " + std::to_string(joint_count));
      } else if (!StateInRange(*s)) {
        add(Violation::Kind::kState, k,
            "action '" + a.id + "' has a coordinate outside [-1, 1]");
      }
    }
  }
  if (!dims_ok) return report;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d = StateDistance(b.actions[k].end_state,
                                   b.actions[k + 1].start_state, epsilon_state);
    if (d > epsilon_state) {
      std::ostringstream msg;
      msg << "discontinuity between actions " << k << " and " << k + 1
          << " (distance " << d << " > " << epsilon_state << ")";
      add(Violation::Kind::kContinuity, k, msg.str());
    }
  }
  return report;
}

ValidationReport ValidateBehavior(const Behavior& b, const Catalog& cat) {
  return ValidateBehavior(b, cat.epsilon_state(), cat.joint_count());
}

Catalog::Catalog(double epsilon_state, std::size_t joint_count,
                 std::vector<Behavior> behaviors)
    : epsilon_state_(epsilon_state),
      joint_count_(joint_count),
      behaviors_(std::move(behaviors)) {
  if (!(epsilon_state_ > 0.0) || !std::isfinite(epsilon_state_)) {
    Fail(ErrorCode::kValidation, "epsilon_state must be > 0");
  }
  if (joint_count_ == 0) Fail(ErrorCode::kValidation, "joint_count must be > 0");
  for (std::size_t i = 0; i < behaviors_.size(); ++i) {
    const Behavior& b = behaviors_[i];
    if (!behavior_index_.emplace(b.id, i).second) {
      Fail(ErrorCode::kValidation, "duplicate behavior id '" + b.id + "'");
    }
    ValidationReport report = ValidateBehavior(b, *this);
    if (report.Count(Violation::Kind::kDimension) > 0) {
      Fail(ErrorCode::kDimension, report.Summary());
    }
    if (!report.ok()) Fail(ErrorCode::kValidation, report.Summary());
    for (const UnitAction& a : b.actions) {
      auto [it, inserted] = actions_.emplace(a.id, a);
      // A shared id denotes the same unit action in several behaviors.
      if (!inserted && !(it->second == a)) {
        Fail(ErrorCode::kValidation,
             "behavior '" + b.id + "': action id '" + a.id +
                 "' reused with different states");
      }
    }
  }
}

const Behavior* Catalog::FindBehavior(std::string_view id) const {
  auto it = behavior_index_.find(id);
  return it == behavior_index_.end() ? nullptr : &behaviors_[it->second];
}

const Behavior& Catalog::behavior(std::string_view id) const {
  const Behavior* b = FindBehavior(id);
  if (b == nullptr) {
    Fail(ErrorCode::kUnknownAction, "unknown behavior '" + std::string(id) + "'");
  }
  return *b;
}

const UnitAction* Catalog::FindAction(std::string_view id) const {
  auto it = actions_.find(id);
  return it == actions_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// JSON schema.

namespace {

void RejectUnknownFields(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!obj.is_object()) Fail(ErrorCode::kParse, where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known) Fail(ErrorCode::kParse, where + ": unknown field '" + key + "'");
  }
}

const json& Require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    Fail(ErrorCode::kParse, where + ": missing field '" + key + "'");
  }
  return *it;
}

template <typename T>
T RequireAs(const json& obj, const char* key, const std::string& where) {
  const json& v = Require(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, where + "." + key + ": " + e.what());
  }
}

PhysicalState StateFromJson(const json& j, const std::string& where) {
  RejectUnknownFields(j, {"joints", "footing"}, where);
  PhysicalState s;
  const json& joints = Require(j, "joints", where);
  if (!joints.is_array()) Fail(ErrorCode::kParse, where + ".joints: expected array");
  for (const json& joint : joints) {
    if (!joint.is_array() || joint.size() != 3) {
      Fail(ErrorCode::kParse, where + ".joints: each joint must be [x, y, theta]");
    }
    Joint q{};
    for (std::size_t c = 0; c < 3; ++c) {
      if (!joint[c].is_number()) {
        Fail(ErrorCode::kParse, where + ".joints: non-numeric coordinate");
      }
      q[c] = joint[c].get<double>();
    }
    s.joints.push_back(q);
  }
  s.footing = FootingFromName(RequireAs<std::string>(j, "footing", where));
  return s;
}

}  // namespace

nlohmann::json StateToJson(const PhysicalState& s) {
  json joints = json::array();
  for (const Joint& q : s.joints) joints.push_back({q[0], q[1], q[2]});
  return json{{"joints", joints}, {"footing", FootingName(s.footing)}};
}

Catalog CatalogFromJson(const json& j) {
  RejectUnknownFields(j, {"epsilon_state", "joint_count", "behaviors"}, "catalog");
  const double eps = RequireAs<double>(j, "epsilon_state", "catalog");
  const auto joint_count = RequireAs<std::size_t>(j, "joint_count", "catalog");
  const json& list = Require(j, "behaviors", "catalog");
  if (!list.is_array()) Fail(ErrorCode::kParse, "catalog.behaviors: expected array");
  std::vector<Behavior> behaviors;
  for (const json& jb : list) {
    const std::string where = "behavior";
    RejectUnknownFields(jb,
                        {"id", "name", "reward_value", "stretch_end",
                         "reward_end", "actions", "kind", "direction"},
                        where);
    Behavior b;
    b.id = RequireAs<std::string>(jb, "id", where);
    const std::string bwhere = "behavior '" + b.id + "'";
    b.name = RequireAs<std::string>(jb, "name", bwhere);
    b.reward_value = RequireAs<double>(jb, "reward_value", bwhere);
    b.stretch_end = RequireAs<std::size_t>(jb, "stretch_end", bwhere);
    b.reward_end = RequireAs<std::size_t>(jb, "reward_end", bwhere);
    if (auto it = jb.find("kind"); it != jb.end()) {
      const std::string kind = it->get<std::string>();
      if (kind == "attack") {
        b.kind = BehaviorKind::kAttack;
      } else if (kind == "defend") {
        b.kind = BehaviorKind::kDefend;
      } else {
        Fail(ErrorCode::kParse, bwhere + ": unknown kind '" + kind + "'");
      }
    }
    if (auto it = jb.find("direction"); it != jb.end()) {
      b.direction = DirectionFromName(it->get<std::string>());
    }
    const json& actions = Require(jb, "actions", bwhere);
    if (!actions.is_array()) Fail(ErrorCode::kParse, bwhere + ".actions: expected array");
    for (const json& ja : actions) {
      RejectUnknownFields(ja, {"id", "start_state", "end_state"}, bwhere + " action");
      UnitAction a;
      a.id = RequireAs<std::string>(ja, "id", bwhere);
      const std::string awhere = bwhere + " action '" + a.id + "'";
      a.start_state = StateFromJson(Require(ja, "start_state", awhere), awhere);
      a.end_state = StateFromJson(Require(ja, "end_state", awhere), awhere);
      b.actions.push_back(std::move(a));
    }
    behaviors.push_back(std::move(b));
  }
  return Catalog(eps, joint_count, std::move(behaviors));
}

json CatalogToJson(const Catalog& cat) {
  json behaviors = json::array();
  for (const Behavior& b : cat.behaviors()) {
    json actions = json::array();
    for (const UnitAction& a : b.actions) {
      actions.push_back({{"id", a.id},
                         {"start_state", StateToJson(a.start_state)},
                         {"end_state", StateToJson(a.end_state)}});
    }
    behaviors.push_back({{"id", b.id},
                         {"name", b.name},
                         {"kind", b.kind == BehaviorKind::kAttack ? "attack" : "defend"},
                         {"direction", DirectionName(b.direction)},
                         {"reward_value", b.reward_value},
                         {"stretch_end", b.stretch_end},
                         {"reward_end", b.reward_end},
                         {"actions", actions}});
  }
  return json{{"epsilon_state", cat.epsilon_state()},
              {"joint_count", cat.joint_count()},
              {"behaviors", behaviors}};
}

Catalog ParseCatalog(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("catalog: ") + e.what());
  }
  return CatalogFromJson(j);
}

Catalog LoadCatalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open catalog '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCatalog(buffer.str());
}

void SaveCatalog(const Catalog& cat, const std::string& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write catalog '" + path + "'");
  out << CatalogToJson(cat).dump(2) << "\n";
}

}  // namespace feint
