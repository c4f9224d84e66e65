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
#include <string>
#include <vector>

#include "doctest.h"
#include "feint/dual_behavior.h"
#include "feint/error.h"
#include "feint/feint_generator.h"
#include "oracles.h"

namespace feint {
namespace {

using nlohmann::json;

// Straight-line behavior over explicit ids; consecutive actions chain
// through states 0, 1, 2, ...
json Linear(const std::string& id, const std::vector<std::string>& ids, int stretch,
            int reward_end, std::vector<int> states = {}) {
  if (states.empty()) {
    for (std::size_t k = 0; k <= ids.size(); ++k) states.push_back(static_cast<int>(k));
  }
  auto state = [](int s) {
    return json{{"joints", {{0.1 * s, 0.0, 0.0}}}, {"footing", "Neutral"}};
  };
  json actions = json::array();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    actions.push_back(
        {{"id", ids[k]}, {"start_state", state(states[k])}, {"end_state", state(states[k + 1])}});
  }
  return {{"id", id},         {"name", id},           {"kind", "attack"},
          {"direction", "Mid"}, {"reward_value", 1.0}, {"stretch_end", stretch},
          {"reward_end", reward_end}, {"actions", actions}};
}

Catalog Make(std::vector<json> behaviors) {
  return CatalogFromJson({{"epsilon_state", 0.01}, {"joint_count", 1}, {"behaviors", behaviors}});
}

std::vector<std::string> Rendered(const TemplateSet& set) {
  std::vector<std::string> out;
  for (const FeintTemplate& t : set.templates) out.push_back(oracle::Render(t));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Rendered(const std::vector<DualBehaviorModel>& dbms) {
  std::vector<std::string> out;
  for (const DualBehaviorModel& d : dbms) out.push_back(oracle::Render(d));
  std::sort(out.begin(), out.end());
  return out;
}

TEST_CASE("reflect swaps and reverses") {
  const Catalog cat = Make({Linear("b", {"a", "b", "c"}, 2, 3)});
  const Behavior& b = cat.behavior("b");
  const std::vector<UnitAction> seq(b.actions.begin(), b.actions.begin() + 2);
  const std::vector<UnitAction> r = ReflectActions(seq);
  REQUIRE(r.size() == 2);
  CHECK(r[0].start_state == seq[1].end_state);
  CHECK(r[0].end_state == seq[1].start_state);
  CHECK(r[1].end_state == seq[0].start_state);
  CHECK(ReflectActions(r) == seq);
  CHECK_THROWS_AS(ReflectActions(std::vector<UnitAction>{}), Error);
}

TEST_CASE("prefix palindrome") {
  const Catalog cat = Make({Linear("b", {"a1", "a2", "x", "r"}, 2, 3)});
  const FeintBehavior f = GeneratePrefixPalindrome(cat.behavior("b"), 2);
  CHECK(f.length() == 4);
  CHECK(f.actions[0].action.id == "a1");
  CHECK(f.actions[1].action.id == "a2");
  CHECK(f.actions[2].reflected);
  CHECK(f.actions[3].index == 0);
  const std::vector<PhysicalState> traj = f.Trajectory();
  CHECK(traj.front() == traj.back());
  CHECK_THROWS_AS(GeneratePrefixPalindrome(cat.behavior("b"), 3), Error);
  CHECK_THROWS_AS(GeneratePrefixPalindrome(cat.behavior("b"), 0), Error);
}

TEST_CASE("suffix palindrome") {
  const Catalog cat = Make({Linear("b", {"a1", "x", "r1", "r2"}, 1, 2)});
  const FeintBehavior f = GenerateSuffixPalindrome(cat.behavior("b"), 2);
  CHECK(f.length() == 4);
  CHECK(f.actions[0].reflected);
  CHECK(f.actions[0].index == 3);
  CHECK(f.actions[2].action.id == "r1");
  CHECK(f.Trajectory().front() == f.Trajectory().back());
  CHECK_THROWS_AS(GenerateSuffixPalindrome(cat.behavior("b"), 1), Error);
  CHECK_THROWS_AS(GenerateSuffixPalindrome(cat.behavior("b"), 4), Error);
}

TEST_CASE("splice") {
  // bi: 0->1->2->3 with Sequence 1 = [p0, p1]; bj: 0->5->2->0 shares state 2
  // at the start of its Sequence 3.
  const Catalog cat = Make({Linear("bi", {"p0", "p1", "px"}, 2, 3),
                            Linear("bj", {"q0", "qx", "q2"}, 1, 2, {0, 5, 2, 0})});
  const FeintBehavior f =
      GenerateSplice(cat.behavior("bi"), cat.behavior("bj"), 2, 2, cat.epsilon_state());
  CHECK(f.length() == 2 + (3 - 2));
  CHECK(f.actions.back().action.id == "q2");
  CHECK_THROWS_WITH_AS(
      GenerateSplice(cat.behavior("bi"), cat.behavior("bj"), 1, 2, cat.epsilon_state()),
      doctest::Contains("differ"), Error);
  CHECK_THROWS_AS(
      GenerateSplice(cat.behavior("bi"), cat.behavior("bj"), 2, 1, cat.epsilon_state()), Error);
  CHECK_THROWS_AS(
      GenerateSplice(cat.behavior("bi"), cat.behavior("bj"), 3, 2, cat.epsilon_state()), Error);
}

TEST_CASE("templates: shared middle action") {
  // B1 = [a, b, c], B2 = [x, b, y].
  const Catalog cat = Make({Linear("B1", {"a", "b", "c"}, 1, 2, {0, 1, 2, 3}),
                            Linear("B2", {"x", "b", "y"}, 1, 2, {5, 1, 2, 4})});
  const TemplateSet set = PrecomputeTemplates(cat);
  std::vector<const FeintTemplate*> cross;
  for (const FeintTemplate& t : set.templates) {
    if (t.behavior_i == "B1" && t.behavior_j == "B2") cross.push_back(&t);
  }
  REQUIRE(cross.size() == 1);
  CHECK(cross[0]->junction_i == "b");
  CHECK(cross[0]->avail_prefix == std::vector<std::string>{"a"});
  CHECK(cross[0]->avail_suffix == std::vector<std::string>{"y"});
}

TEST_CASE("templates: shared first action gives empty prefixes") {
  const Catalog cat = Make({Linear("B1", {"a0", "b"}, 1, 2, {0, 1, 2}),
                            Linear("B2", {"a0", "c"}, 1, 2, {0, 1, 3}),
                            Linear("B3", {"a0", "d"}, 1, 2, {0, 1, 4})});
  const TemplateSet set = PrecomputeTemplates(cat);
  int at_first = 0;
  for (const FeintTemplate& t : set.templates) {
    if (t.junction_i != "a0") continue;
    ++at_first;
    CHECK(t.avail_prefix.empty());
  }
  CHECK(at_first == 9);  // 3 x 3 ordered pairs
  CHECK(set.templates.size() == 12);  // plus each self-pair at its second action
}

TEST_CASE("templates are independent of behavior order and repeatable") {
  const json j = oracle::RandomCatalogJson(11);
  json reversed = j;
  std::reverse(reversed["behaviors"].begin(), reversed["behaviors"].end());
  const Catalog a = CatalogFromJson(j);
  const Catalog b = CatalogFromJson(reversed);
  for (auto p : {CommonActionPredicate::kIdentity, CommonActionPredicate::kSimilarState}) {
    CHECK(PrecomputeTemplates(a, p) == PrecomputeTemplates(b, p));
    CHECK(TemplateSetToJson(PrecomputeTemplates(a, p)).dump() ==
          TemplateSetToJson(PrecomputeTemplates(a, p)).dump());
  }
}

TEST_CASE("template json round trip") {
  const Catalog cat = oracle::RandomCatalog(5);
  const TemplateSet set = PrecomputeTemplates(cat, CommonActionPredicate::kSimilarState);
  CHECK(TemplateSetFromJson(TemplateSetToJson(set)) == set);
}

TEST_CASE("templates and DBMs match brute-force enumeration on random catalogs") {
  long dbm_total = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Catalog cat = oracle::RandomCatalog(seed);
    for (bool similar : {false, true}) {
      CAPTURE(seed);
      CAPTURE(similar);
      const TemplateSet set = PrecomputeTemplates(
          cat, similar ? CommonActionPredicate::kSimilarState : CommonActionPredicate::kIdentity);
      REQUIRE(Rendered(set) == oracle::Templates(cat, similar));
      for (const std::string& a_t : oracle::ActionIds(cat)) {
        for (const std::string& a_target : oracle::ActionIds(cat)) {
          const std::vector<DualBehaviorModel> dbms = ComposeDbms(a_t, a_target, set, cat);
          REQUIRE(Rendered(dbms) == oracle::Dbms(cat, similar, a_t, a_target));
          dbm_total += static_cast<long>(dbms.size());
        }
      }
    }
  }
  CHECK(dbm_total > 0);
}

TEST_CASE("compose: unknown actions and no match") {
  const Catalog cat = Make({Linear("B1", {"a", "b", "c", "d"}, 2, 3)});
  const TemplateSet set = PrecomputeTemplates(cat);
  CHECK_THROWS_AS(ComposeDbms("nope", "c", set, cat), Error);
  CHECK_THROWS_AS(ComposeDbms("a", "nope", set, cat), Error);
  CHECK(ComposeDbms("d", "c", set, cat).empty());
}

TEST_CASE("compose: two overlapping behaviors give one DBM each") {
  // Both share j0 then diverge into their own Reward Sequence ending in t.
  const Catalog cat = Make({Linear("B1", {"a", "j0", "s1", "t"}, 2, 4),
                            Linear("B2", {"a", "j0", "s2", "t"}, 2, 4)});
  const TemplateSet set = PrecomputeTemplates(cat);
  std::vector<DualBehaviorModel> dbms = ComposeDbms("a", "t", set, cat);
  std::vector<std::string> targets;
  for (const DualBehaviorModel& d : dbms) {
    CHECK(CheckDbm(d, cat).empty());
    if (d.feint.behavior_i == "B1" && d.junction == "j0") targets.push_back(d.target_behavior_id);
  }
  // Junction j0 is shared by both behaviors, so t is reachable through two
  // templates.
  std::sort(targets.begin(), targets.end());
  CHECK(targets == std::vector<std::string>{"B1", "B2"});
}

TEST_CASE("backward search selections") {
  const Catalog cat = Make({Linear("B1", {"a", "b", "c", "d"}, 3, 4)});
  const TemplateSet set = PrecomputeTemplates(cat);
  const std::vector<BackwardSelection> sel = BackwardSearch("a", "d", set);
  // Junctions b and c (index 1 and 2) both have a before and d after.
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].junction == "b");
  CHECK(sel[0].select_i == std::vector<std::string>{"a"});
  CHECK(sel[0].select_j == std::vector<std::string>{"c", "d"});
  CHECK(sel[1].select_i == std::vector<std::string>{"a", "b"});
  CHECK(BackwardSearch("d", "a", set).empty());
}

TEST_CASE("generated feints: palindrome symmetry, no reward leak, continuity") {
  long checked = 0;
  long palindromes = 0;
  for (std::uint64_t seed = 100; checked < 1000; ++seed) {
    const Catalog cat = oracle::RandomCatalog(seed);
    const double eps = cat.epsilon_state();
    for (const FeintBehavior& f : EnumerateFeintBehaviors(cat)) {
      ++checked;
      for (const SourcedAction& a : f.actions) CHECK_FALSE(IsRewardStep(a, cat));
      const std::vector<PhysicalState> traj = f.Trajectory();
      for (std::size_t k = 0; k + 1 < f.actions.size(); ++k) {
        CHECK(oracle::Distance(f.actions[k].action.end_state, f.actions[k + 1].action.start_state,
                               eps) <= eps);
      }
      if (f.variant == TemplateVariant::kSpliceSimilar) continue;
      ++palindromes;
      CHECK(oracle::Distance(traj.front(), traj.back(), eps) == 0.0);
      for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(oracle::Distance(traj[k], traj[traj.size() - 1 - k], eps) <= eps);
      }
    }
    const TemplateSet set = PrecomputeTemplates(cat, CommonActionPredicate::kSimilarState);
    for (const std::string& a_t : oracle::ActionIds(cat)) {
      for (const std::string& a_target : oracle::ActionIds(cat)) {
        for (const DualBehaviorModel& d : ComposeDbms(a_t, a_target, set, cat)) {
          CHECK(CheckDbm(d, cat).empty());
          const std::vector<SourcedAction> all = d.Actions();
          for (std::size_t k = 0; k + 1 < all.size(); ++k) {
            CHECK(oracle::Distance(all[k].action.end_state, all[k + 1].action.start_state, eps) <=
                  eps);
          }
        }
      }
    }
  }
  CHECK(palindromes > 0);
}

TEST_CASE("timing classes") {
  CHECK(ClassifyTiming(5, 6, 10) == TimingClass::kTooShort);
  CHECK(ClassifyTiming(6, 6, 10) == TimingClass::kProper);
  CHECK(ClassifyTiming(7, 6, 10) == TimingClass::kProper);
  CHECK(ClassifyTiming(10, 6, 10) == TimingClass::kTooLong);
  CHECK(ClassifyTiming(11, 6, 10) == TimingClass::kTooLong);
  CHECK_THROWS_AS(ClassifyTiming(5, 6, 6), Error);
  CHECK(TimingClassName(TimingClass::kProper) == "Proper");
}

}  // namespace
}  // namespace feint
