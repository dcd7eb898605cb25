#include <doctest.h>

#include <random>

#include "planverify/errors.hpp"
#include "planverify/planner.hpp"

using namespace pv;

namespace {

Plan five_step_plan() {
  return parse_plan("g", {"Driver.A()", "Driver.B()", "Driver.C()", "Driver.D()",
                          "Driver.E()"});
}

CritiqueSet removes_at(const Plan& plan, std::initializer_list<int> indices) {
  CritiqueSet cs;
  for (int i : indices) {
    cs.critiques.push_back(RemoveCritique{i, plan.actions[i - 1].stable_id, "flagged"});
  }
  return normalize_critiques(cs);
}

}  // namespace

TEST_CASE("removals keep order and reindex, matching a brute-force filter") {
  Plan plan = five_step_plan();
  Revision rev = apply_critiques(plan, removes_at(plan, {2, 4}));

  // Independent oracle: filter the list by hand.
  std::vector<std::string> expected;
  for (int i = 0; i < 5; ++i) {
    if (i != 1 && i != 3) expected.push_back(format_action(plan.actions[i]));
  }
  REQUIRE(rev.resulting_plan.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(format_action(rev.resulting_plan.actions[i]) == expected[i]);
    CHECK(rev.resulting_plan.actions[i].index == static_cast<int>(i + 1));
  }
  CHECK(rev.removed.size() == 2);
}

TEST_CASE("an empty critique set is the identity") {
  Plan plan = five_step_plan();
  Revision rev = apply_critiques(plan, CritiqueSet{});
  CHECK(rev.removed.empty());
  CHECK(rev.inserted.empty());
  CHECK(canonical_equal(rev.resulting_plan, plan));
  for (std::size_t i = 0; i < plan.size(); ++i) {
    CHECK(rev.resulting_plan.actions[i].stable_id == plan.actions[i].stable_id);
  }
}

TEST_CASE("a Missing with no inserter is recorded, not applied") {
  Plan plan = five_step_plan();
  CritiqueSet cs;
  cs.critiques.push_back(MissingCritique{"sandwich not assembled", std::nullopt});
  Revision rev = apply_critiques(plan, cs);
  CHECK(canonical_equal(rev.resulting_plan, plan));
  REQUIRE(rev.unresolved.size() == 1);
  CHECK(rev.unresolved[0].description == "sandwich not assembled");
}

TEST_CASE("stale remove critiques are an error") {
  Plan plan = five_step_plan();
  CritiqueSet cs;
  cs.critiques.push_back(RemoveCritique{1, StableId{999}, "ghost"});
  CHECK_THROWS_AS(apply_critiques(plan, cs), StaleCritique);
}

TEST_CASE("size arithmetic holds under mixed removals and insertions") {
  Plan plan = five_step_plan();
  ScriptInserter inserter(std::vector<std::vector<std::string>>{{"Driver.X()", "Driver.Y()"}});
  CritiqueSet cs = removes_at(plan, {1, 5});
  cs.critiques.push_back(MissingCritique{"two more steps", 3});
  Revision rev = apply_critiques(plan, cs, &inserter);
  CHECK(rev.resulting_plan.size() == 5 - 2 + 2);
  CHECK(rev.removed.size() == 2);
  CHECK(rev.inserted.size() == 2);
}

TEST_CASE("survivors preserve their relative order under random removals") {
  std::mt19937_64 rng(4242);
  for (int round = 0; round < 100; ++round) {
    Plan plan = five_step_plan();
    CritiqueSet cs;
    std::vector<StableId> survivors;
    for (const auto& a : plan.actions) {
      if (rng() % 2 == 0) {
        cs.critiques.push_back(RemoveCritique{a.index, a.stable_id, "flagged"});
      } else {
        survivors.push_back(a.stable_id);
      }
    }
    Revision rev = apply_critiques(plan, normalize_critiques(cs));
    std::vector<StableId> kept;
    for (const auto& a : rev.resulting_plan.actions) kept.push_back(a.stable_id);
    CHECK(kept == survivors);
  }
}

TEST_CASE("scripted inserter proposals are parsed and placed") {
  Plan plan = five_step_plan();
  ScriptInserter inserter({{"Driver.Place('Plate')"}});
  auto insertions = resolve_missing(inserter, plan, {"set the plate", std::nullopt});
  REQUIRE(insertions.size() == 1);
  CHECK(insertions[0].first == 6);  // end of a 5-action plan
  CHECK(format_action(insertions[0].second) == "Driver.Place('Plate')");
}

TEST_CASE("two proposed lines at insert_after=3 land at positions 4 and 5") {
  Plan plan = five_step_plan();
  ScriptInserter inserter(std::vector<std::vector<std::string>>{{"Driver.X()", "Driver.Y()"}});
  auto insertions = resolve_missing(inserter, plan, {"two steps", 3});
  REQUIRE(insertions.size() == 2);
  CHECK(insertions[0].first == 4);
  CHECK(insertions[1].first == 5);

  CritiqueSet cs;
  cs.critiques.push_back(MissingCritique{"two steps", 3});
  ScriptInserter again(std::vector<std::vector<std::string>>{{"Driver.X()", "Driver.Y()"}});
  Revision rev = apply_critiques(plan, cs, &again);
  REQUIRE(rev.resulting_plan.size() == 7);
  CHECK(format_action(rev.resulting_plan.actions[3]) == "Driver.X()");
  CHECK(format_action(rev.resulting_plan.actions[4]) == "Driver.Y()");
  // Fresh ids, distinct from the original plan's.
  CHECK(rev.resulting_plan.actions[3].stable_id.value >= plan.next_stable_id);
}

TEST_CASE("a malformed proposal keeps the omission unresolved") {
  Plan plan = five_step_plan();
  ScriptInserter inserter({{"this is not an action"}});
  CHECK_THROWS_AS(resolve_missing(inserter, plan, {"broken", std::nullopt}),
                  InserterParseError);

  CritiqueSet cs;
  cs.critiques.push_back(MissingCritique{"broken", std::nullopt});
  ScriptInserter again({{"this is not an action"}});
  Revision rev = apply_critiques(plan, cs, &again);
  CHECK(canonical_equal(rev.resulting_plan, plan));
  REQUIRE(rev.unresolved.size() == 1);
  CHECK(rev.unresolved[0].note.find("not a valid action") != std::string::npos);
}

TEST_CASE("an empty proposal inserts nothing") {
  Plan plan = five_step_plan();
  ScriptInserter inserter({});
  CritiqueSet cs;
  cs.critiques.push_back(MissingCritique{"nothing to offer", std::nullopt});
  Revision rev = apply_critiques(plan, cs, &inserter);
  CHECK(canonical_equal(rev.resulting_plan, plan));
  CHECK(rev.unresolved.size() == 1);
}

TEST_CASE("insertion anchored on a removed action falls back to the survivor before it") {
  Plan plan = five_step_plan();
  CritiqueSet cs = removes_at(plan, {3});
  cs.critiques.push_back(MissingCritique{"replacement step", 3});
  ScriptInserter inserter({{"Driver.R()"}});
  Revision rev = apply_critiques(plan, cs, &inserter);
  REQUIRE(rev.resulting_plan.size() == 5);
  // A B [R] D E: the anchor C was removed, so R lands after B.
  CHECK(format_action(rev.resulting_plan.actions[2]) == "Driver.R()");
}

TEST_CASE("fresh stable ids never collide with ids retired earlier") {
  Plan plan = five_step_plan();
  Revision removal = apply_critiques(plan, removes_at(plan, {5}));
  CHECK(removal.resulting_plan.next_stable_id == plan.next_stable_id);

  CritiqueSet cs;
  cs.critiques.push_back(MissingCritique{"replace the removed step", std::nullopt});
  ScriptInserter inserter({{"Driver.Z()"}});
  Revision insertion = apply_critiques(removal.resulting_plan, cs, &inserter);
  StableId fresh = insertion.resulting_plan.actions.back().stable_id;
  CHECK(fresh != plan.actions[4].stable_id);
  CHECK(fresh.value >= plan.next_stable_id);
}
