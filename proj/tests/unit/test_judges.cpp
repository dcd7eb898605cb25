#include <doctest.h>

#include "planverify/errors.hpp"
#include "planverify/judges.hpp"
#include "support/fake_transport.hpp"
#include "support/synthesize.hpp"

using namespace pv;
using pv::testing::FakeTransport;

namespace {

int removes_matching(const CritiqueSet& cs, const std::string& needle) {
  int count = 0;
  for (const auto& c : cs.critiques) {
    if (const auto* r = std::get_if<RemoveCritique>(&c)) {
      std::size_t pos = 0;
      while ((pos = r->reason.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
      }
    }
  }
  return count;
}

std::vector<int> remove_indices(const CritiqueSet& cs) {
  std::vector<int> out;
  for (const auto& c : cs.critiques) {
    if (const auto* r = std::get_if<RemoveCritique>(&c)) out.push_back(r->index);
  }
  return out;
}

}  // namespace

TEST_CASE("rule judge flags a premature toggle-off via R3") {
  Plan plan = parse_plan("Heat the soup", {
                                              "Driver.Place('Microwave')",
                                              "Driver.ToggleOff('Microwave')",
                                              "Driver.ToggleOn('Microwave')",
                                          });
  RuleJudge judge;
  CritiqueSet cs = judge.evaluate("Heat the soup", plan);
  auto indices = remove_indices(cs);
  CHECK(std::count(indices.begin(), indices.end(), 2) == 1);
  CHECK(removes_matching(cs, "R3:") == 1);
  CHECK(removes_matching(cs, "R2:") == 2);  // the adjacent pair flags both
}

TEST_CASE("rule judge flags an orphan pickup via R4") {
  Plan plan = parse_plan("Cook", {
                                     "Driver.PickUp('RemoteControl')",
                                     "Driver.PickUp('Pan')",
                                     "Driver.Place('Pan')",
                                 });
  RuleJudge judge;
  CritiqueSet cs = judge.evaluate("Cook", plan);
  auto indices = remove_indices(cs);
  REQUIRE(indices.size() == 1);
  CHECK(indices[0] == 1);
  CHECK(removes_matching(cs, "R4:") == 1);
}

TEST_CASE("rule judge flags adjacent duplicates via R1") {
  Plan plan = parse_plan("g", {"Driver.Slice('Tomato')", "Driver.Slice('Tomato')",
                               "Driver.Place('Tomato')"});
  RuleJudge judge;
  CritiqueSet cs = judge.evaluate("g", plan);
  CHECK(removes_matching(cs, "R1:") == 1);
  CHECK(remove_indices(cs) == std::vector<int>{2});
}

TEST_CASE("rule judge is silent on a clean plan") {
  Plan plan = parse_plan("Water the plant", {
                                                "Driver.PickUp('WateringCan')",
                                                "Driver.Fill('WateringCan')",
                                                "Driver.Pour('WateringCan')",
                                            });
  RuleJudge judge;
  CHECK(judge.evaluate("Water the plant", plan).empty());
}

TEST_CASE("rule judge never emits Missing and stays in range") {
  Plan plan = parse_plan("g", {"Driver.ToggleOff('X')", "Driver.PickUp('Y')"});
  RuleJudge judge;
  CritiqueSet cs = judge.evaluate("g", plan);
  for (const auto& c : cs.critiques) {
    REQUIRE(std::holds_alternative<RemoveCritique>(c));
    int idx = std::get<RemoveCritique>(c).index;
    CHECK(idx >= 1);
    CHECK(idx <= 2);
  }
}

TEST_CASE("rule judge is deterministic across repeated calls") {
  Plan plan = parse_plan("g", {"Driver.ToggleOff('A')", "Driver.ToggleOn('A')",
                               "Driver.PickUp('B')", "Driver.PickUp('B')"});
  RuleJudge judge;
  CritiqueSet a = judge.evaluate("g", plan);
  CritiqueSet b = judge.evaluate("g", plan);
  REQUIRE(a.critiques.size() == b.critiques.size());
  for (std::size_t i = 0; i < a.critiques.size(); ++i) {
    const auto& ra = std::get<RemoveCritique>(a.critiques[i]);
    const auto& rb = std::get<RemoveCritique>(b.critiques[i]);
    CHECK(ra.index == rb.index);
    CHECK(ra.reason == rb.reason);
  }
}

TEST_CASE("script judge replays steps then returns empty sets") {
  Plan plan = parse_plan("g", {"Driver.A()", "Driver.B()", "Driver.C()"});
  ScriptStep s1;
  s1.removes.push_back({2, std::nullopt, "scripted"});
  ScriptStep s2;
  s2.missings.push_back({"do the thing", std::nullopt});
  ScriptJudge judge({s1, s2});

  CritiqueSet c1 = judge.evaluate("g", plan);
  REQUIRE(c1.critiques.size() == 1);
  CHECK(std::get<RemoveCritique>(c1.critiques[0]).index == 2);
  CHECK(std::get<RemoveCritique>(c1.critiques[0]).stable_id == plan.actions[1].stable_id);

  CritiqueSet c2 = judge.evaluate("g", plan);
  CHECK(std::get<MissingCritique>(c2.critiques[0]).description == "do the thing");

  CHECK(judge.evaluate("g", plan).empty());
  CHECK(judge.evaluate("g", plan).empty());
  CHECK(judge.calls() == 4);
}

TEST_CASE("strict script judge objects to extra calls") {
  Plan plan = parse_plan("g", {"Driver.A()"});
  ScriptJudge judge({ScriptStep{}}, /*strict=*/true);
  CHECK(judge.evaluate("g", plan).empty());
  CHECK_THROWS_AS(judge.evaluate("g", plan), ScriptIndexError);
}

TEST_CASE("script judge validates indices against the current plan") {
  Plan plan = parse_plan("g", {"Driver.A()"});
  ScriptStep bad;
  bad.removes.push_back({5, std::nullopt, "out of range"});
  ScriptJudge judge({bad});
  CHECK_THROWS_AS(judge.evaluate("g", plan), ScriptIndexError);
}

TEST_CASE("script judge can address actions by stable id across rounds") {
  Plan plan = parse_plan("g", {"Driver.A()", "Driver.B()", "Driver.C()"});
  ScriptStep step;
  step.removes.push_back({std::nullopt, plan.actions[2].stable_id, "by id"});
  ScriptJudge judge({step});
  CritiqueSet cs = judge.evaluate("g", plan);
  REQUIRE(cs.critiques.size() == 1);
  CHECK(std::get<RemoveCritique>(cs.critiques[0]).index == 3);
}

TEST_CASE("truth_script flags exactly the annotation") {
  Episode ep;
  ep.episode_id = "e";
  ep.initial_plan = parse_plan("g", {"Driver.A()", "Driver.B()", "Driver.C()"});
  ErrorAnnotation ann;
  ann.remove_ids = {ep.initial_plan.actions[0].stable_id, ep.initial_plan.actions[2].stable_id};
  ann.missing_steps.push_back({"Place", "Plate", ""});
  ep.annotations = ann;

  auto steps = truth_script(ep);
  REQUIRE(steps.size() == 1);
  ScriptJudge judge(steps, false, "oracle");
  CritiqueSet cs = judge.evaluate("g", ep.initial_plan);
  CHECK(remove_indices(cs) == std::vector<int>{1, 3});
  bool has_missing = false;
  for (const auto& c : cs.critiques) {
    if (const auto* m = std::get_if<MissingCritique>(&c)) {
      has_missing = true;
      CHECK(m->description.find("Place") != std::string::npos);
      CHECK(m->description.find("Plate") != std::string::npos);
    }
  }
  CHECK(has_missing);
  CHECK(judge.evaluate("g", ep.initial_plan).empty());

  Episode clean;
  clean.episode_id = "c";
  clean.initial_plan = parse_plan("g", {"Driver.A()"});
  CHECK(truth_script(clean).empty());
}

TEST_CASE("llm judge parses a scripted reply end to end") {
  Plan plan = parse_plan("Make coffee", {"Driver.PickUp('Mug')", "Driver.Pour('Mug')"});
  CritiqueSet expected;
  expected.critiques.push_back(RemoveCritique{2, plan.actions[1].stable_id, "premature pour"});
  auto transport = std::make_shared<FakeTransport>(std::vector<FakeTransport::Step>{
      FakeTransport::reply(testing::synthesize_reply(plan, expected))});

  LlmJudgeOptions options;
  options.endpoint = "http://example.invalid";
  options.model = "fake-model";
  options.retry.backoff_base_ms = 0;
  LlmJudge judge(options, transport);
  CHECK(judge.identity() == "llm:fake-model");

  CritiqueSet cs = judge.evaluate("Make coffee", plan);
  REQUIRE(cs.critiques.size() == 1);
  CHECK(std::get<RemoveCritique>(cs.critiques[0]).index == 2);
  CHECK(std::get<RemoveCritique>(cs.critiques[0]).reason == "premature pour");
  CHECK_FALSE(cs.fail_open);
  CHECK(transport->calls() == 1);
}

TEST_CASE("llm judge re-prompts once on malformed output then fails open") {
  Plan plan = parse_plan("g", {"Driver.A()"});
  auto transport = std::make_shared<FakeTransport>(std::vector<FakeTransport::Step>{
      FakeTransport::reply("total nonsense, no tags"),
      FakeTransport::reply("still nonsense")});

  LlmJudgeOptions options;
  options.endpoint = "http://example.invalid";
  options.model = "fake";
  options.retry.backoff_base_ms = 0;
  LlmJudge judge(options, transport);

  CritiqueSet cs = judge.evaluate("g", plan);
  CHECK(cs.empty());
  CHECK(cs.fail_open);
  CHECK(transport->calls() == 2);
  REQUIRE_FALSE(cs.warnings.empty());
  CHECK(cs.warnings[0].find("fail-open") != std::string::npos);
}

TEST_CASE("llm judge recovers when the re-prompt parses") {
  Plan plan = parse_plan("g", {"Driver.A()"});
  CritiqueSet expected;
  expected.critiques.push_back(RemoveCritique{1, plan.actions[0].stable_id, "bad step"});
  auto transport = std::make_shared<FakeTransport>(std::vector<FakeTransport::Step>{
      FakeTransport::reply("oops"),
      FakeTransport::reply(testing::synthesize_reply(plan, expected))});

  LlmJudgeOptions options;
  options.endpoint = "http://example.invalid";
  options.model = "fake";
  options.retry.backoff_base_ms = 0;
  LlmJudge judge(options, transport);

  CritiqueSet cs = judge.evaluate("g", plan);
  REQUIRE(cs.critiques.size() == 1);
  CHECK_FALSE(cs.fail_open);
  CHECK(transport->calls() == 2);
}

TEST_CASE("llm judge with a warm cache issues zero transport calls") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "pv-judge-cache-test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cache = std::make_shared<ChatCache>(dir / "cache.jsonl");

  Plan plan = parse_plan("g", {"Driver.A()", "Driver.B()"});
  CritiqueSet expected;
  expected.critiques.push_back(RemoveCritique{1, plan.actions[0].stable_id, "first is wrong"});
  std::string reply = testing::synthesize_reply(plan, expected);

  LlmJudgeOptions options;
  options.endpoint = "http://example.invalid";
  options.model = "fake";
  options.retry.backoff_base_ms = 0;

  auto warm_transport = std::make_shared<FakeTransport>(
      std::vector<FakeTransport::Step>{FakeTransport::reply(reply)});
  LlmJudge warm(options, warm_transport, cache);
  CritiqueSet first = warm.evaluate("g", plan);
  CHECK(warm_transport->calls() == 1);

  auto cold_transport = std::make_shared<FakeTransport>(
      std::vector<FakeTransport::Step>{FakeTransport::reply("never used")});
  LlmJudge cached(options, cold_transport, cache);
  CritiqueSet second = cached.evaluate("g", plan);
  CHECK(cold_transport->calls() == 0);
  CHECK(second.raw_text == first.raw_text);
  REQUIRE(second.critiques.size() == 1);
  CHECK(std::get<RemoveCritique>(second.critiques[0]).reason == "first is wrong");

  fs::remove_all(dir);
}
