#include <benchmark/benchmark.h>

#include "planverify/corpus.hpp"
#include "planverify/judges.hpp"
#include "planverify/loop.hpp"
#include "planverify/planner.hpp"
#include "planverify/prompts.hpp"

namespace {

using namespace pv;

Plan bench_plan(int n) {
  std::vector<std::string> lines;
  for (int i = 0; i < n; ++i) {
    switch (i % 5) {
      case 0: lines.push_back("Driver.PickUp('Item" + std::to_string(i) + "')"); break;
      case 1: lines.push_back("Driver.Move(3.5)"); break;
      case 2: lines.push_back("Driver.Place('Counter')"); break;
      case 3: lines.push_back("Driver.ToggleOn('Machine')"); break;
      default: lines.push_back("Driver.ToggleOff('Machine')"); break;
    }
  }
  return parse_plan("benchmark goal", lines);
}

void BM_ParseAction(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_action("Driver.Place('Sink',2.5,'Soap')"));
  }
}
BENCHMARK(BM_ParseAction);

void BM_FormatAction(benchmark::State& state) {
  Action action = parse_action("Driver.Place('Sink',2.5,'Soap')");
  for (auto _ : state) {
    benchmark::DoNotOptimize(format_action(action));
  }
}
BENCHMARK(BM_FormatAction);

void BM_RenderJudgePrompt(benchmark::State& state) {
  Plan plan = bench_plan(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_judge_prompt(plan.goal, plan));
  }
}
BENCHMARK(BM_RenderJudgePrompt)->Arg(10)->Arg(50);

void BM_RuleJudge(benchmark::State& state) {
  Plan plan = bench_plan(static_cast<int>(state.range(0)));
  RuleJudge judge;
  for (auto _ : state) {
    benchmark::DoNotOptimize(judge.evaluate(plan.goal, plan));
  }
}
BENCHMARK(BM_RuleJudge)->Arg(10)->Arg(50)->Arg(200);

void BM_ParseJudgeOutput(benchmark::State& state) {
  Plan plan = bench_plan(20);
  std::string reply;
  for (const auto& a : plan.actions) {
    reply += "ACTION: " + format_action(a) + "\n";
    reply += a.index % 4 == 0 ? "ANNOTATION: #REMOVE: redundant step\n"
                              : "ANNOTATION: fine\n";
  }
  reply += "#MISSING: a closing step\n";
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_judge_output(reply, plan));
  }
}
BENCHMARK(BM_ParseJudgeOutput);

void BM_ApplyCritiques(benchmark::State& state) {
  Plan plan = bench_plan(50);
  CritiqueSet cs;
  for (int i = 5; i <= 45; i += 5) {
    cs.critiques.push_back(RemoveCritique{i, plan.actions[i - 1].stable_id, "bench"});
  }
  cs = normalize_critiques(std::move(cs));
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_critiques(plan, cs));
  }
}
BENCHMARK(BM_ApplyCritiques);

void BM_InjectErrors(benchmark::State& state) {
  Plan clean = bench_plan(30);
  ErrorProfile profile;
  profile.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inject_errors(clean, profile));
  }
}
BENCHMARK(BM_InjectErrors);

void BM_VerifyEpisodeScripted(benchmark::State& state) {
  Episode ep;
  ep.episode_id = "bench";
  ep.initial_plan = bench_plan(40);
  for (auto _ : state) {
    state.PauseTiming();
    std::vector<ScriptStep> steps;
    for (int round = 0; round < 4; ++round) {
      ScriptStep step;
      step.removes.push_back({1, std::nullopt, "bench"});
      steps.push_back(step);
    }
    ScriptJudge judge(steps);
    state.ResumeTiming();
    benchmark::DoNotOptimize(verify_episode(ep, judge, {}, {}));
  }
}
BENCHMARK(BM_VerifyEpisodeScripted);

}  // namespace

BENCHMARK_MAIN();
