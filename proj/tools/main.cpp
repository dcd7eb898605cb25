// planverify command-line tool: verify a corpus against a judge backend,
// evaluate traces against annotations, and generate synthetic noisy corpora.
//
// Exit codes: 0 success, 1 fatal error, 2 partial failure, 64 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "planverify/corpus.hpp"
#include "planverify/errors.hpp"
#include "planverify/eval.hpp"
#include "planverify/judges.hpp"
#include "planverify/log.hpp"
#include "planverify/loop.hpp"
#include "planverify/trace_io.hpp"

namespace fs = std::filesystem;
using namespace pv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;

std::string env_or(const char* name, const std::string& fallback = {}) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

void write_text_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

struct VerifyOptions {
  std::string corpus;
  std::string judge = "rules";
  std::string inserter = "none";
  std::string out;
  std::string cache_path;
  std::string endpoint;
  std::string model;
  int max_rounds = 5;
  int parallelism = 0;  // 0 -> hardware concurrency
  bool no_reprompt = false;
  bool strict_script = false;
};

struct LlmEnvironment {
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::shared_ptr<ChatTransport> transport;
  std::shared_ptr<ChatCache> cache;
};

LlmEnvironment make_llm_environment(const VerifyOptions& opt) {
  LlmEnvironment env;
  env.endpoint = !opt.endpoint.empty() ? opt.endpoint : env_or("PV_LLM_ENDPOINT");
  env.model = !opt.model.empty() ? opt.model : env_or("PV_LLM_MODEL");
  env.api_key = env_or("PV_LLM_API_KEY");
  if (env.endpoint.empty()) {
    throw ConfigError("LLM backend selected but no endpoint configured; set "
                      "PV_LLM_ENDPOINT or pass --endpoint");
  }
  if (env.model.empty()) {
    throw ConfigError("LLM backend selected but no model configured; set "
                      "PV_LLM_MODEL or pass --model");
  }
  if (env.api_key.empty()) {
    throw ConfigError("LLM backend selected but PV_LLM_API_KEY is not set");
  }
  env.transport = std::make_shared<HttpChatTransport>(env.api_key);
  std::string cache_path = opt.cache_path;
  if (cache_path.empty()) {
    std::string dir = env_or("PV_CACHE_DIR");
    if (!dir.empty()) cache_path = (fs::path(dir) / "chat-cache.jsonl").string();
  }
  if (cache_path.empty() && !opt.out.empty()) {
    cache_path = (fs::path(opt.out) / "chat-cache.jsonl").string();
  }
  if (!cache_path.empty()) env.cache = std::make_shared<ChatCache>(cache_path);
  return env;
}

int cmd_verify(const VerifyOptions& opt) {
  auto episodes = load_episodes(opt.corpus);

  LoopConfig loop;
  loop.max_rounds = opt.max_rounds;
  loop.reprompt_on_malformed = !opt.no_reprompt;

  PlannerConfig planner;
  JudgeProvider provider;

  std::optional<LlmEnvironment> llm;
  if (opt.judge == "llm" || opt.inserter == "llm") {
    llm = make_llm_environment(opt);
  }

  if (opt.judge == "rules") {
    auto judge = std::make_shared<RuleJudge>();
    provider = [judge](const Episode&) { return judge; };
  } else if (opt.judge == "llm") {
    LlmJudgeOptions jo;
    jo.endpoint = llm->endpoint;
    jo.model = llm->model;
    jo.reprompt_on_malformed = loop.reprompt_on_malformed;
    auto judge = std::make_shared<LlmJudge>(jo, llm->transport, llm->cache);
    provider = [judge](const Episode&) { return judge; };
  } else if (opt.judge.rfind("script:", 0) == 0) {
    auto script = std::make_shared<ScriptFile>(load_script_file(opt.judge.substr(7)));
    bool strict = opt.strict_script || script->strict;
    provider = [script, strict](const Episode& ep) {
      return std::make_shared<ScriptJudge>(script->steps_for(ep.episode_id), strict,
                                           script->label);
    };
  } else if (opt.judge == "oracle") {
    provider = [](const Episode& ep) {
      return std::make_shared<ScriptJudge>(truth_script(ep), false, "oracle");
    };
  } else {
    throw ConfigError("unknown judge selector '" + opt.judge +
                      "' (expected llm, rules, oracle or script:<file>)");
  }

  if (opt.inserter == "none") {
    loop.removal_only = true;
  } else if (opt.inserter == "llm") {
    LlmInserterOptions io;
    io.endpoint = llm->endpoint;
    io.model = llm->model;
    planner.inserter = std::make_shared<LlmInserter>(io, llm->transport, llm->cache);
    loop.removal_only = false;
  } else if (opt.inserter.rfind("script:", 0) == 0) {
    std::ifstream in(opt.inserter.substr(7));
    if (!in) throw ConfigError("cannot open inserter script " + opt.inserter.substr(7));
    std::vector<std::vector<std::string>> proposals;
    std::vector<std::string> current;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) {
        if (!current.empty()) proposals.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(line);
      }
    }
    if (!current.empty()) proposals.push_back(std::move(current));
    planner.inserter = std::make_shared<ScriptInserter>(std::move(proposals));
    loop.removal_only = false;
  } else {
    throw ConfigError("unknown inserter selector '" + opt.inserter +
                      "' (expected none, llm or script:<file>)");
  }

  int parallelism = opt.parallelism > 0
                        ? opt.parallelism
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto traces = verify_corpus(episodes, provider, planner, loop, parallelism);

  fs::path out_dir(opt.out);
  fs::create_directories(out_dir);
  int failed = 0;
  for (const auto& trace : traces) {
    write_trace_file(out_dir / "traces", trace);
    write_text_file(out_dir / "plans" / (trace.episode_id + ".plan.txt"),
                    format_plan(trace.final_plan));
    std::string converged =
        trace.converged_at ? "converged_at=" + std::to_string(*trace.converged_at)
                           : "not-converged";
    std::cout << trace.episode_id << " status=" << to_string(trace.status) << " "
              << converged << " len=" << trace.initial_length().value_or(0) << "->"
              << trace.final_plan.size() << "\n";
    if (trace.status == TraceStatus::Failed) ++failed;
  }
  std::cout << traces.size() << " episode(s) verified, " << failed << " failed\n";
  return failed > 0 ? kExitPartial : kExitOk;
}

struct EvaluateOptions {
  std::string traces;
  std::string corpus;
  std::string out;
  bool json = true;
  bool csv = true;
  bool plot = true;
};

int cmd_evaluate(const EvaluateOptions& opt) {
  auto traces = load_trace_dir(opt.traces);
  if (traces.empty()) throw EmptyRun("no trace files under " + opt.traces);

  std::vector<Episode> episodes;
  if (!opt.corpus.empty()) episodes = load_episodes(opt.corpus);

  bool any_annotations = false;
  for (const auto& ep : episodes) {
    if (ep.annotations) any_annotations = true;
  }
  if (!any_annotations) {
    log::warn("no annotations in the corpus; the metrics section will be omitted");
  }

  std::string judge = traces.front().judge_identity;
  std::string planner = traces.front().planner_identity;
  RunReport report = summarize_run(traces, episodes, judge, planner);

  fs::path out_dir(opt.out);
  fs::create_directories(out_dir);
  if (opt.json) write_text_file(out_dir / "report.json", report_to_json_string(report));
  if (opt.csv) write_text_file(out_dir / "report.csv", report_to_csv(report));
  if (opt.plot) {
    write_text_file(out_dir / "convergence.svg", convergence_curve_svg(report.convergence));
  }

  std::cout << "mode=" << report.mode << " episodes=" << report.episodes;
  if (report.has_metrics) {
    std::cout << " recall=" << report.pooled_metrics.recall.percent_1dp()
              << "% precision=" << report.pooled_metrics.precision.percent_1dp()
              << "% f1=" << report.pooled_metrics.f1.percent_1dp() << "%";
  }
  std::cout << "\n";
  for (std::size_t r = 0; r < report.convergence.cumulative.size(); ++r) {
    std::cout << "round " << r + 1 << ": cumulative "
              << report.convergence.cumulative[r].percent_1dp() << "%\n";
  }
  return kExitOk;
}

struct GenOptions {
  int n = 10;
  std::string out;
  ErrorProfile profile;
  bool require_errors = false;
};

int cmd_gen(const GenOptions& opt) {
  InjectionSummary summary;
  auto episodes = generate_corpus(opt.n, opt.profile, &summary);
  if (opt.require_errors && summary.total() == 0) {
    throw ProfileError("generation produced no injections but --require-errors was set");
  }
  for (const auto& ep : episodes) write_episode_file(opt.out, ep);
  std::cout << "episodes: " << episodes.size() << "\n"
            << "duplicates: " << summary.duplicates << "\n"
            << "inverse_pairs: " << summary.inverse_pairs << "\n"
            << "irrelevant_pickups: " << summary.irrelevant_pickups << "\n"
            << "deletions: " << summary.deletions << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative judge/planner verification for embodied task plans"};
  app.require_subcommand(1);
  app.set_config("--config");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run the verification loop over a corpus");
  verify->add_option("--corpus", vo.corpus, "Directory of *.episode.json files")->required();
  verify->add_option("--judge", vo.judge, "Judge backend: llm, rules, oracle or script:<file>")
      ->capture_default_str();
  verify->add_option("--inserter", vo.inserter,
                     "Missing-step inserter: none, llm or script:<file>")
      ->capture_default_str();
  verify->add_option("--out", vo.out, "Output directory")->required();
  verify->add_option("--max-rounds", vo.max_rounds, "Refinement round cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify->add_option("--parallelism", vo.parallelism, "Worker count (default: cores)");
  verify->add_option("--cache", vo.cache_path, "Chat cache file (JSONL)")
      ->envname("PV_CACHE_FILE");
  verify->add_option("--endpoint", vo.endpoint, "Chat endpoint URL")->envname("PV_LLM_ENDPOINT");
  verify->add_option("--model", vo.model, "Model label")->envname("PV_LLM_MODEL");
  verify->add_flag("--no-reprompt", vo.no_reprompt,
                   "Fail open immediately on malformed judge output");
  verify->add_flag("--strict-script", vo.strict_script,
                   "Error when a script judge runs out of steps");

  EvaluateOptions eo;
  auto* evaluate = app.add_subcommand("evaluate", "Score traces against annotations");
  evaluate->add_option("--traces", eo.traces, "Directory of trace JSON files")->required();
  evaluate->add_option("--corpus", eo.corpus, "Annotated corpus directory");
  evaluate->add_option("--out", eo.out, "Output directory")->required();
  evaluate->add_flag("!--no-json", eo.json, "Skip report.json");
  evaluate->add_flag("!--no-csv", eo.csv, "Skip report.csv");
  evaluate->add_flag("!--no-plot", eo.plot, "Skip convergence.svg");

  GenOptions go;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic noisy corpus");
  gen->add_option("--n", go.n, "Number of episodes")->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", go.out, "Output directory")->required();
  gen->add_option("--seed", go.profile.seed, "Random seed")->capture_default_str();
  gen->add_option("--dup-rate", go.profile.duplicate_rate, "Duplicate insertion rate")
      ->capture_default_str();
  gen->add_option("--inv-rate", go.profile.inverse_pair_rate, "Inverse toggle pair rate")
      ->capture_default_str();
  gen->add_option("--irr-rate", go.profile.irrelevant_pickup_rate, "Irrelevant pickup rate")
      ->capture_default_str();
  gen->add_option("--del-rate", go.profile.deletion_rate, "Required-step deletion rate")
      ->capture_default_str();
  gen->add_flag("--require-errors", go.require_errors,
                "Fail unless at least one error can be injected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(vo);
    if (evaluate->parsed()) return cmd_evaluate(eo);
    if (gen->parsed()) {
      if (go.require_errors && go.profile.duplicate_rate <= 0 &&
          go.profile.inverse_pair_rate <= 0 && go.profile.irrelevant_pickup_rate <= 0 &&
          go.profile.deletion_rate <= 0) {
        std::cerr << "error: --require-errors with all injection rates zero\n";
        return kExitUsage;
      }
      return cmd_gen(go);
    }
  } catch (const ProfileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}
