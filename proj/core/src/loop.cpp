#include "planverify/loop.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "planverify/errors.hpp"
#include "planverify/log.hpp"

namespace pv {

std::string_view to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::Ok: return "ok";
    case TraceStatus::Oscillating: return "oscillating";
    case TraceStatus::Failed: return "failed";
  }
  return "ok";
}

std::optional<TraceStatus> trace_status_from(std::string_view name) {
  if (name == "ok") return TraceStatus::Ok;
  if (name == "oscillating") return TraceStatus::Oscillating;
  if (name == "failed") return TraceStatus::Failed;
  return std::nullopt;
}

int VerificationTrace::fail_open_rounds() const {
  int count = 0;
  for (const auto& it : iterations) {
    if (it.critiques.fail_open) ++count;
  }
  return count;
}

std::optional<int> VerificationTrace::initial_length() const {
  if (iterations.empty()) return std::nullopt;
  return static_cast<int>(iterations.front().plan_before.size());
}

int annotated_error_count(const Plan& plan, const ErrorAnnotation& annotation) {
  int count = 0;
  for (const auto& a : plan.actions) {
    if (annotation.remove_ids.count(a.stable_id)) ++count;
  }
  return count;
}

VerificationTrace verify_episode(const Episode& episode, JudgeBackend& judge,
                                 const PlannerConfig& planner, const LoopConfig& config) {
  if (config.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");

  VerificationTrace trace;
  trace.episode_id = episode.episode_id;
  trace.judge_identity = judge.identity();
  trace.planner_identity = config.removal_only ? "removal-only" : planner.identity();

  InserterBackend* inserter =
      config.removal_only ? nullptr : planner.inserter.get();

  Plan current = reindex(episode.initial_plan);
  for (int round = 1; round <= config.max_rounds; ++round) {
    CritiqueSet critiques = normalize_critiques(judge.evaluate(current.goal, current));

    IterationRecord record;
    record.round = round;
    record.plan_before = current;
    record.critiques = critiques;
    if (episode.annotations) {
      record.error_before = annotated_error_count(current, *episode.annotations);
    }

    if (critiques.empty()) {
      record.plan_after = current;
      record.error_after = record.error_before;
      trace.iterations.push_back(std::move(record));
      trace.converged_at = round;
      break;
    }

    Revision revision = apply_critiques(current, critiques, inserter);
    record.plan_after = revision.resulting_plan;
    if (episode.annotations) {
      record.error_after = annotated_error_count(revision.resulting_plan, *episode.annotations);
    }
    record.revision = std::move(revision);
    trace.iterations.push_back(std::move(record));

    Plan next = trace.iterations.back().plan_after;
    // Revert cycle: this round changed the plan yet exactly restored the
    // previous round's input. Stop instead of ping-ponging until the cap.
    // A round that left the plan untouched (unresolved omissions only) is
    // stagnation, not oscillation, and runs on to the cap.
    if (round >= 2 && !canonical_equal(next, current) &&
        canonical_equal(next, trace.iterations[static_cast<std::size_t>(round) - 2].plan_before)) {
      trace.status = TraceStatus::Oscillating;
      log::warn("episode " + episode.episode_id + ": oscillation detected at round " +
                std::to_string(round));
      current = std::move(next);
      break;
    }
    current = std::move(next);
  }

  trace.final_plan = current;
  return trace;
}

std::vector<VerificationTrace> verify_corpus(const std::vector<Episode>& episodes,
                                             const JudgeProvider& judge_provider,
                                             const PlannerConfig& planner,
                                             const LoopConfig& config, int parallelism) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");

  std::vector<VerificationTrace> traces(episodes.size());
  std::atomic<std::size_t> cursor{0};

  auto worker = [&] {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= episodes.size()) return;
      const Episode& ep = episodes[i];
      try {
        auto judge = judge_provider(ep);
        traces[i] = verify_episode(ep, *judge, planner, config);
      } catch (const std::exception& e) {
        VerificationTrace failed;
        failed.episode_id = ep.episode_id;
        failed.status = TraceStatus::Failed;
        failed.failure = e.what();
        failed.final_plan = ep.initial_plan;
        traces[i] = std::move(failed);
        log::error("episode " + ep.episode_id + " failed: " + e.what());
      }
    }
  };

  std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), episodes.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return traces;
}

}  // namespace pv
