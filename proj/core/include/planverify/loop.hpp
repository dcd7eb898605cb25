#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planverify/critique.hpp"
#include "planverify/judges.hpp"
#include "planverify/plan.hpp"
#include "planverify/planner.hpp"

namespace pv {

struct LoopConfig {
  int max_rounds = 5;
  bool removal_only = true;          // ignore the inserter even if configured
  bool reprompt_on_malformed = true;
};

struct PlannerConfig {
  std::shared_ptr<InserterBackend> inserter;

  std::string identity() const {
    return inserter ? inserter->identity() : "removal-only";
  }
};

struct IterationRecord {
  int round = 0;
  Plan plan_before;
  CritiqueSet critiques;
  std::optional<Revision> revision;  // absent on the converged round
  Plan plan_after;
  // Annotated error counts E before/after this round, when ground truth
  // exists for the episode.
  std::optional<int> error_before;
  std::optional<int> error_after;
};

enum class TraceStatus { Ok, Oscillating, Failed };

std::string_view to_string(TraceStatus status);
std::optional<TraceStatus> trace_status_from(std::string_view name);

struct VerificationTrace {
  std::string episode_id;
  TraceStatus status = TraceStatus::Ok;
  std::string failure;  // human-readable cause when status == Failed
  std::vector<IterationRecord> iterations;
  /// Round of the first empty critique set; unset when critiques persisted
  /// through the round cap (or the loop stopped for another reason).
  std::optional<int> converged_at;
  Plan final_plan;
  std::string judge_identity;
  std::string planner_identity;

  int fail_open_rounds() const;
  int judge_calls() const { return static_cast<int>(iterations.size()); }
  std::optional<int> initial_length() const;
};

/// Number of actions in the plan that the annotation marks erroneous.
int annotated_error_count(const Plan& plan, const ErrorAnnotation& annotation);

/// Runs the iterative judge/planner loop on one episode: evaluate, stop on an
/// empty critique set, otherwise apply the critiques, reindex and continue;
/// after max_rounds the last refined plan is returned even if critiques
/// persist. A revision that exactly restores the previous round's input plan
/// stops the loop with status Oscillating. Every round is recorded.
VerificationTrace verify_episode(const Episode& episode, JudgeBackend& judge,
                                 const PlannerConfig& planner, const LoopConfig& config);

/// Supplies the judge for one episode; scripted judges carry a cursor and are
/// created fresh per episode, shared stateless backends can be reused.
using JudgeProvider = std::function<std::shared_ptr<JudgeBackend>(const Episode&)>;

/// Runs verify_episode over the corpus with bounded parallelism. Output order
/// matches input order; a fatal per-episode error becomes a Failed trace
/// record instead of aborting the run. Throws ConfigError for parallelism < 1.
std::vector<VerificationTrace> verify_corpus(const std::vector<Episode>& episodes,
                                             const JudgeProvider& judge_provider,
                                             const PlannerConfig& planner,
                                             const LoopConfig& config, int parallelism);

}  // namespace pv
