#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "planverify/loop.hpp"
#include "planverify/plan.hpp"
#include "planverify/rational.hpp"

namespace pv {

struct LevelCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

struct MatchedPair {
  std::string flag;
  std::string annotation;
};

struct MatchResult {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  LevelCounts remove_level;
  LevelCounts missing_level;
  std::vector<MatchedPair> pairs;  // audit trail of flag <-> annotation matches
};

/// Stable ids removed across all rounds of the trace (the remove-level flag
/// set) and the deduplicated Missing descriptions, in first-appearance order.
std::set<StableId> flagged_remove_ids(const VerificationTrace& trace);
std::vector<std::string> flagged_missing_descriptions(const VerificationTrace& trace);

LevelCounts match_remove_level(const std::set<StableId>& flagged,
                               const std::set<StableId>& annotated);

/// A Missing flag matches a descriptor when some word of the flag equals the
/// descriptor's verb (case-insensitive) and the descriptor's object occurs in
/// the flag text (case-insensitive substring). Matching is greedy one-to-one
/// in flag order; unmatched flags count FP, unmatched descriptors FN.
LevelCounts match_missing_level(const std::vector<std::string>& flags,
                                const std::vector<MissingDescriptor>& descriptors,
                                std::vector<MatchedPair>* pairs = nullptr);

MatchResult match_flags(const VerificationTrace& trace, const ErrorAnnotation& annotation);
/// Same, but verifies the trace belongs to the episode (EpisodeMismatch) and
/// that the episode actually carries annotations.
MatchResult match_flags(const VerificationTrace& trace, const Episode& episode);

struct Metrics {
  Rational recall;
  Rational precision;
  Rational f1;
};

/// Zero-denominator conventions: precision = 1 when nothing was flagged,
/// recall = 1 when there was nothing to find, f1 = 0 when both are zero.
Metrics metrics_from_counts(long tp, long fp, long fn);
Metrics compute_metrics(const MatchResult& match);
Rational harmonic_f1(Rational precision, Rational recall);

struct ConvergenceStats {
  long total = 0;                       // traces considered (non-failed)
  std::vector<long> newly_converged;    // index r-1 -> converged exactly at round r
  std::vector<Rational> cumulative;     // fraction converged by round r
  long non_converged = 0;
  /// Per-round decay rate fitted as 1 - exp(slope) from least squares of
  /// log mean annotated error count against round number, using only rounds
  /// with a nonzero mean; absent when fewer than two such points exist.
  std::optional<double> decay_rate;
  double mean_length_reduction = 0.0;       // actions removed per episode
  double mean_length_reduction_frac = 0.0;  // relative to initial length
};

/// Throws EmptyRun when no traces are given. Failed traces are excluded from
/// every statistic.
ConvergenceStats aggregate_convergence(const std::vector<VerificationTrace>& traces);

struct EpisodeReportRow {
  std::string episode_id;
  std::optional<MatchResult> match;
  std::optional<Metrics> metrics;
  std::optional<int> converged_at;
  int len_before = 0;
  int len_after = 0;
  TraceStatus status = TraceStatus::Ok;
};

struct RunReport {
  std::string mode;  // "single-pass" when no trace iterated, else "iterative"
  std::string judge_identity;
  std::string planner_identity;
  long episodes = 0;
  bool has_metrics = false;
  MatchResult pooled;           // micro-averaged: counts summed, then scored
  Metrics pooled_metrics;
  std::vector<EpisodeReportRow> rows;
  ConvergenceStats convergence;
  long fail_open_rounds = 0;
  long oscillating = 0;
  long failed = 0;
};

/// Joins traces with episodes by id and produces the full report. Episodes
/// without annotations contribute no metric rows; when none are annotated the
/// metrics section is omitted entirely.
RunReport summarize_run(const std::vector<VerificationTrace>& traces,
                        const std::vector<Episode>& episodes,
                        const std::string& judge_identity,
                        const std::string& planner_identity);

/// Deterministic writers; schema "report/1". CSV columns:
/// episode_id,tp,fp,fn,recall,precision,f1,converged_at,len_before,len_after
std::string report_to_json_string(const RunReport& report);
std::string report_to_csv(const RunReport& report);
std::string convergence_curve_svg(const ConvergenceStats& stats);

}  // namespace pv
