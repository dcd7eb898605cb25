#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "planverify/plan.hpp"

namespace pv {

/// Loads every *.episode.json in the directory (sorted by filename), parses
/// all actions, assigns stable ids and converts 1-based annotation indices to
/// stable ids. Validation problems are aggregated into one SchemaError; an
/// empty directory raises EmptyCorpus.
std::vector<Episode> load_episodes(const std::filesystem::path& dir);

Episode episode_from_json_string(const std::string& text, const std::string& origin);
std::string episode_to_json_string(const Episode& episode);

/// Writes <dir>/<episode_id>.episode.json.
std::filesystem::path write_episode_file(const std::filesystem::path& dir,
                                         const Episode& episode);

/// Per-action injection probabilities; the seed pins all randomness
/// (mt19937_64 with modulo index reduction, so output is identical across
/// platforms for one seed).
struct ErrorProfile {
  double duplicate_rate = 0.2;
  double inverse_pair_rate = 0.15;
  double irrelevant_pickup_rate = 0.15;
  double deletion_rate = 0.1;
  std::uint64_t seed = 1;
};

struct InjectionSummary {
  long duplicates = 0;
  long inverse_pairs = 0;
  long irrelevant_pickups = 0;
  long deletions = 0;

  long total() const { return duplicates + inverse_pairs + irrelevant_pickups + deletions; }
  InjectionSummary& operator+=(const InjectionSummary& other);
};

struct InjectionResult {
  Plan noisy;
  ErrorAnnotation truth;  // exactly the injected ids and deleted descriptors
  SyntheticTruth book;    // reconstruction data
  InjectionSummary summary;
};

/// Deletions are drawn first over the clean actions (each records a
/// MissingDescriptor), then duplicates / inverse toggle pairs / irrelevant
/// pickups are inserted after surviving actions. Inserted actions get fresh
/// stable ids, which is what truth.remove_ids contains. Throws ProfileError
/// when every rate is zero but require_errors was requested.
InjectionResult inject_errors(const Plan& clean, const ErrorProfile& profile,
                              bool require_errors = false);

/// Undoes a perfect refinement: re-inserts the deleted steps at their clean
/// positions. The result is canonically equal to the clean source whenever
/// the refined plan removed exactly the injected actions.
Plan reconstruct_clean(const Plan& refined, const SyntheticTruth& truth);

struct PlanTemplate {
  std::string goal;
  std::vector<std::string> lines;
};

/// Bundled clean household-task plans used as generator sources.
const std::vector<PlanTemplate>& clean_task_templates();
/// Objects for irrelevant-pickup injection; never drawn from the plan itself.
const std::vector<std::string>& distractor_objects();

/// Generates n annotated noisy episodes ("synth-0001"...). Template choice
/// and per-episode seeds derive from profile.seed, so output is byte-stable.
std::vector<Episode> generate_corpus(int n, const ErrorProfile& profile,
                                     InjectionSummary* summary = nullptr);

}  // namespace pv
