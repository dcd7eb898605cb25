#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planverify/chat.hpp"
#include "planverify/critique.hpp"
#include "planverify/plan.hpp"

namespace pv {

/// Proposes concrete action lines for a Missing critique.
class InserterBackend {
 public:
  virtual ~InserterBackend() = default;
  virtual std::vector<std::string> propose(const Plan& plan, const MissingCritique& missing) = 0;
  virtual std::string identity() const = 0;
};

/// Returns the same fixed lines for every omission; test and replay backend.
class ScriptInserter final : public InserterBackend {
 public:
  explicit ScriptInserter(std::vector<std::vector<std::string>> proposals,
                          std::string label = "script");
  std::vector<std::string> propose(const Plan& plan, const MissingCritique& missing) override;
  std::string identity() const override { return "inserter-script:" + label_; }

 private:
  std::vector<std::vector<std::string>> proposals_;
  std::string label_;
  std::size_t next_ = 0;
};

struct LlmInserterOptions {
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 512;
  RetryPolicy retry;
};

/// Asks a planner model for the omitted steps as DSL lines.
class LlmInserter final : public InserterBackend {
 public:
  LlmInserter(LlmInserterOptions options, std::shared_ptr<ChatTransport> transport,
              std::shared_ptr<ChatCache> cache = nullptr);
  std::vector<std::string> propose(const Plan& plan, const MissingCritique& missing) override;
  std::string identity() const override { return "inserter-llm:" + options_.model; }

 private:
  LlmInserterOptions options_;
  std::shared_ptr<ChatTransport> transport_;
  std::shared_ptr<ChatCache> cache_;
};

/// An omission that was flagged but not turned into concrete actions.
struct Omission {
  std::string description;
  std::optional<int> insert_after;
  std::string note;  // why it stayed unresolved
};

/// Result of one plan-update step.
struct Revision {
  std::vector<StableId> removed;
  std::vector<std::pair<int, Action>> inserted;  // 1-based positions in resulting_plan
  std::vector<Omission> unresolved;
  Plan resulting_plan;

  bool changed_plan() const { return !removed.empty() || !inserted.empty(); }
};

/// Asks the inserter for lines and places them right after insert_after
/// (consecutively); insert_after absent or past the end means "append".
/// Proposed lines that fail the DSL grammar raise InserterParseError; an
/// empty proposal inserts nothing. Returned actions carry no stable ids yet.
std::vector<std::pair<int, Action>> resolve_missing(InserterBackend& inserter,
                                                    const Plan& plan,
                                                    const MissingCritique& missing);

/// Applies a normalized critique set. Removals are resolved by stable id, so
/// simultaneous removals cannot shift each other; a Remove whose stable id is
/// not in the plan raises StaleCritique. Missing critiques are resolved via
/// the inserter when one is given (insertions keep their anchor even when
/// surrounding actions were removed in the same step) and are otherwise
/// recorded as unresolved omissions. The resulting plan is reindexed and
/// inserted actions get fresh stable ids.
Revision apply_critiques(const Plan& plan, const CritiqueSet& critiques,
                         InserterBackend* inserter = nullptr);

}  // namespace pv
