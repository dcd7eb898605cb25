#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "planverify/chat.hpp"
#include "planverify/critique.hpp"
#include "planverify/plan.hpp"

namespace pv {

/// A judge maps (goal, plan) to a critique set. Rule and script backends are
/// fully deterministic for identical inputs; backends must tolerate
/// concurrent evaluate calls across episodes.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual CritiqueSet evaluate(const std::string& goal, const Plan& plan) = 0;
  virtual std::string identity() const = 0;
};

/// Deterministic removal-only baseline. Rules are applied in order and each
/// hit emits a Remove whose reason names the rule:
///   R1: adjacent exact duplicate (the second of the pair is flagged)
///   R2: adjacent inverse toggle pair on one object (both are flagged)
///   R3: ToggleOff with no earlier ToggleOn on that object
///   R4: PickUp of an object never used by any later action
class RuleJudge final : public JudgeBackend {
 public:
  CritiqueSet evaluate(const std::string& goal, const Plan& plan) override;
  std::string identity() const override { return "rules/v1"; }
};

struct ScriptRemove {
  std::optional<int> index;         // resolved against the current plan
  std::optional<StableId> stable_id;  // alternative addressing
  std::string reason;
};

struct ScriptStep {
  std::vector<ScriptRemove> removes;
  std::vector<MissingCritique> missings;
  std::optional<std::string> reply;  // raw judge text, run through the parser
};

/// Replays a fixed critique script, one step per evaluate call. After the
/// script is exhausted it returns empty sets, unless strict mode is on, in
/// which case the extra call is an error. Instances hold a cursor and are
/// meant to be per-episode, never shared.
class ScriptJudge final : public JudgeBackend {
 public:
  explicit ScriptJudge(std::vector<ScriptStep> steps, bool strict = false,
                       std::string label = "script");

  CritiqueSet evaluate(const std::string& goal, const Plan& plan) override;
  std::string identity() const override { return "script:" + label_; }
  int calls() const { return calls_; }

 private:
  std::vector<ScriptStep> steps_;
  bool strict_;
  std::string label_;
  int calls_ = 0;
};

/// Builds the script of a judge that flags exactly the episode's annotation:
/// one step with every annotated removal and missing step, then silence.
std::vector<ScriptStep> truth_script(const Episode& episode);

/// Script file ("script/1"): {"steps": [...]} applied to every episode, with
/// optional per-episode overrides under "episodes". Each step may list
/// removes/missing entries or a raw "reply" to be parsed.
struct ScriptFile {
  std::vector<ScriptStep> steps;
  std::map<std::string, std::vector<ScriptStep>> per_episode;
  bool strict = false;
  std::string label;

  std::vector<ScriptStep> steps_for(const std::string& episode_id) const;
};

ScriptFile load_script_file(const std::filesystem::path& path);

struct LlmJudgeOptions {
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
  bool reprompt_on_malformed = true;
  RetryPolicy retry;
};

/// Prompt-rendered judge: render -> chat_complete -> parse -> normalize.
/// A malformed reply triggers exactly one re-prompt with a format reminder;
/// if that also fails to parse, the round fails open to an empty critique
/// set, flagged on the returned set and logged.
class LlmJudge final : public JudgeBackend {
 public:
  LlmJudge(LlmJudgeOptions options, std::shared_ptr<ChatTransport> transport,
           std::shared_ptr<ChatCache> cache = nullptr);

  CritiqueSet evaluate(const std::string& goal, const Plan& plan) override;
  std::string identity() const override { return "llm:" + options_.model; }

 private:
  LlmJudgeOptions options_;
  std::shared_ptr<ChatTransport> transport_;
  std::shared_ptr<ChatCache> cache_;
};

}  // namespace pv
