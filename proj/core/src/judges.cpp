#include "planverify/judges.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "planverify/errors.hpp"
#include "planverify/log.hpp"
#include "planverify/prompts.hpp"

namespace pv {

using json = nlohmann::json;

namespace {

bool same_object(const Action& a, const Action& b) {
  auto oa = a.object();
  auto ob = b.object();
  return oa && ob && *oa == *ob;
}

bool inverse_toggle_pair(const Action& a, const Action& b) {
  bool on_off = a.verb == "ToggleOn" && b.verb == "ToggleOff";
  bool off_on = a.verb == "ToggleOff" && b.verb == "ToggleOn";
  return (on_off || off_on) && same_object(a, b);
}

bool arg_mentions(const Action& a, const std::string& object) {
  for (const auto& arg : a.args) {
    if (arg.is_string() && arg.str() == object) return true;
  }
  return false;
}

}  // namespace

CritiqueSet RuleJudge::evaluate(const std::string&, const Plan& plan) {
  CritiqueSet cs;
  const auto& acts = plan.actions;
  const int n = static_cast<int>(acts.size());

  auto flag = [&](int idx, std::string reason) {
    cs.critiques.push_back(RemoveCritique{idx + 1, acts[idx].stable_id, std::move(reason)});
  };

  // R1: adjacent exact duplicates; the repeat is the redundant one.
  for (int i = 1; i < n; ++i) {
    if (canonical_equal(acts[i], acts[i - 1])) {
      flag(i, "R1: duplicates the previous action " + format_action(acts[i - 1]));
    }
  }
  // R2: adjacent inverse toggle pair on the same object cancels itself out.
  for (int i = 0; i + 1 < n; ++i) {
    if (inverse_toggle_pair(acts[i], acts[i + 1])) {
      std::string obj = acts[i].object().value_or("");
      flag(i, "R2: cancels with the next action, inverse toggle pair on '" + obj + "'");
      flag(i + 1, "R2: cancels with the previous action, inverse toggle pair on '" + obj + "'");
    }
  }
  // R3: ToggleOff before the object was ever toggled on.
  for (int i = 0; i < n; ++i) {
    if (acts[i].verb != "ToggleOff") continue;
    auto obj = acts[i].object();
    if (!obj) continue;
    bool earlier_on = false;
    for (int j = 0; j < i && !earlier_on; ++j) {
      earlier_on = acts[j].verb == "ToggleOn" && acts[j].object() == obj;
    }
    if (!earlier_on) {
      flag(i, "R3: premature ToggleOff('" + *obj + "') with no prior ToggleOn");
    }
  }
  // R4: picked-up object that no later action touches.
  for (int i = 0; i < n; ++i) {
    if (acts[i].verb != "PickUp") continue;
    auto obj = acts[i].object();
    if (!obj) continue;
    bool used_later = false;
    for (int j = i + 1; j < n && !used_later; ++j) {
      used_later = arg_mentions(acts[j], *obj);
    }
    if (!used_later) {
      flag(i, "R4: picked-up object '" + *obj + "' is never used afterwards");
    }
  }
  return normalize_critiques(std::move(cs));
}

ScriptJudge::ScriptJudge(std::vector<ScriptStep> steps, bool strict, std::string label)
    : steps_(std::move(steps)), strict_(strict), label_(std::move(label)) {}

CritiqueSet ScriptJudge::evaluate(const std::string&, const Plan& plan) {
  int call = calls_++;
  if (call >= static_cast<int>(steps_.size())) {
    if (strict_) {
      throw ScriptIndexError("script '" + label_ + "' exhausted after " +
                             std::to_string(steps_.size()) + " steps");
    }
    return CritiqueSet{};
  }
  const ScriptStep& step = steps_[call];
  if (step.reply) {
    return normalize_critiques(parse_judge_output(*step.reply, plan));
  }
  CritiqueSet cs;
  for (const auto& r : step.removes) {
    if (r.stable_id) {
      const Action* a = plan.by_stable_id(*r.stable_id);
      if (!a) continue;  // already removed in an earlier round
      cs.critiques.push_back(RemoveCritique{a->index, a->stable_id, r.reason});
    } else if (r.index) {
      if (*r.index < 1 || *r.index > static_cast<int>(plan.actions.size())) {
        throw ScriptIndexError("script '" + label_ + "' step " + std::to_string(call + 1) +
                               " removes index " + std::to_string(*r.index) +
                               " of a " + std::to_string(plan.actions.size()) +
                               "-action plan");
      }
      cs.critiques.push_back(
          RemoveCritique{*r.index, plan.actions[*r.index - 1].stable_id, r.reason});
    }
  }
  for (const auto& m : step.missings) cs.critiques.push_back(m);
  return normalize_critiques(std::move(cs));
}

std::vector<ScriptStep> truth_script(const Episode& episode) {
  ScriptStep step;
  if (episode.annotations) {
    for (StableId id : episode.annotations->remove_ids) {
      step.removes.push_back(ScriptRemove{std::nullopt, id, "annotated erroneous action"});
    }
    // Identical descriptors must yield distinguishable descriptions, or
    // normalization would fold them into one flag.
    std::map<std::string, int> occurrence;
    for (const auto& m : episode.annotations->missing_steps) {
      std::string desc = "Missing step: " + m.verb + " '" + m.object + "'";
      if (!m.note.empty()) desc += " (" + m.note + ")";
      int n = ++occurrence[desc];
      if (n > 1) desc += " (occurrence " + std::to_string(n) + ")";
      step.missings.push_back(MissingCritique{desc, std::nullopt});
    }
  }
  if (step.removes.empty() && step.missings.empty()) return {};
  return {std::move(step)};
}

namespace {

std::vector<ScriptStep> parse_steps(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ConfigError(where + ": steps must be an array");
  std::vector<ScriptStep> steps;
  for (const auto& s : arr) {
    ScriptStep step;
    if (s.contains("reply")) {
      step.reply = s["reply"].get<std::string>();
    }
    if (s.contains("remove")) {
      for (const auto& r : s["remove"]) {
        ScriptRemove rem;
        if (r.contains("index")) rem.index = r["index"].get<int>();
        if (r.contains("stable_id")) rem.stable_id = StableId{r["stable_id"].get<std::uint64_t>()};
        rem.reason = r.value("reason", std::string("scripted removal"));
        step.removes.push_back(std::move(rem));
      }
    }
    if (s.contains("missing")) {
      for (const auto& m : s["missing"]) {
        MissingCritique mc;
        mc.description = m.value("description", std::string("scripted omission"));
        if (m.contains("insert_after")) mc.insert_after = m["insert_after"].get<int>();
        step.missings.push_back(std::move(mc));
      }
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace

std::vector<ScriptStep> ScriptFile::steps_for(const std::string& episode_id) const {
  auto it = per_episode.find(episode_id);
  return it != per_episode.end() ? it->second : steps;
}

ScriptFile load_script_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open script file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("script file " + path.string() + " is not a JSON object");
  }
  ScriptFile file;
  file.label = path.filename().string();
  file.strict = doc.value("strict", false);
  if (doc.contains("steps")) file.steps = parse_steps(doc["steps"], path.string());
  if (doc.contains("episodes")) {
    for (const auto& [id, steps] : doc["episodes"].items()) {
      file.per_episode[id] = parse_steps(steps.contains("steps") ? steps["steps"] : steps,
                                         path.string() + ":" + id);
    }
  }
  if (file.steps.empty() && file.per_episode.empty()) {
    throw ConfigError("script file " + path.string() + " has no steps");
  }
  return file;
}

LlmJudge::LlmJudge(LlmJudgeOptions options, std::shared_ptr<ChatTransport> transport,
                   std::shared_ptr<ChatCache> cache)
    : options_(std::move(options)), transport_(std::move(transport)), cache_(std::move(cache)) {}

CritiqueSet LlmJudge::evaluate(const std::string& goal, const Plan& plan) {
  ChatRequest req;
  req.endpoint = options_.endpoint;
  req.model = options_.model;
  req.temperature = options_.temperature;
  req.max_tokens = options_.max_tokens;
  req.messages = {{"user", ""}};
  req.messages[0] = {"user", render_judge_prompt(goal, plan)};

  ChatResponse first = chat_complete(req, *transport_, cache_.get(), options_.retry);
  try {
    return normalize_critiques(parse_judge_output(first.content, plan));
  } catch (const MalformedOutput& e) {
    if (!options_.reprompt_on_malformed) {
      log::warn(std::string("fail-open: ") + e.what());
      CritiqueSet cs;
      cs.raw_text = first.content;
      cs.fail_open = true;
      cs.warnings.push_back("fail-open: malformed judge reply, re-prompt disabled");
      return cs;
    }
  }

  ChatRequest retry_req = req;
  retry_req.messages.push_back({"assistant", first.content});
  retry_req.messages.push_back({"user", format_reminder()});
  ChatResponse second = chat_complete(retry_req, *transport_, cache_.get(), options_.retry);
  try {
    return normalize_critiques(parse_judge_output(second.content, plan));
  } catch (const MalformedOutput& e) {
    log::warn(std::string("fail-open after format reminder: ") + e.what());
    CritiqueSet cs;
    cs.raw_text = second.content;
    cs.fail_open = true;
    cs.warnings.push_back(
        "fail-open: judge reply unparseable after one format reminder; treated as no critiques");
    return cs;
  }
}

}  // namespace pv
