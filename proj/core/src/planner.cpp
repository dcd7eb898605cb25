#include "planverify/planner.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "planverify/errors.hpp"
#include "planverify/log.hpp"
#include "planverify/prompts.hpp"

namespace pv {

ScriptInserter::ScriptInserter(std::vector<std::vector<std::string>> proposals, std::string label)
    : proposals_(std::move(proposals)), label_(std::move(label)) {}

std::vector<std::string> ScriptInserter::propose(const Plan&, const MissingCritique&) {
  if (next_ >= proposals_.size()) return {};
  return proposals_[next_++];
}

LlmInserter::LlmInserter(LlmInserterOptions options, std::shared_ptr<ChatTransport> transport,
                         std::shared_ptr<ChatCache> cache)
    : options_(std::move(options)), transport_(std::move(transport)), cache_(std::move(cache)) {}

std::vector<std::string> LlmInserter::propose(const Plan& plan, const MissingCritique& missing) {
  std::string prompt =
      planner_goal_prompt_template().role_preamble +
      "\nThe following plan is missing a step.\nGOAL: " + plan.goal +
      "\nActions:\n" + actions_text(plan) + "\nOmission: " + missing.description +
      "\nReply with only the action lines to insert, one per line, in the same "
      "Actor.Verb(args) format as above. Reply with an empty message if nothing "
      "should be inserted.";
  ChatRequest req;
  req.endpoint = options_.endpoint;
  req.model = options_.model;
  req.temperature = options_.temperature;
  req.max_tokens = options_.max_tokens;
  req.messages = {{"user", prompt}};
  ChatResponse resp = chat_complete(req, *transport_, cache_.get(), options_.retry);

  std::vector<std::string> lines;
  std::istringstream in(resp.content);
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    if (!trimmed.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::pair<int, Action>> resolve_missing(InserterBackend& inserter, const Plan& plan,
                                                    const MissingCritique& missing) {
  std::vector<std::string> lines = inserter.propose(plan, missing);
  const int n = static_cast<int>(plan.actions.size());
  int anchor = missing.insert_after.value_or(n);
  anchor = std::clamp(anchor, 0, n);

  std::vector<std::pair<int, Action>> insertions;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      insertions.emplace_back(anchor + 1 + static_cast<int>(i), parse_action(lines[i]));
    } catch (const ParseError& e) {
      throw InserterParseError("proposed line " + std::to_string(i + 1) + " (\"" + lines[i] +
                               "\") is not a valid action: " + e.what());
    }
  }
  return insertions;
}

Revision apply_critiques(const Plan& plan, const CritiqueSet& critiques,
                         InserterBackend* inserter) {
  Revision rev;

  std::set<StableId> targets;
  for (const auto& c : critiques.critiques) {
    if (const auto* r = std::get_if<RemoveCritique>(&c)) {
      if (!plan.by_stable_id(r->stable_id)) {
        throw StaleCritique("remove critique for index " + std::to_string(r->index) +
                            " names stable id " + std::to_string(r->stable_id.value) +
                            " which is not in the plan");
      }
      targets.insert(r->stable_id);
    }
  }

  Plan next;
  next.goal = plan.goal;
  next.next_stable_id = plan.next_stable_id;
  for (const auto& a : plan.actions) {
    if (targets.count(a.stable_id)) {
      rev.removed.push_back(a.stable_id);
    } else {
      next.actions.push_back(a);
    }
  }

  for (const auto& c : critiques.critiques) {
    const auto* m = std::get_if<MissingCritique>(&c);
    if (!m) continue;
    if (!inserter) {
      rev.unresolved.push_back({m->description, m->insert_after, "no inserter configured"});
      continue;
    }
    std::vector<std::pair<int, Action>> proposed;
    try {
      proposed = resolve_missing(*inserter, plan, *m);
    } catch (const InserterParseError& e) {
      log::warn(std::string("omission left unresolved: ") + e.what());
      rev.unresolved.push_back({m->description, m->insert_after, e.what()});
      continue;
    }
    if (proposed.empty()) {
      rev.unresolved.push_back({m->description, m->insert_after, "inserter proposed nothing"});
      continue;
    }
    // Positions refer to the judged plan; anchor on the stable id of the
    // action at insert_after so removals in this same step cannot shift the
    // insertion point. A removed anchor falls back to its nearest earlier
    // survivor.
    const int n = static_cast<int>(plan.actions.size());
    int anchor_index = std::clamp(m->insert_after.value_or(n), 0, n);
    std::size_t pos = 0;
    for (int i = anchor_index; i >= 1; --i) {
      StableId anchor_id = plan.actions[i - 1].stable_id;
      bool found = false;
      for (std::size_t j = 0; j < next.actions.size(); ++j) {
        if (next.actions[j].stable_id == anchor_id) {
          pos = j + 1;
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (anchor_index == n) pos = next.actions.size();
    for (auto& [offset, action] : proposed) {
      (void)offset;
      action.stable_id = StableId{next.next_stable_id++};
      next.actions.insert(next.actions.begin() + static_cast<long>(pos), action);
      rev.inserted.emplace_back(static_cast<int>(pos) + 1, action);
      ++pos;
    }
  }

  rev.resulting_plan = reindex(std::move(next));
  // Record insertion positions against the final plan.
  for (auto& [position, action] : rev.inserted) {
    const Action* placed = rev.resulting_plan.by_stable_id(action.stable_id);
    if (placed) {
      position = placed->index;
      action = *placed;
    }
  }
  return rev;
}

}  // namespace pv
