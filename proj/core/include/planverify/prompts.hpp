#pragma once

#include <map>
#include <string>
#include <string_view>

#include "planverify/plan.hpp"

namespace pv {

/// A fill-in-the-placeholder prompt. Placeholders are written {name};
/// rendering must resolve every one of them.
struct PromptTemplate {
  std::string role_preamble;
  std::string body;
};

const PromptTemplate& judge_prompt_template();
const PromptTemplate& planner_goal_prompt_template();

/// Appended to the conversation when a judge reply did not follow the
/// required output format; the judge gets exactly one retry.
const std::string& format_reminder();

/// Substitutes {key} -> value; throws TemplateError if any {placeholder}
/// survives substitution.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars);

/// One canonical action per line, each prefixed by its 1-based index
/// ("1. Driver.PickUp('Soap')"), so judge index references are unambiguous.
std::string actions_text(const Plan& plan);

std::string render_judge_prompt(const std::string& goal, const Plan& plan);
std::string render_planner_goal_prompt(const std::string& context, const Plan& plan);

/// Pulls the goal out of a planner reply: the first line beginning "GOAL:".
/// Throws GoalExtractionError when no such line exists.
std::string extract_goal(const std::string& reply);

}  // namespace pv
