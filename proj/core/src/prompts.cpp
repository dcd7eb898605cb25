#include "planverify/prompts.hpp"

#include <cctype>
#include <regex>

#include "planverify/errors.hpp"

namespace pv {

namespace {

const PromptTemplate kJudgeTemplate{
    R"(You are a Judge Agent for embodied AI task planning. Your role is to provide
thoughtful, natural language feedback on action sequences. You should:
1. Analyze each action's purpose and relevance to the goal
2. Explain your reasoning in clear, conversational language
3. Point out redundant or unnecessary actions with detailed explanations
4. Identify missing actions needed to complete the goal
5. Focus on being helpful and constructive in your feedback
Provide your feedback as natural language commentary, using #REMOVE and
#MISSING tags only when necessary. Prioritize clear explanations.)",
    R"(Please evaluate this action sequence for achieving the following goal:
GOAL: {goal}
Action Sequence: {actions_text}
Provide line-by-line analysis of each action. For each action, explain what
it does and whether it's necessary for the goal. Use this format:
ACTION: [copy the exact action]
ANNOTATION: [explain what this action does and whether it's needed for the goal.
If the action should be removed, include "#REMOVE: reason".
If it's good, just explain why.]
After analyzing all actions, if any steps are missing to complete the goal, add:
#MISSING: [describe what actions are needed]
Be thorough and conversational in your explanations. Focus on helping someone
understand why each action is or isn't necessary for achieving the goal.
Your line-by-line analysis:)"};

const PromptTemplate kPlannerGoalTemplate{
    R"(You are a Planning Agent for embodied AI tasks. Your role is to:
1. Analyze action sequences and identify their goals
2. Modify action sequences based on feedback from a Judge
3. Remove redundant actions and add missing actions as needed
4. Ensure action sequences are efficient and complete
Always preserve the original format and only make necessary changes.)",
    R"(Analyze the following action sequence and determine the overall goal.
Context: {context}
Actions:{actions_text}
Provide a concise goal statement starting with "GOAL: ")"};

const std::string kFormatReminder =
    "Your previous reply did not follow the required format. Repeat your "
    "analysis using one \"ACTION: <copied action>\" line per action, each "
    "followed by an \"ANNOTATION: ...\" line that includes \"#REMOVE: reason\" "
    "for actions to delete, and trailing \"#MISSING: ...\" lines for omitted "
    "steps. Do not reply with anything else.";

}  // namespace

const PromptTemplate& judge_prompt_template() { return kJudgeTemplate; }
const PromptTemplate& planner_goal_prompt_template() { return kPlannerGoalTemplate; }
const std::string& format_reminder() { return kFormatReminder; }

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars) {
  std::string out(tmpl);
  for (const auto& [key, value] : vars) {
    std::string token = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(token, pos)) != std::string::npos) {
      out.replace(pos, token.size(), value);
      pos += value.size();
    }
  }
  static const std::regex placeholder_re(R"(\{[a-z_]+\})");
  std::smatch m;
  if (std::regex_search(out, m, placeholder_re)) {
    throw TemplateError("unresolved placeholder " + m[0].str());
  }
  return out;
}

std::string actions_text(const Plan& plan) {
  std::string out;
  for (const auto& a : plan.actions) {
    if (!out.empty()) out += '\n';
    out += std::to_string(a.index) + ". " + format_action(a);
  }
  return out;
}

std::string render_judge_prompt(const std::string& goal, const Plan& plan) {
  const auto& t = judge_prompt_template();
  return t.role_preamble + "\n" +
         render_template(t.body, {{"goal", goal}, {"actions_text", actions_text(plan)}});
}

std::string render_planner_goal_prompt(const std::string& context, const Plan& plan) {
  const auto& t = planner_goal_prompt_template();
  return t.role_preamble + "\n" +
         render_template(t.body,
                         {{"context", context}, {"actions_text", actions_text(plan)}});
}

std::string extract_goal(const std::string& reply) {
  std::size_t start = 0;
  while (start <= reply.size()) {
    std::size_t nl = reply.find('\n', start);
    std::string line = reply.substr(start, nl == std::string::npos ? nl : nl - start);
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (line.compare(i, 5, "GOAL:") == 0) {
      std::size_t g = i + 5;
      while (g < line.size() && std::isspace(static_cast<unsigned char>(line[g]))) ++g;
      std::size_t end = line.size();
      while (end > g && std::isspace(static_cast<unsigned char>(line[end - 1]))) --end;
      return line.substr(g, end - g);
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  throw GoalExtractionError("no line beginning with \"GOAL: \" in planner reply");
}

}  // namespace pv
