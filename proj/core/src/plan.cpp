#include "planverify/plan.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "planverify/errors.hpp"

namespace pv {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Cuts a trailing // comment, ignoring slashes inside single-quoted strings.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '\'') {
      in_string = !in_string;
    } else if (!in_string && c == '/' && i + 1 < line.size() && line[i + 1] == '/') {
      return line.substr(0, i);
    }
  }
  return line;
}

// Cursor over the original line so error columns stay 1-based and accurate.
class Scanner {
 public:
  Scanner(std::string_view line, std::size_t begin, std::size_t end)
      : line_(line), pos_(begin), end_(end) {}

  void skip_ws() {
    while (pos_ < end_ && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= end_; }
  char peek() const { return pos_ < end_ ? line_[pos_] : '\0'; }
  int column() const { return static_cast<int>(pos_) + 1; }

  void expect(char c, const std::string& what) {
    if (at_end() || line_[pos_] != c) {
      throw ParseError("expected '" + std::string(1, c) + "' " + what, column());
    }
    ++pos_;
  }

  std::string_view read_identifier() {
    std::size_t start = pos_;
    if (pos_ < end_ && is_ident_start(line_[pos_])) {
      ++pos_;
      while (pos_ < end_ && is_ident_char(line_[pos_])) ++pos_;
    }
    return line_.substr(start, pos_ - start);
  }

  Arg read_arg() {
    if (peek() == '\'') {
      int open_col = column();
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < end_ && line_[pos_] != '\'') ++pos_;
      if (pos_ >= end_) throw ParseError("unterminated string", open_col);
      std::string text(line_.substr(start, pos_ - start));
      ++pos_;  // closing quote
      return Arg::string(std::move(text));
    }
    int start_col = column();
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    std::size_t digits_begin = pos_;
    while (pos_ < end_ && is_digit(line_[pos_])) ++pos_;
    if (pos_ == digits_begin) throw ParseError("expected argument", start_col);
    if (pos_ < end_ && line_[pos_] == '.') {
      ++pos_;
      std::size_t frac_begin = pos_;
      while (pos_ < end_ && is_digit(line_[pos_])) ++pos_;
      if (pos_ == frac_begin) throw ParseError("malformed number", start_col);
    }
    double value = 0;
    auto text = line_.substr(start, pos_ - start);
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || p != text.data() + text.size()) {
      throw ParseError("malformed number", start_col);
    }
    return Arg::number(value);
  }

 private:
  std::string_view line_;
  std::size_t pos_;
  std::size_t end_;
};

std::string canonical_number(double v) {
  assert(std::isfinite(v));
  if (v == std::floor(v) && std::abs(v) < 9.0e18) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  assert(ec == std::errc());
  return std::string(buf, p);
}

}  // namespace

std::string_view to_string(Actor actor) {
  return actor == Actor::Driver ? "Driver" : "Commander";
}

std::optional<Actor> actor_from(std::string_view name) {
  if (name == "Driver") return Actor::Driver;
  if (name == "Commander") return Actor::Commander;
  return std::nullopt;
}

std::optional<std::string> Action::object() const {
  for (const auto& a : args) {
    if (a.is_string()) return a.str();
  }
  return std::nullopt;
}

const Action* Plan::by_stable_id(StableId id) const {
  for (const auto& a : actions) {
    if (a.stable_id == id) return &a;
  }
  return nullptr;
}

Action parse_action(std::string_view line, const ParseOptions& opts) {
  std::string_view body = strip_comment(line);
  std::size_t begin = 0;
  std::size_t end = body.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(body[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(body[end - 1]))) --end;
  if (begin == end) throw ParseError("empty action", 1);

  Scanner sc(body, begin, end);

  int actor_col = sc.column();
  auto actor_name = sc.read_identifier();
  if (actor_name.empty()) throw ParseError("expected actor name", actor_col);
  auto actor = actor_from(actor_name);
  if (!actor) {
    throw ParseError("unknown actor '" + std::string(actor_name) + "'", actor_col);
  }

  sc.expect('.', "after actor");

  int verb_col = sc.column();
  auto verb = sc.read_identifier();
  if (verb.empty()) throw ParseError("missing verb", verb_col);
  if (!std::isupper(static_cast<unsigned char>(verb.front()))) {
    throw ParseError("verb must start with an uppercase letter", verb_col);
  }
  if (opts.verb_whitelist && !opts.verb_whitelist->count(std::string(verb))) {
    throw ParseError("verb '" + std::string(verb) + "' not in whitelist", verb_col);
  }

  sc.skip_ws();
  sc.expect('(', "after verb");

  Action action;
  action.actor = *actor;
  action.verb = std::string(verb);

  sc.skip_ws();
  if (sc.peek() != ')') {
    while (true) {
      action.args.push_back(sc.read_arg());
      sc.skip_ws();
      if (sc.peek() == ',') {
        sc.expect(',', "");
        sc.skip_ws();
        continue;
      }
      break;
    }
  }
  sc.expect(')', "to close the argument list");
  sc.skip_ws();
  if (!sc.at_end()) throw ParseError("trailing characters after ')'", sc.column());
  return action;
}

std::string format_arg(const Arg& arg) {
  if (arg.is_string()) return "'" + arg.str() + "'";
  return canonical_number(arg.num());
}

std::string format_action(const Action& action) {
  std::string out(to_string(action.actor));
  out += '.';
  out += action.verb;
  out += '(';
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (i > 0) out += ',';
    out += format_arg(action.args[i]);
  }
  out += ')';
  return out;
}

namespace {

bool is_comment_or_blank(std::string_view line) {
  auto t = trim(line);
  return t.empty() || t.front() == '#' || t.substr(0, 2) == "//";
}

}  // namespace

Plan parse_plan(std::string goal, const std::vector<std::string>& lines,
                const ParseOptions& opts, int first_line) {
  Plan plan;
  plan.goal = std::move(goal);
  std::vector<LineError> errors;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (is_comment_or_blank(line)) continue;
    try {
      plan.actions.push_back(parse_action(line, opts));
    } catch (const ParseError& e) {
      errors.push_back({first_line + static_cast<int>(i), e.column(), e.message()});
    }
  }
  if (!errors.empty()) throw PlanParseError(std::move(errors));
  if (plan.actions.empty()) throw EmptyPlan();
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    plan.actions[i].stable_id = StableId{static_cast<std::uint64_t>(i + 1)};
    plan.actions[i].index = static_cast<int>(i + 1);
  }
  plan.next_stable_id = plan.actions.size() + 1;
  return plan;
}

Plan reindex(Plan plan) {
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    plan.actions[i].index = static_cast<int>(i + 1);
  }
  return plan;
}

bool canonical_equal(const Action& a, const Action& b) {
  return a.actor == b.actor && a.verb == b.verb && a.args == b.args;
}

bool canonical_equal(const Plan& a, const Plan& b) {
  if (a.actions.size() != b.actions.size()) return false;
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    if (!canonical_equal(a.actions[i], b.actions[i])) return false;
  }
  return true;
}

std::string format_plan(const Plan& plan) {
  std::string out = "GOAL: " + plan.goal + "\n";
  for (const auto& a : plan.actions) {
    out += format_action(a);
    out += '\n';
  }
  return out;
}

Plan parse_plan_text(std::string_view text, const ParseOptions& opts) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  std::size_t goal_line = 0;
  while (goal_line < lines.size() && trim(lines[goal_line]).empty()) ++goal_line;
  if (goal_line == lines.size() ||
      trim(lines[goal_line]).substr(0, 5) != "GOAL:") {
    throw PlanParseError({{static_cast<int>(goal_line + 1), 1,
                           "expected a leading 'GOAL: <text>' line"}});
  }
  std::string goal(trim(trim(lines[goal_line]).substr(5)));
  std::vector<std::string> body(lines.begin() + goal_line + 1, lines.end());
  return parse_plan(std::move(goal), body, opts, static_cast<int>(goal_line + 2));
}

}  // namespace pv
