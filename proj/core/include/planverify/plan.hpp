#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pv {

enum class Actor { Driver, Commander };

std::string_view to_string(Actor actor);
std::optional<Actor> actor_from(std::string_view name);

/// Identity assigned when an action enters an episode; it survives removals,
/// insertions and reindexing, which is what makes evaluation immune to index
/// shifts across refinement rounds.
struct StableId {
  std::uint64_t value = 0;
  auto operator<=>(const StableId&) const = default;
};

/// One call argument: quoted string or decimal number.
struct Arg {
  std::variant<std::string, double> value;

  bool is_string() const { return std::holds_alternative<std::string>(value); }
  bool is_number() const { return !is_string(); }
  const std::string& str() const { return std::get<std::string>(value); }
  double num() const { return std::get<double>(value); }

  static Arg string(std::string s) { return Arg{std::move(s)}; }
  static Arg number(double d) { return Arg{d}; }

  friend bool operator==(const Arg& a, const Arg& b) { return a.value == b.value; }
};

struct Action {
  Actor actor = Actor::Driver;
  std::string verb;
  std::vector<Arg> args;
  StableId stable_id{};  // 0 until a plan adopts the action
  int index = 0;         // 1-based position, maintained by reindex

  /// First string argument, the "object" of manipulation verbs.
  std::optional<std::string> object() const;
};

struct Plan {
  std::string goal;
  std::vector<Action> actions;
  /// Watermark for fresh stable ids; never decreases, so ids are unique
  /// across the whole episode even after removals and insertions.
  std::uint64_t next_stable_id = 1;

  std::size_t size() const { return actions.size(); }
  bool empty() const { return actions.empty(); }
  const Action* by_stable_id(StableId id) const;
};

struct MissingDescriptor {
  std::string verb;
  std::string object;
  std::string note;
};

/// Ground-truth labels for one episode. remove_ids always refers to stable
/// ids of the plan the annotation was made against (the initial plan).
struct ErrorAnnotation {
  std::set<StableId> remove_ids;
  std::vector<MissingDescriptor> missing_steps;

  bool empty() const { return remove_ids.empty() && missing_steps.empty(); }
};

/// Bookkeeping written by the error injector so a refined plan can be checked
/// against its clean source.
struct SyntheticTruth {
  std::vector<std::string> clean_actions;  // canonical lines
  struct Deleted {
    int clean_position = 0;  // 1-based position in the clean plan
    std::string line;
  };
  std::vector<Deleted> deleted;
};

struct Episode {
  std::string episode_id;
  std::string context;
  Plan initial_plan;
  std::optional<ErrorAnnotation> annotations;
  std::optional<SyntheticTruth> truth;
};

struct ParseOptions {
  /// When set, verbs outside the whitelist are rejected (strict mode).
  std::optional<std::set<std::string>> verb_whitelist;
};

/// Parses one DSL line: actor "." verb "(" [arg ("," arg)*] ")".
/// Leading/trailing whitespace and trailing // comments are stripped; string
/// args are single-quoted, numbers are plain decimals. The returned action
/// has no stable id or index yet. Throws ParseError with a 1-based column.
Action parse_action(std::string_view line, const ParseOptions& opts = {});

/// Canonical rendering: no interior whitespace, single-quoted strings,
/// numbers with minimal digits (a trailing ".0" is dropped, so Turn(90) and
/// Turn(90.0) print identically).
std::string format_action(const Action& action);
std::string format_arg(const Arg& arg);

/// Parses a whole plan; blank lines and #/"//" comment lines are skipped.
/// Stable ids are fresh and monotone; indices run 1..n. Throws PlanParseError
/// listing every bad line, or EmptyPlan when nothing remains.
/// first_line is the source line number of lines[0], used in error messages.
Plan parse_plan(std::string goal, const std::vector<std::string>& lines,
                const ParseOptions& opts = {}, int first_line = 1);

/// Rewrites indices to contiguous 1..n, preserving order and stable ids.
Plan reindex(Plan plan);

bool canonical_equal(const Action& a, const Action& b);
/// Action-sequence equality on canonical text; goals are not compared.
bool canonical_equal(const Plan& a, const Plan& b);

/// Plan text format: first line "GOAL: <text>", then one action per line.
std::string format_plan(const Plan& plan);
Plan parse_plan_text(std::string_view text, const ParseOptions& opts = {});

}  // namespace pv

template <>
struct std::hash<pv::StableId> {
  std::size_t operator()(const pv::StableId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
