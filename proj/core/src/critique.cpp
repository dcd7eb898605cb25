#include "planverify/critique.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "planverify/errors.hpp"

namespace pv {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops leading whitespace and list-bullet decoration so markers are found
// even in lightly markdown-formatted replies. '#' is kept; it introduces tags.
std::string_view strip_bullets(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '-' || c == '>') {
      ++i;
    } else {
      break;
    }
  }
  return s.substr(i);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Joins captured lines into one whitespace-normalized string.
std::string join_normalized(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& raw : lines) {
    auto t = trim_view(raw);
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += std::string(t);
  }
  // collapse interior runs
  std::string collapsed;
  bool prev_space = false;
  for (char c : out) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (space && prev_space) continue;
    collapsed += space ? ' ' : c;
    prev_space = space;
  }
  return std::string(trim_view(collapsed));
}

// "3. Driver.X()" or "3) Driver.X()" -> "Driver.X()".
std::string_view strip_index_prefix(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0 || i >= s.size()) return s;
  if (s[i] != '.' && s[i] != ')') return s;
  return trim_view(s.substr(i + 1));
}

struct Block {
  std::string action_text;
  std::vector<std::string> body;
};

// Finds the single plan action whose canonical text matches; nullopt when
// the text does not parse, or matches zero or several actions.
std::optional<int> bind_by_text(std::string_view text, const Plan& plan) {
  Action parsed;
  try {
    parsed = parse_action(strip_index_prefix(text));
  } catch (const ParseError&) {
    return std::nullopt;
  }
  std::string canon = format_action(parsed);
  std::optional<int> found;
  for (const auto& a : plan.actions) {
    if (format_action(a) == canon) {
      if (found) return std::nullopt;  // ambiguous
      found = a.index;
    }
  }
  return found;
}

std::optional<int> resolve_before_anchor(const std::string& description, const Plan& plan) {
  std::string low = to_lower(description);
  std::size_t pos = low.find("before");
  while (pos != std::string::npos) {
    static const std::regex action_re(
        R"(([A-Za-z][A-Za-z0-9]*\.[A-Z][A-Za-z0-9]*\([^)]*\)))");
    std::smatch m;
    std::string tail = description.substr(pos + 6);
    if (std::regex_search(tail, m, action_re)) {
      if (auto idx = bind_by_text(m[1].str(), plan)) return *idx - 1;
    }
    pos = low.find("before", pos + 6);
  }
  return std::nullopt;
}

}  // namespace

std::string normalized_text(std::string_view text) {
  std::string out;
  bool prev_space = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (space) {
      if (!prev_space && !out.empty()) out += ' ';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    prev_space = space;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

CritiqueSet parse_judge_output(const std::string& text, const Plan& plan) {
  CritiqueSet out;
  out.raw_text = text;

  std::vector<Block> blocks;
  std::vector<std::vector<std::string>> missing_captures;
  enum class Sink { None, Body, Missing };
  Sink sink = Sink::None;

  for (const auto& line : split_lines(text)) {
    auto marker = strip_bullets(line);
    if (starts_with_ci(marker, "ACTION:")) {
      blocks.push_back({std::string(trim_view(marker.substr(7))), {}});
      sink = Sink::Body;
    } else if (starts_with_ci(marker, "#MISSING:")) {
      missing_captures.push_back({std::string(trim_view(marker.substr(9)))});
      sink = Sink::Missing;
    } else if (sink == Sink::Body) {
      blocks.back().body.push_back(line);
    } else if (sink == Sink::Missing) {
      missing_captures.back().push_back(line);
    }
  }

  const int n = static_cast<int>(plan.actions.size());
  int tags = 0;

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Block& block = blocks[k];
    std::string body = join_normalized(block.body);
    std::string low = to_lower(body);
    std::size_t tag = low.find("#remove:");
    if (tag == std::string::npos) continue;
    ++tags;
    std::string reason(trim_view(std::string_view(body).substr(tag + 8)));
    if (reason.empty()) reason = "(no reason given)";

    std::optional<int> index = bind_by_text(block.action_text, plan);
    if (!index) {
      int ordinal = static_cast<int>(k) + 1;
      if (ordinal <= n) index = ordinal;
    }
    if (!index) {
      out.warnings.push_back("dropped #REMOVE in unbound ACTION block " +
                             std::to_string(k + 1));
      continue;
    }
    out.critiques.push_back(
        RemoveCritique{*index, plan.actions[*index - 1].stable_id, reason});
  }

  for (const auto& capture : missing_captures) {
    ++tags;
    std::string description = join_normalized(capture);
    if (description.empty()) description = "(no description given)";
    std::optional<int> anchor = resolve_before_anchor(description, plan);
    out.critiques.push_back(MissingCritique{description, anchor ? anchor : std::optional<int>(n)});
  }

  if (!blocks.empty() && static_cast<int>(blocks.size()) != n) {
    out.warnings.push_back("judge reply has " + std::to_string(blocks.size()) +
                           " ACTION blocks for " + std::to_string(n) + " actions");
  }

  if (blocks.empty() && tags == 0 && !std::string(trim_view(text)).empty()) {
    throw MalformedOutput("judge reply contains no ACTION blocks and no tags");
  }
  return out;
}

CritiqueSet normalize_critiques(CritiqueSet cs) {
  std::map<int, RemoveCritique> removes;
  std::vector<MissingCritique> missings;
  std::set<std::string> seen_missing;

  for (auto& c : cs.critiques) {
    if (auto* r = std::get_if<RemoveCritique>(&c)) {
      auto [it, inserted] = removes.emplace(r->index, *r);
      if (!inserted) it->second.reason += "; " + r->reason;
    } else {
      auto& m = std::get<MissingCritique>(c);
      if (seen_missing.insert(normalized_text(m.description)).second) {
        missings.push_back(std::move(m));
      }
    }
  }

  CritiqueSet out;
  out.raw_text = std::move(cs.raw_text);
  out.warnings = std::move(cs.warnings);
  out.fail_open = cs.fail_open;
  for (auto& [idx, r] : removes) out.critiques.emplace_back(std::move(r));
  for (auto& m : missings) out.critiques.emplace_back(std::move(m));
  return out;
}

}  // namespace pv
