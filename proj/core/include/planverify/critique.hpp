#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "planverify/plan.hpp"

namespace pv {

/// Flag one action for removal. The index refers to the plan that was judged;
/// the stable id is resolved at parse time so later rounds cannot be confused
/// by index shifts.
struct RemoveCritique {
  int index = 0;  // 1-based into the judged plan
  StableId stable_id{};
  std::string reason;
};

/// Flag an omitted step. insert_after is a 1-based index into the judged
/// plan; absent means "append at the end".
struct MissingCritique {
  std::string description;
  std::optional<int> insert_after;
};

using Critique = std::variant<RemoveCritique, MissingCritique>;

struct CritiqueSet {
  std::vector<Critique> critiques;
  std::string raw_text;               // verbatim judge output, kept for audit
  std::vector<std::string> warnings;  // non-fatal parse events
  bool fail_open = false;             // reply was unusable and treated as empty

  bool empty() const { return critiques.empty(); }
};

/// Parses a judge reply against the exact plan that was judged.
///
/// Grammar (the published contract for scripted judges and tests):
///   - "ACTION: <text>" starts a block; the following lines up to the next
///     ACTION/#MISSING marker form its annotation body.
///   - A body containing "#REMOVE: <reason>" flags that block's action; the
///     reason runs to the end of the block.
///   - "#MISSING: <description>" lines (normally trailing) each flag an
///     omission; description runs to the next marker. insert_after defaults
///     to the plan length unless the description says "before <action>",
///     which is resolved like an ACTION line.
///   - Blocks bind to actions by exact canonical-text match when unique,
///     otherwise by block ordinal (k-th block -> k-th action).
///   - Tags are case-insensitive.
///
/// Unbound blocks and block-count mismatches produce warnings, not failures;
/// unbound #REMOVE tags are dropped. Throws MalformedOutput only when a
/// non-blank reply contains no blocks and no tags at all.
CritiqueSet parse_judge_output(const std::string& text, const Plan& plan);

/// Deduplicates Removes per index (first reason kept, extra reasons joined
/// with "; ") and Missings with identical normalized descriptions; orders
/// Removes ascending by index followed by Missings in arrival order.
/// Idempotent; never grows the set.
CritiqueSet normalize_critiques(CritiqueSet cs);

/// Lowercased, whitespace-collapsed text; the key used for Missing dedup.
std::string normalized_text(std::string_view text);

}  // namespace pv
