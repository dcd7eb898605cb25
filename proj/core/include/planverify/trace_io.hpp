#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "planverify/loop.hpp"

namespace pv {

/// Serializes a trace as a schema-versioned ("trace/1") JSON document.
/// Serialization is deterministic: keys are sorted and no wall-clock data is
/// embedded, so identical runs produce byte-identical files.
std::string trace_to_json_string(const VerificationTrace& trace);
VerificationTrace trace_from_json_string(const std::string& text);

/// Writes <dir>/<episode_id>.json.
std::filesystem::path write_trace_file(const std::filesystem::path& dir,
                                       const VerificationTrace& trace);

/// Loads every *.json trace in the directory, sorted by filename.
std::vector<VerificationTrace> load_trace_dir(const std::filesystem::path& dir);

}  // namespace pv
