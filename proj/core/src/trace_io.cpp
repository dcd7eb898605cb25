#include "planverify/trace_io.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "planverify/errors.hpp"

namespace pv {

using json = nlohmann::json;

namespace {

json arg_to_json(const Arg& arg) {
  if (arg.is_string()) return arg.str();
  double v = arg.num();
  // Keep integral values as JSON integers so files stay stable and readable.
  if (v == static_cast<long long>(v)) return static_cast<long long>(v);
  return v;
}

Arg arg_from_json(const json& j) {
  if (j.is_string()) return Arg::string(j.get<std::string>());
  return Arg::number(j.get<double>());
}

json action_to_json(const Action& a) {
  json args = json::array();
  for (const auto& arg : a.args) args.push_back(arg_to_json(arg));
  return json{{"id", a.stable_id.value},
              {"index", a.index},
              {"actor", std::string(to_string(a.actor))},
              {"verb", a.verb},
              {"args", args}};
}

Action action_from_json(const json& j) {
  Action a;
  a.stable_id = StableId{j.at("id").get<std::uint64_t>()};
  a.index = j.at("index").get<int>();
  auto actor = actor_from(j.at("actor").get<std::string>());
  if (!actor) throw Error("trace action has unknown actor");
  a.actor = *actor;
  a.verb = j.at("verb").get<std::string>();
  for (const auto& arg : j.at("args")) a.args.push_back(arg_from_json(arg));
  return a;
}

json plan_to_json(const Plan& p) {
  json actions = json::array();
  for (const auto& a : p.actions) actions.push_back(action_to_json(a));
  return json{{"goal", p.goal}, {"actions", actions}, {"next_stable_id", p.next_stable_id}};
}

Plan plan_from_json(const json& j) {
  Plan p;
  p.goal = j.at("goal").get<std::string>();
  for (const auto& a : j.at("actions")) p.actions.push_back(action_from_json(a));
  p.next_stable_id = j.at("next_stable_id").get<std::uint64_t>();
  return p;
}

json critique_to_json(const Critique& c) {
  if (const auto* r = std::get_if<RemoveCritique>(&c)) {
    return json{{"type", "remove"},
                {"index", r->index},
                {"stable_id", r->stable_id.value},
                {"reason", r->reason}};
  }
  const auto& m = std::get<MissingCritique>(c);
  json j{{"type", "missing"}, {"description", m.description}};
  if (m.insert_after) j["insert_after"] = *m.insert_after;
  return j;
}

Critique critique_from_json(const json& j) {
  if (j.at("type") == "remove") {
    return RemoveCritique{j.at("index").get<int>(),
                          StableId{j.at("stable_id").get<std::uint64_t>()},
                          j.at("reason").get<std::string>()};
  }
  MissingCritique m;
  m.description = j.at("description").get<std::string>();
  if (j.contains("insert_after")) m.insert_after = j["insert_after"].get<int>();
  return m;
}

json critique_set_to_json(const CritiqueSet& cs) {
  json critiques = json::array();
  for (const auto& c : cs.critiques) critiques.push_back(critique_to_json(c));
  return json{{"critiques", critiques},
              {"raw_text", cs.raw_text},
              {"warnings", cs.warnings},
              {"fail_open", cs.fail_open}};
}

CritiqueSet critique_set_from_json(const json& j) {
  CritiqueSet cs;
  for (const auto& c : j.at("critiques")) cs.critiques.push_back(critique_from_json(c));
  cs.raw_text = j.value("raw_text", std::string());
  cs.warnings = j.value("warnings", std::vector<std::string>{});
  cs.fail_open = j.value("fail_open", false);
  return cs;
}

json revision_to_json(const Revision& r) {
  json removed = json::array();
  for (StableId id : r.removed) removed.push_back(id.value);
  json inserted = json::array();
  for (const auto& [pos, action] : r.inserted) {
    inserted.push_back(json{{"position", pos}, {"action", action_to_json(action)}});
  }
  json unresolved = json::array();
  for (const auto& o : r.unresolved) {
    json entry{{"description", o.description}, {"note", o.note}};
    if (o.insert_after) entry["insert_after"] = *o.insert_after;
    unresolved.push_back(entry);
  }
  return json{{"removed", removed},
              {"inserted", inserted},
              {"unresolved_missing", unresolved},
              {"resulting_plan", plan_to_json(r.resulting_plan)}};
}

Revision revision_from_json(const json& j) {
  Revision r;
  for (const auto& id : j.at("removed")) r.removed.push_back(StableId{id.get<std::uint64_t>()});
  for (const auto& entry : j.at("inserted")) {
    r.inserted.emplace_back(entry.at("position").get<int>(),
                            action_from_json(entry.at("action")));
  }
  for (const auto& entry : j.at("unresolved_missing")) {
    Omission o;
    o.description = entry.at("description").get<std::string>();
    o.note = entry.value("note", std::string());
    if (entry.contains("insert_after")) o.insert_after = entry["insert_after"].get<int>();
    r.unresolved.push_back(std::move(o));
  }
  r.resulting_plan = plan_from_json(j.at("resulting_plan"));
  return r;
}

}  // namespace

std::string trace_to_json_string(const VerificationTrace& trace) {
  json iterations = json::array();
  for (const auto& it : trace.iterations) {
    json record{{"round", it.round},
                {"plan_before", plan_to_json(it.plan_before)},
                {"critiques", critique_set_to_json(it.critiques)},
                {"plan_after", plan_to_json(it.plan_after)}};
    if (it.revision) record["revision"] = revision_to_json(*it.revision);
    if (it.error_before) record["error_before"] = *it.error_before;
    if (it.error_after) record["error_after"] = *it.error_after;
    iterations.push_back(std::move(record));
  }
  json doc{{"schema", "trace/1"},
           {"episode_id", trace.episode_id},
           {"status", std::string(to_string(trace.status))},
           {"iterations", iterations},
           {"final_plan", plan_to_json(trace.final_plan)},
           {"judge", trace.judge_identity},
           {"planner", trace.planner_identity}};
  if (trace.status == TraceStatus::Failed) doc["error"] = trace.failure;
  if (trace.converged_at) doc["converged_at"] = *trace.converged_at;
  return doc.dump(2) + "\n";
}

VerificationTrace trace_from_json_string(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error("trace document is not JSON");
  if (doc.value("schema", std::string()) != "trace/1") {
    throw Error("unsupported trace schema '" + doc.value("schema", std::string()) + "'");
  }
  VerificationTrace trace;
  trace.episode_id = doc.at("episode_id").get<std::string>();
  auto status = trace_status_from(doc.value("status", "ok"));
  trace.status = status.value_or(TraceStatus::Ok);
  trace.failure = doc.value("error", std::string());
  for (const auto& record : doc.at("iterations")) {
    IterationRecord it;
    it.round = record.at("round").get<int>();
    it.plan_before = plan_from_json(record.at("plan_before"));
    it.critiques = critique_set_from_json(record.at("critiques"));
    it.plan_after = plan_from_json(record.at("plan_after"));
    if (record.contains("revision")) it.revision = revision_from_json(record["revision"]);
    if (record.contains("error_before")) it.error_before = record["error_before"].get<int>();
    if (record.contains("error_after")) it.error_after = record["error_after"].get<int>();
    trace.iterations.push_back(std::move(it));
  }
  trace.final_plan = plan_from_json(doc.at("final_plan"));
  if (doc.contains("converged_at")) trace.converged_at = doc["converged_at"].get<int>();
  trace.judge_identity = doc.value("judge", std::string());
  trace.planner_identity = doc.value("planner", std::string());
  return trace;
}

std::filesystem::path write_trace_file(const std::filesystem::path& dir,
                                       const VerificationTrace& trace) {
  std::filesystem::create_directories(dir);
  auto path = dir / (trace.episode_id + ".json");
  std::ofstream out(path, std::ios::binary);
  out << trace_to_json_string(trace);
  return path;
}

std::vector<VerificationTrace> load_trace_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<VerificationTrace> traces;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    traces.push_back(trace_from_json_string(text));
  }
  return traces;
}

}  // namespace pv
