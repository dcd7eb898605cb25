#include "planverify/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "planverify/errors.hpp"

namespace pv {

using json = nlohmann::json;

namespace {

// All sampling goes through this wrapper so the byte-level behaviour is a
// function of mt19937_64 alone, not of library-specific distributions.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t pick(std::uint64_t n) { return gen_() % n; }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  bool chance(double rate) {
    if (rate <= 0.0) return false;
    if (rate >= 1.0) return true;
    return unit() < rate;
  }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

std::string id_for(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth-%04d", i);
  return buf;
}

}  // namespace

InjectionSummary& InjectionSummary::operator+=(const InjectionSummary& other) {
  duplicates += other.duplicates;
  inverse_pairs += other.inverse_pairs;
  irrelevant_pickups += other.irrelevant_pickups;
  deletions += other.deletions;
  return *this;
}

Episode episode_from_json_string(const std::string& text, const std::string& origin) {
  std::vector<SchemaIssue> issues;
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw SchemaError({{origin, "(document)", "not a JSON object"}});
  }

  Episode ep;
  if (!doc.contains("episode_id") || !doc["episode_id"].is_string() ||
      doc["episode_id"].get<std::string>().empty()) {
    issues.push_back({origin, "episode_id", "required non-empty string"});
  } else {
    ep.episode_id = doc["episode_id"].get<std::string>();
  }
  ep.context = doc.value("context", std::string());
  std::string goal = doc.value("goal", std::string());

  if (!doc.contains("actions") || !doc["actions"].is_array() || doc["actions"].empty()) {
    issues.push_back({origin, "actions", "required non-empty array of action strings"});
    throw SchemaError(std::move(issues));
  }
  std::vector<std::string> lines;
  for (const auto& a : doc["actions"]) {
    if (!a.is_string()) {
      issues.push_back({origin, "actions", "every action must be a string"});
      throw SchemaError(std::move(issues));
    }
    lines.push_back(a.get<std::string>());
  }
  try {
    ep.initial_plan = parse_plan(goal, lines);
  } catch (const PlanParseError& e) {
    for (const auto& le : e.errors()) {
      issues.push_back({origin, "actions[" + std::to_string(le.line - 1) + "]", le.message});
    }
    throw SchemaError(std::move(issues));
  } catch (const EmptyPlan&) {
    issues.push_back({origin, "actions", "no actions after skipping blanks and comments"});
    throw SchemaError(std::move(issues));
  }

  const int n = static_cast<int>(ep.initial_plan.size());
  if (doc.contains("annotations") && !doc["annotations"].is_null()) {
    const json& ann = doc["annotations"];
    ErrorAnnotation annotation;
    if (ann.contains("remove_indices")) {
      for (const auto& idx : ann["remove_indices"]) {
        if (!idx.is_number_integer()) {
          issues.push_back({origin, "annotations.remove_indices", "indices must be integers"});
          continue;
        }
        int i = idx.get<int>();
        if (i < 1 || i > n) {
          issues.push_back({origin, "annotations.remove_indices",
                            "index " + std::to_string(i) + " out of range (indices are 1-based, plan has " +
                                std::to_string(n) + " actions)"});
          continue;
        }
        annotation.remove_ids.insert(ep.initial_plan.actions[i - 1].stable_id);
      }
    }
    if (ann.contains("missing_steps")) {
      for (const auto& m : ann["missing_steps"]) {
        if (!m.is_object() || !m.contains("verb") || !m.contains("object")) {
          issues.push_back({origin, "annotations.missing_steps",
                            "each entry needs at least verb and object"});
          continue;
        }
        annotation.missing_steps.push_back({m["verb"].get<std::string>(),
                                            m["object"].get<std::string>(),
                                            m.value("note", std::string())});
      }
    }
    ep.annotations = std::move(annotation);
  }

  if (doc.contains("truth") && !doc["truth"].is_null()) {
    const json& truth = doc["truth"];
    SyntheticTruth st;
    if (truth.contains("clean_actions")) {
      for (const auto& line : truth["clean_actions"]) st.clean_actions.push_back(line.get<std::string>());
    }
    if (truth.contains("deleted")) {
      for (const auto& d : truth["deleted"]) {
        st.deleted.push_back({d.at("position").get<int>(), d.at("action").get<std::string>()});
      }
    }
    ep.truth = std::move(st);
  }

  if (!issues.empty()) throw SchemaError(std::move(issues));
  return ep;
}

std::string episode_to_json_string(const Episode& episode) {
  json actions = json::array();
  for (const auto& a : episode.initial_plan.actions) actions.push_back(format_action(a));

  json doc{{"schema", "episode/1"},
           {"episode_id", episode.episode_id},
           {"context", episode.context},
           {"goal", episode.initial_plan.goal},
           {"actions", std::move(actions)}};

  if (episode.annotations) {
    json remove_indices = json::array();
    for (const auto& a : episode.initial_plan.actions) {
      if (episode.annotations->remove_ids.count(a.stable_id)) remove_indices.push_back(a.index);
    }
    json missing = json::array();
    for (const auto& m : episode.annotations->missing_steps) {
      missing.push_back({{"verb", m.verb}, {"object", m.object}, {"note", m.note}});
    }
    doc["annotations"] = {{"remove_indices", std::move(remove_indices)},
                          {"missing_steps", std::move(missing)}};
  }
  if (episode.truth) {
    json deleted = json::array();
    for (const auto& d : episode.truth->deleted) {
      deleted.push_back({{"position", d.clean_position}, {"action", d.line}});
    }
    doc["truth"] = {{"clean_actions", episode.truth->clean_actions},
                    {"deleted", std::move(deleted)}};
  }
  return doc.dump(2) + "\n";
}

std::filesystem::path write_episode_file(const std::filesystem::path& dir,
                                         const Episode& episode) {
  std::filesystem::create_directories(dir);
  auto path = dir / (episode.episode_id + ".episode.json");
  std::ofstream out(path, std::ios::binary);
  out << episode_to_json_string(episode);
  return path;
}

std::vector<Episode> load_episodes(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw EmptyCorpus("corpus directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto name = entry.path().filename().string();
    if (name.size() > 13 && name.substr(name.size() - 13) == ".episode.json") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw EmptyCorpus("no *.episode.json files under " + dir.string());
  }
  std::sort(files.begin(), files.end());

  std::vector<Episode> episodes;
  std::vector<SchemaIssue> issues;
  std::set<std::string> seen_ids;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      Episode ep = episode_from_json_string(text, f.filename().string());
      if (!seen_ids.insert(ep.episode_id).second) {
        issues.push_back({f.filename().string(), "episode_id",
                          "duplicate id '" + ep.episode_id + "'"});
        continue;
      }
      episodes.push_back(std::move(ep));
    } catch (const SchemaError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!issues.empty()) throw SchemaError(std::move(issues));
  return episodes;
}

const std::vector<std::string>& distractor_objects() {
  static const std::vector<std::string> objects{
      "RemoteControl", "Television", "Newspaper", "Pillow",   "Vase",
      "Statue",        "CreditCard", "TeddyBear", "Boots",    "Watch"};
  return objects;
}

const std::vector<PlanTemplate>& clean_task_templates() {
  static const std::vector<PlanTemplate> templates{
      {"Make coffee",
       {"Driver.PickUp('Mug')", "Driver.Place('CoffeeMachine')",
        "Driver.ToggleOn('CoffeeMachine')", "Driver.Pour('Mug')"}},
      {"Clean the bathroom",
       {"Driver.PickUp('Sponge')", "Driver.Move(3.5)", "Driver.Place('Sink')",
        "Driver.ToggleOn('Faucet')", "Driver.Clean('Sink')", "Driver.ToggleOff('Faucet')"}},
      {"Make a sandwich",
       {"Driver.PickUp('Knife')", "Driver.Slice('Bread')", "Driver.Slice('Tomato')",
        "Driver.Place('Plate')", "Driver.PickUp('Bread')", "Driver.Place('Plate')"}},
      {"Boil water",
       {"Driver.PickUp('Pot')", "Driver.Place('Sink')", "Driver.ToggleOn('Faucet')",
        "Driver.Fill('Pot')", "Driver.ToggleOff('Faucet')", "Driver.Place('StoveBurner')",
        "Driver.ToggleOn('StoveBurner')"}},
      {"Set the dinner table",
       {"Driver.PickUp('Plate')", "Driver.Move(2.0)", "Driver.Place('DiningTable')",
        "Driver.PickUp('Fork')", "Driver.Place('DiningTable')", "Driver.PickUp('Knife')",
        "Driver.Place('DiningTable')"}},
      {"Water the plant",
       {"Driver.PickUp('WateringCan')", "Driver.Fill('WateringCan')", "Driver.Move(4.0)",
        "Driver.Pour('HousePlant')"}},
      {"Heat the soup",
       {"Driver.PickUp('Bowl')", "Driver.Open('Microwave')", "Driver.Place('Microwave')",
        "Driver.Close('Microwave')", "Driver.ToggleOn('Microwave')"}},
      {"Wash the dishes",
       {"Driver.PickUp('Plate')", "Driver.Place('Sink')", "Driver.ToggleOn('Faucet')",
        "Driver.Clean('Plate')", "Driver.ToggleOff('Faucet')", "Driver.Place('DishRack')"}},
      {"Make toast",
       {"Driver.PickUp('Bread')", "Driver.Slice('Bread')", "Driver.Place('Toaster')",
        "Driver.ToggleOn('Toaster')"}},
      {"Start the laundry",
       {"Driver.Open('WashingMachine')", "Driver.PickUp('Shirt')",
        "Driver.Place('WashingMachine')", "Driver.Pour('Detergent')",
        "Driver.Close('WashingMachine')", "Driver.ToggleOn('WashingMachine')"}},
      {"Empty the trash",
       {"Driver.PickUp('TrashBag')", "Driver.Move(6.0)", "Driver.Turn(180)",
        "Driver.Place('TrashCan')"}},
      {"Make a salad",
       {"Driver.PickUp('Knife')", "Driver.Slice('Lettuce')", "Driver.Slice('Tomato')",
        "Driver.Slice('Cucumber')", "Driver.Place('Bowl')"}},
      {"Tidy the desk",
       {"Driver.PickUp('Book')", "Driver.Place('Shelf')", "Driver.PickUp('Pen')",
        "Driver.Place('Drawer')", "Driver.Clean('Desk')"}},
      {"Serve a glass of water",
       {"Driver.PickUp('Glass')", "Driver.Move(2.5)", "Driver.ToggleOn('Faucet')",
        "Driver.Fill('Glass')", "Driver.ToggleOff('Faucet')", "Driver.Place('DiningTable')"}},
      {"Cook an egg",
       {"Driver.PickUp('Pan')", "Driver.Place('StoveBurner')", "Driver.ToggleOn('StoveBurner')",
        "Driver.PickUp('Egg')", "Driver.Place('Pan')", "Driver.ToggleOff('StoveBurner')"}},
  };
  return templates;
}

InjectionResult inject_errors(const Plan& clean, const ErrorProfile& profile,
                              bool require_errors) {
  bool all_zero = profile.duplicate_rate <= 0 && profile.inverse_pair_rate <= 0 &&
                  profile.irrelevant_pickup_rate <= 0 && profile.deletion_rate <= 0;
  if (all_zero && require_errors) {
    throw ProfileError("at least one injection was demanded but every rate is zero");
  }

  SeededRng rng(profile.seed);
  InjectionResult result;
  for (const auto& a : clean.actions) result.book.clean_actions.push_back(format_action(a));

  // Objects available for inverse toggle pairs.
  std::vector<std::string> plan_objects;
  std::set<std::string> plan_object_set;
  for (const auto& a : clean.actions) {
    for (const auto& arg : a.args) {
      if (arg.is_string() && plan_object_set.insert(arg.str()).second) {
        plan_objects.push_back(arg.str());
      }
    }
  }
  std::vector<std::string> unused_distractors;
  for (const auto& d : distractor_objects()) {
    if (!plan_object_set.count(d)) unused_distractors.push_back(d);
  }

  // Pass 1: deletions over the clean plan, never deleting the last survivor.
  std::vector<Action> survivors;
  for (std::size_t i = 0; i < clean.actions.size(); ++i) {
    const Action& a = clean.actions[i];
    bool last_survivor = survivors.empty() && i + 1 == clean.actions.size();
    if (!last_survivor && rng.chance(profile.deletion_rate)) {
      result.truth.missing_steps.push_back(
          {a.verb, a.object().value_or(""), "required step was removed"});
      result.book.deleted.push_back({static_cast<int>(i + 1), format_action(a)});
      ++result.summary.deletions;
      continue;
    }
    survivors.push_back(a);
  }

  // Pass 2: insertions after surviving actions, in fixed draw order.
  Plan noisy;
  noisy.goal = clean.goal;
  noisy.next_stable_id = clean.next_stable_id;
  auto fresh = [&noisy] { return StableId{noisy.next_stable_id++}; };
  auto flag_inserted = [&](Action action) {
    action.stable_id = fresh();
    result.truth.remove_ids.insert(action.stable_id);
    noisy.actions.push_back(std::move(action));
  };

  for (const auto& a : survivors) {
    noisy.actions.push_back(a);
    if (rng.chance(profile.duplicate_rate)) {
      Action copy = a;
      flag_inserted(std::move(copy));
      ++result.summary.duplicates;
    }
    if (rng.chance(profile.inverse_pair_rate)) {
      std::string object = plan_objects.empty()
                               ? distractor_objects().front()
                               : plan_objects[rng.pick(plan_objects.size())];
      bool on_first = rng.pick(2) == 0;
      Action first{Actor::Driver, on_first ? "ToggleOn" : "ToggleOff", {Arg::string(object)}};
      Action second{Actor::Driver, on_first ? "ToggleOff" : "ToggleOn", {Arg::string(object)}};
      flag_inserted(std::move(first));
      flag_inserted(std::move(second));
      ++result.summary.inverse_pairs;
    }
    if (rng.chance(profile.irrelevant_pickup_rate) && !unused_distractors.empty()) {
      std::string object = unused_distractors[rng.pick(unused_distractors.size())];
      Action pickup{Actor::Driver, "PickUp", {Arg::string(object)}};
      flag_inserted(std::move(pickup));
      ++result.summary.irrelevant_pickups;
    }
  }

  result.noisy = reindex(std::move(noisy));
  return result;
}

Plan reconstruct_clean(const Plan& refined, const SyntheticTruth& truth) {
  Plan plan = refined;
  std::vector<SyntheticTruth::Deleted> deleted = truth.deleted;
  std::sort(deleted.begin(), deleted.end(),
            [](const auto& a, const auto& b) { return a.clean_position < b.clean_position; });
  for (const auto& d : deleted) {
    Action action = parse_action(d.line);
    action.stable_id = StableId{plan.next_stable_id++};
    std::size_t pos = std::min<std::size_t>(static_cast<std::size_t>(d.clean_position - 1),
                                            plan.actions.size());
    plan.actions.insert(plan.actions.begin() + static_cast<long>(pos), std::move(action));
  }
  return reindex(std::move(plan));
}

std::vector<Episode> generate_corpus(int n, const ErrorProfile& profile,
                                     InjectionSummary* summary) {
  if (n < 1) throw ConfigError("corpus size must be >= 1");
  const auto& templates = clean_task_templates();
  SeededRng master(profile.seed);

  std::vector<Episode> episodes;
  for (int i = 1; i <= n; ++i) {
    const PlanTemplate& tpl = templates[master.pick(templates.size())];
    ErrorProfile ep_profile = profile;
    ep_profile.seed = master.raw();

    Plan clean = parse_plan(tpl.goal, tpl.lines);
    InjectionResult injected = inject_errors(clean, ep_profile);
    if (summary) *summary += injected.summary;

    // Re-ingest so stable ids are positional (1..m), exactly as a loader
    // round-trip would produce.
    std::vector<std::string> lines;
    for (const auto& a : injected.noisy.actions) lines.push_back(format_action(a));
    Episode episode;
    episode.episode_id = id_for(i);
    std::string lowered = tpl.goal;
    if (!lowered.empty()) lowered[0] = static_cast<char>(std::tolower(lowered[0]));
    episode.context = "Commander: please " + lowered + ".";
    episode.initial_plan = parse_plan(tpl.goal, lines);

    ErrorAnnotation annotation;
    for (std::size_t pos = 0; pos < injected.noisy.actions.size(); ++pos) {
      if (injected.truth.remove_ids.count(injected.noisy.actions[pos].stable_id)) {
        annotation.remove_ids.insert(episode.initial_plan.actions[pos].stable_id);
      }
    }
    annotation.missing_steps = injected.truth.missing_steps;
    episode.annotations = std::move(annotation);
    episode.truth = injected.book;
    episodes.push_back(std::move(episode));
  }
  return episodes;
}

}  // namespace pv
