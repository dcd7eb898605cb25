#include "planverify/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "planverify/critique.hpp"
#include "planverify/errors.hpp"

namespace pv {

using json = nlohmann::json;

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

bool missing_flag_matches(const std::string& flag, const MissingDescriptor& d) {
  std::string verb = to_lower(d.verb);
  bool verb_ok = false;
  for (const auto& w : words_of(flag)) {
    if (to_lower(w) == verb) {
      verb_ok = true;
      break;
    }
  }
  if (!verb_ok) return false;
  return to_lower(flag).find(to_lower(d.object)) != std::string::npos;
}

}  // namespace

std::set<StableId> flagged_remove_ids(const VerificationTrace& trace) {
  std::set<StableId> flagged;
  for (const auto& it : trace.iterations) {
    if (!it.revision) continue;
    for (StableId id : it.revision->removed) flagged.insert(id);
  }
  return flagged;
}

std::vector<std::string> flagged_missing_descriptions(const VerificationTrace& trace) {
  std::vector<std::string> flags;
  std::set<std::string> seen;
  for (const auto& it : trace.iterations) {
    for (const auto& c : it.critiques.critiques) {
      if (const auto* m = std::get_if<MissingCritique>(&c)) {
        if (seen.insert(normalized_text(m->description)).second) {
          flags.push_back(m->description);
        }
      }
    }
  }
  return flags;
}

LevelCounts match_remove_level(const std::set<StableId>& flagged,
                               const std::set<StableId>& annotated) {
  LevelCounts counts;
  for (StableId id : flagged) {
    if (annotated.count(id)) {
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  for (StableId id : annotated) {
    if (!flagged.count(id)) ++counts.fn;
  }
  return counts;
}

LevelCounts match_missing_level(const std::vector<std::string>& flags,
                                const std::vector<MissingDescriptor>& descriptors,
                                std::vector<MatchedPair>* pairs) {
  LevelCounts counts;
  std::vector<bool> taken(descriptors.size(), false);
  for (const auto& flag : flags) {
    bool matched = false;
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
      if (taken[i] || !missing_flag_matches(flag, descriptors[i])) continue;
      taken[i] = true;
      matched = true;
      ++counts.tp;
      if (pairs) {
        pairs->push_back({flag, descriptors[i].verb + " '" + descriptors[i].object + "'"});
      }
      break;
    }
    if (!matched) ++counts.fp;
  }
  for (bool t : taken) {
    if (!t) ++counts.fn;
  }
  return counts;
}

MatchResult match_flags(const VerificationTrace& trace, const ErrorAnnotation& annotation) {
  MatchResult result;
  result.remove_level = match_remove_level(flagged_remove_ids(trace), annotation.remove_ids);
  result.missing_level = match_missing_level(flagged_missing_descriptions(trace),
                                             annotation.missing_steps, &result.pairs);
  result.tp = result.remove_level.tp + result.missing_level.tp;
  result.fp = result.remove_level.fp + result.missing_level.fp;
  result.fn = result.remove_level.fn + result.missing_level.fn;
  return result;
}

MatchResult match_flags(const VerificationTrace& trace, const Episode& episode) {
  if (trace.episode_id != episode.episode_id) {
    throw EpisodeMismatch("trace is for '" + trace.episode_id + "', episode is '" +
                          episode.episode_id + "'");
  }
  if (!episode.annotations) {
    throw EpisodeMismatch("episode '" + episode.episode_id + "' carries no annotations");
  }
  return match_flags(trace, *episode.annotations);
}

Rational harmonic_f1(Rational precision, Rational recall) {
  if (precision + recall == Rational::zero()) return Rational::zero();
  return Rational(2, 1) * precision * recall / (precision + recall);
}

Metrics metrics_from_counts(long tp, long fp, long fn) {
  Metrics m;
  m.recall = tp + fn == 0 ? Rational::one() : Rational(tp, tp + fn);
  m.precision = tp + fp == 0 ? Rational::one() : Rational(tp, tp + fp);
  m.f1 = harmonic_f1(m.precision, m.recall);
  return m;
}

Metrics compute_metrics(const MatchResult& match) {
  return metrics_from_counts(match.tp, match.fp, match.fn);
}

ConvergenceStats aggregate_convergence(const std::vector<VerificationTrace>& traces) {
  if (traces.empty()) throw EmptyRun("no traces to aggregate");

  ConvergenceStats stats;
  int max_round = 1;
  for (const auto& t : traces) {
    if (t.status == TraceStatus::Failed) continue;
    ++stats.total;
    max_round = std::max(max_round, static_cast<int>(t.iterations.size()));
    if (t.converged_at) max_round = std::max(max_round, *t.converged_at);
  }
  if (stats.total == 0) throw EmptyRun("every trace failed");

  stats.newly_converged.assign(static_cast<std::size_t>(max_round), 0);
  double length_reduction_sum = 0.0;
  double length_fraction_sum = 0.0;
  long measured = 0;
  for (const auto& t : traces) {
    if (t.status == TraceStatus::Failed) continue;
    if (t.converged_at) {
      ++stats.newly_converged[static_cast<std::size_t>(*t.converged_at - 1)];
    } else {
      ++stats.non_converged;
    }
    if (auto before = t.initial_length()) {
      double after = static_cast<double>(t.final_plan.size());
      length_reduction_sum += *before - after;
      if (*before > 0) length_fraction_sum += (*before - after) / *before;
      ++measured;
    }
  }
  long running = 0;
  for (long count : stats.newly_converged) {
    running += count;
    stats.cumulative.emplace_back(running, stats.total);
  }
  if (measured > 0) {
    stats.mean_length_reduction = length_reduction_sum / static_cast<double>(measured);
    stats.mean_length_reduction_frac = length_fraction_sum / static_cast<double>(measured);
  }

  // Decay fit over mean annotated error count by round. Round k's value is
  // the error count after k rounds; a trace's last value carries forward once
  // it has stopped iterating.
  std::vector<double> mean_errors;
  for (int k = 0; k <= max_round; ++k) {
    double sum = 0.0;
    long n = 0;
    for (const auto& t : traces) {
      if (t.status == TraceStatus::Failed || t.iterations.empty()) continue;
      std::optional<int> value;
      if (k == 0) {
        value = t.iterations.front().error_before;
      } else {
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                t.iterations.size());
        value = t.iterations[idx - 1].error_after;
      }
      if (value) {
        sum += *value;
        ++n;
      }
    }
    if (n > 0) mean_errors.push_back(sum / static_cast<double>(n));
  }
  std::vector<std::pair<double, double>> points;
  for (std::size_t k = 0; k < mean_errors.size(); ++k) {
    if (mean_errors[k] > 0) points.emplace_back(static_cast<double>(k), std::log(mean_errors[k]));
  }
  if (points.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : points) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double n = static_cast<double>(points.size());
    double denom = n * sxx - sx * sx;
    if (denom != 0) {
      double slope = (n * sxy - sx * sy) / denom;
      stats.decay_rate = 1.0 - std::exp(slope);
    }
  }
  return stats;
}

RunReport summarize_run(const std::vector<VerificationTrace>& traces,
                        const std::vector<Episode>& episodes,
                        const std::string& judge_identity,
                        const std::string& planner_identity) {
  if (traces.empty()) throw EmptyRun("no traces to report on");

  std::map<std::string, const Episode*> by_id;
  for (const auto& ep : episodes) by_id[ep.episode_id] = &ep;

  RunReport report;
  report.judge_identity = judge_identity;
  report.planner_identity = planner_identity;
  report.episodes = static_cast<long>(traces.size());

  bool iterated = false;
  for (const auto& trace : traces) {
    EpisodeReportRow row;
    row.episode_id = trace.episode_id;
    row.converged_at = trace.converged_at;
    row.status = trace.status;
    row.len_before = trace.initial_length().value_or(static_cast<int>(trace.final_plan.size()));
    row.len_after = static_cast<int>(trace.final_plan.size());
    if (trace.iterations.size() > 1) iterated = true;
    report.fail_open_rounds += trace.fail_open_rounds();
    if (trace.status == TraceStatus::Oscillating) ++report.oscillating;
    if (trace.status == TraceStatus::Failed) ++report.failed;

    auto it = by_id.find(trace.episode_id);
    if (it != by_id.end() && it->second->annotations && trace.status != TraceStatus::Failed) {
      MatchResult match = match_flags(trace, *it->second->annotations);
      report.pooled.tp += match.tp;
      report.pooled.fp += match.fp;
      report.pooled.fn += match.fn;
      report.pooled.remove_level.tp += match.remove_level.tp;
      report.pooled.remove_level.fp += match.remove_level.fp;
      report.pooled.remove_level.fn += match.remove_level.fn;
      report.pooled.missing_level.tp += match.missing_level.tp;
      report.pooled.missing_level.fp += match.missing_level.fp;
      report.pooled.missing_level.fn += match.missing_level.fn;
      row.metrics = compute_metrics(match);
      row.match = std::move(match);
      report.has_metrics = true;
    }
    report.rows.push_back(std::move(row));
  }
  report.mode = iterated ? "iterative" : "single-pass";
  if (report.has_metrics) report.pooled_metrics = compute_metrics(report.pooled);
  report.convergence = aggregate_convergence(traces);
  return report;
}

namespace {

json metrics_to_json(const Metrics& m) {
  return json{{"recall", m.recall.value()},
              {"recall_pct", m.recall.percent_1dp()},
              {"precision", m.precision.value()},
              {"precision_pct", m.precision.percent_1dp()},
              {"f1", m.f1.value()},
              {"f1_pct", m.f1.percent_1dp()}};
}

json counts_to_json(const LevelCounts& c) {
  return json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
}

}  // namespace

std::string report_to_json_string(const RunReport& report) {
  json doc{{"schema", "report/1"},
           {"mode", report.mode},
           {"judge", report.judge_identity},
           {"planner", report.planner_identity},
           {"episodes", report.episodes},
           {"fail_open_rounds", report.fail_open_rounds},
           {"oscillating", report.oscillating},
           {"failed", report.failed}};

  if (report.has_metrics) {
    json pooled = metrics_to_json(report.pooled_metrics);
    pooled["tp"] = report.pooled.tp;
    pooled["fp"] = report.pooled.fp;
    pooled["fn"] = report.pooled.fn;
    pooled["remove_level"] = counts_to_json(report.pooled.remove_level);
    pooled["missing_level"] = counts_to_json(report.pooled.missing_level);
    doc["metrics"] = {{"pooled", pooled}};
    json rows = json::array();
    for (const auto& row : report.rows) {
      if (!row.match) continue;
      json r{{"episode_id", row.episode_id},
             {"tp", row.match->tp},
             {"fp", row.match->fp},
             {"fn", row.match->fn}};
      r.update(metrics_to_json(*row.metrics));
      rows.push_back(std::move(r));
    }
    doc["metrics"]["per_episode"] = std::move(rows);
  }

  json episodes = json::array();
  for (const auto& row : report.rows) {
    json r{{"episode_id", row.episode_id},
           {"status", std::string(to_string(row.status))},
           {"len_before", row.len_before},
           {"len_after", row.len_after}};
    if (row.converged_at) r["converged_at"] = *row.converged_at;
    episodes.push_back(std::move(r));
  }
  doc["episode_outcomes"] = std::move(episodes);

  const auto& conv = report.convergence;
  json cumulative = json::array();
  for (const auto& frac : conv.cumulative) {
    cumulative.push_back(json{{"value", frac.value()}, {"pct", frac.percent_1dp()}});
  }
  json convergence{{"traces", conv.total},
                   {"newly_converged", conv.newly_converged},
                   {"cumulative", std::move(cumulative)},
                   {"non_converged", conv.non_converged},
                   {"mean_length_reduction", conv.mean_length_reduction},
                   {"mean_length_reduction_frac", conv.mean_length_reduction_frac}};
  if (conv.decay_rate) convergence["decay_rate"] = *conv.decay_rate;
  doc["convergence"] = std::move(convergence);

  return doc.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& report) {
  std::ostringstream out;
  out << "episode_id,tp,fp,fn,recall,precision,f1,converged_at,len_before,len_after\n";
  for (const auto& row : report.rows) {
    out << row.episode_id << ',';
    if (row.match) {
      out << row.match->tp << ',' << row.match->fp << ',' << row.match->fn << ','
          << row.metrics->recall.percent_1dp() << ',' << row.metrics->precision.percent_1dp()
          << ',' << row.metrics->f1.percent_1dp() << ',';
    } else {
      out << ",,,,,,";
    }
    if (row.converged_at) out << *row.converged_at;
    out << ',' << row.len_before << ',' << row.len_after << '\n';
  }
  return out.str();
}

std::string convergence_curve_svg(const ConvergenceStats& stats) {
  const int width = 640, height = 400;
  const int left = 60, right = 20, top = 40, bottom = 50;
  const int plot_w = width - left - right;
  const int plot_h = height - top - bottom;
  const std::size_t rounds = stats.cumulative.size();

  auto x_of = [&](std::size_t r) {
    if (rounds <= 1) return left + plot_w / 2;
    return left + static_cast<int>(static_cast<double>(r) / (rounds - 1) * plot_w);
  };
  auto y_of = [&](double pct) { return top + static_cast<int>((100.0 - pct) / 100.0 * plot_h); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">Cumulative convergence by round</text>\n";
  for (int pct = 0; pct <= 100; pct += 25) {
    int y = y_of(pct);
    svg << "  <line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
    svg << "  <text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << pct
        << "%</text>\n";
  }
  svg << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";

  std::string points;
  for (std::size_t r = 0; r < rounds; ++r) {
    double pct = static_cast<double>(stats.cumulative[r].percent_tenths()) / 10.0;
    if (!points.empty()) points += ' ';
    points += std::to_string(x_of(r)) + "," + std::to_string(y_of(pct));
  }
  if (!points.empty()) {
    svg << "  <polyline points=\"" << points
        << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  }
  for (std::size_t r = 0; r < rounds; ++r) {
    double pct = static_cast<double>(stats.cumulative[r].percent_tenths()) / 10.0;
    int x = x_of(r), y = y_of(pct);
    svg << "  <circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    svg << "  <text x=\"" << x << "\" y=\"" << y - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << stats.cumulative[r].percent_1dp() << "%</text>\n";
    svg << "  <text x=\"" << x << "\" y=\"" << top + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << r + 1
        << "</text>\n";
  }
  svg << "  <text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">round</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace pv
