#include "dicore/eval.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <ostream>
#include <set>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "dicore/error.hpp"
#include "dicore/text.hpp"

namespace dicore {
namespace {

using Key = std::pair<std::string, std::string>;

std::set<Key> keys_for(std::span<const GroundedMention> mentions, Metric metric) {
  std::set<Key> keys;
  for (const auto& m : mentions) {
    switch (metric) {
      case Metric::kTI: keys.emplace("", text::fold_case(m.trigger)); break;
      case Metric::kTC: keys.emplace(m.event_type, text::fold_case(m.trigger)); break;
      case Metric::kEI: keys.emplace(m.event_type, ""); break;
    }
  }
  return keys;
}

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80 || c == '_';
}

nlohmann::json scores_json(const Scores& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
          {"tp", s.tp},               {"fp", s.fp},         {"fn", s.fn}};
}

nlohmann::json metric_json(const MetricScores& m) {
  return {{"TI", scores_json(m.ti)}, {"TC", scores_json(m.tc)}, {"EI", scores_json(m.ei)}};
}

constexpr Metric kMetrics[] = {Metric::kTI, Metric::kTC, Metric::kEI};

MetricScores macro_average(const std::map<std::string, MetricScores>& datasets) {
  MetricScores avg;
  if (datasets.empty()) return avg;
  const double n = static_cast<double>(datasets.size());
  for (const Metric metric : kMetrics) {
    Scores& out = avg.get(metric);
    for (const auto& [name, scores] : datasets) {
      const Scores& s = scores.get(metric);
      out.precision += s.precision / n;
      out.recall += s.recall / n;
      out.f1 += s.f1 / n;
      out.tp += s.tp;
      out.fp += s.fp;
      out.fn += s.fn;
    }
  }
  return avg;
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kTI: return "TI";
    case Metric::kTC: return "TC";
    case Metric::kEI: return "EI";
  }
  return "";
}

Scores Scores::from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  Scores s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

Scores score(std::span<const Prediction> preds, std::span<const GoldInstance> golds,
             Metric metric) {
  std::unordered_map<std::string, const GoldInstance*> gold_by_id;
  for (const auto& g : golds) {
    if (!gold_by_id.emplace(g.id, &g).second) {
      throw Error(ErrorCode::kIdMismatch, "duplicate gold id " + g.id);
    }
  }
  std::unordered_map<std::string, const Prediction*> pred_by_id;
  for (const auto& p : preds) {
    if (!gold_by_id.contains(p.id)) {
      throw Error(ErrorCode::kIdMismatch, "prediction id " + p.id + " has no gold instance");
    }
    if (!pred_by_id.emplace(p.id, &p).second) {
      throw Error(ErrorCode::kIdMismatch, "duplicate prediction id " + p.id);
    }
  }
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (const auto& g : golds) {
    const auto gold_keys = keys_for(g.mentions, metric);
    std::set<Key> pred_keys;
    if (auto it = pred_by_id.find(g.id); it != pred_by_id.end()) {
      pred_keys = keys_for(it->second->mentions, metric);
    }
    for (const auto& k : pred_keys) {
      if (gold_keys.contains(k)) ++tp;
      else ++fp;
    }
    for (const auto& k : gold_keys) {
      if (!pred_keys.contains(k)) ++fn;
    }
  }
  return Scores::from_counts(tp, fp, fn);
}

const Scores& MetricScores::get(Metric metric) const {
  switch (metric) {
    case Metric::kTI: return ti;
    case Metric::kTC: return tc;
    case Metric::kEI: return ei;
  }
  return ti;
}

Scores& MetricScores::get(Metric metric) {
  return const_cast<Scores&>(std::as_const(*this).get(metric));
}

MetricScores score_all(std::span<const Prediction> preds, std::span<const GoldInstance> golds) {
  return {score(preds, golds, Metric::kTI), score(preds, golds, Metric::kTC),
          score(preds, golds, Metric::kEI)};
}

EvalReport make_report(std::map<std::string, MetricScores> datasets) {
  EvalReport report;
  report.average = macro_average(datasets);
  report.datasets = std::move(datasets);
  report.runs = 1;
  return report;
}

EvalReport aggregate_runs(std::span<const EvalReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to aggregate");
  for (const auto& r : reports) {
    bool same = r.datasets.size() == reports.front().datasets.size();
    for (const auto& [name, _] : reports.front().datasets) same = same && r.datasets.contains(name);
    if (!same) throw Error(ErrorCode::kShapeMismatch, "reports cover different datasets");
  }
  EvalReport out;
  out.runs = 0;
  for (const auto& r : reports) out.runs += r.runs;
  const double n = static_cast<double>(reports.size());
  for (const auto& [name, _] : reports.front().datasets) {
    MetricScores agg;
    for (const Metric metric : kMetrics) {
      Scores& s = agg.get(metric);
      for (const auto& r : reports) {
        const Scores& run = r.datasets.at(name).get(metric);
        s.precision += run.precision / n;
        s.recall += run.recall / n;
        s.f1 += run.f1 / n;
        s.tp += run.tp;
        s.fp += run.fp;
        s.fn += run.fn;
      }
    }
    out.datasets.emplace(name, agg);
  }
  out.average = macro_average(out.datasets);
  return out;
}

std::optional<CharSpan> map_to_span(std::string_view trigger, std::string_view text) {
  if (trigger.empty()) return std::nullopt;
  const std::string hay = text::fold_case(text);
  const std::string needle = text::fold_case(trigger);
  std::optional<CharSpan> first;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + 1)) {
    const CharSpan span{pos, pos + needle.size()};
    if (!first) first = span;
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
    const bool right_ok = span.end == text.size() || !is_word_char(text[span.end]);
    if (left_ok && right_ok) return span;
  }
  return first;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json root;
  root["runs"] = report.runs;
  root["datasets"] = nlohmann::json::object();
  for (const auto& [name, scores] : report.datasets) root["datasets"][name] = metric_json(scores);
  root["average"] = metric_json(report.average);
  return root.dump(2);
}

void write_report_table(const EvalReport& report, std::ostream& out) {
  constexpr int kName = 16;
  constexpr int kCell = 7;
  const auto flags = out.flags();
  const auto row = [&](const std::string& name, const MetricScores& m) {
    out << std::left << std::setw(kName) << name.substr(0, kName);
    for (const Metric metric : kMetrics) {
      const Scores& s = m.get(metric);
      out << " |" << std::right << std::fixed << std::setprecision(1) << std::setw(kCell)
          << 100.0 * s.precision << std::setw(kCell) << 100.0 * s.recall << std::setw(kCell)
          << 100.0 * s.f1;
    }
    out << '\n';
  };
  out << std::left << std::setw(kName) << "";
  for (const Metric metric : kMetrics) {
    out << " |" << std::right << std::setw(kCell * 2) << to_string(metric) << std::setw(kCell) << "";
  }
  out << '\n' << std::left << std::setw(kName) << "Dataset";
  for (int i = 0; i < 3; ++i) {
    out << " |" << std::right << std::setw(kCell) << "P" << std::setw(kCell) << "R"
        << std::setw(kCell) << "F1";
  }
  out << '\n' << std::string(kName + 3 * (2 + 3 * kCell), '-') << '\n';
  for (const auto& [name, scores] : report.datasets) row(name, scores);
  if (report.datasets.size() != 1) row("Average", report.average);
  out << "runs: " << report.runs << '\n';
  out.flags(flags);
}

}  // namespace dicore
