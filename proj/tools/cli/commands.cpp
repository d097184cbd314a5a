#include "commands.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include "dicore/automaton.hpp"
#include "dicore/dataset.hpp"
#include "dicore/error.hpp"
#include "dicore/eval.hpp"
#include "dicore/ontology.hpp"
#include "dicore/prompts.hpp"
#include "dicore/text.hpp"

namespace dicore::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kMaxPrintedDiagnostics = 20;

AtomizationPolicy parse_policy(const std::string& name, int max_phrase_words) {
  const std::string folded = text::fold_case(name);
  if (folded == "single-word" || folded == "single_word") return AtomizationPolicy::single_word();
  if (folded == "substring") return AtomizationPolicy::substring(max_phrase_words);
  throw Error(ErrorCode::kInvalidConfig, "unknown policy \"" + name + "\" (single-word|substring)");
}

bool parse_on_off(const std::string& value) {
  const std::string folded = text::fold_case(value);
  if (folded == "on" || folded == "true" || folded == "1") return true;
  if (folded == "off" || folded == "false" || folded == "0") return false;
  throw Error(ErrorCode::kInvalidConfig, "expected on|off, got \"" + value + "\"");
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void print_diagnostics(const std::vector<std::string>& diagnostics, const std::string& source,
                       std::ostream& err) {
  for (std::size_t i = 0; i < diagnostics.size() && i < kMaxPrintedDiagnostics; ++i) {
    err << "warning: " << source << ": " << diagnostics[i] << '\n';
  }
  if (diagnostics.size() > kMaxPrintedDiagnostics) {
    err << "warning: " << source << ": " << diagnostics.size() - kMaxPrintedDiagnostics
        << " more diagnostics\n";
  }
}

std::pair<std::string, std::string> split_named(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {fs::path(arg).stem().string(), arg};
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

json policy_json(const AtomizationPolicy& p) {
  return {{"mode", p.mode == AtomizationMode::kSingleWord ? "single-word" : "substring"},
          {"max_phrase_words", p.max_phrase_words}};
}

}  // namespace

PipelineConfig pipeline_config(const RunOptions& o) {
  PipelineConfig c;
  const auto style = parse_prompt_style(o.style);
  if (!style) throw Error(ErrorCode::kInvalidConfig, "unknown style \"" + o.style + "\" (dicore|md|ms)");
  c.prompt_style = *style;
  if (!o.policy.empty()) {
    c.atomization = parse_policy(o.policy, o.max_phrase_words);
  } else if (auto by_name = policy_for_dataset(fs::path(o.dataset).stem().string())) {
    c.atomization = *by_name;
  } else {
    c.atomization = AtomizationPolicy::single_word();
  }
  c.judge_enabled = parse_on_off(o.judge);
  c.runs = o.runs;
  c.temperature = o.temperature;
  c.top_p = o.top_p;
  c.max_mentions = o.max_mentions;
  c.ontology_names_only = o.ontology_names_only;
  c.validate();
  return c;
}

json manifest_json(const PipelineConfig& c, const RunOptions& o,
                   const std::vector<BackendDescriptor>& backends,
                   const std::string& prompts_version) {
  json m;
  m["tool"] = "dicore";
  m["version"] = kToolVersion;
  m["config"] = {{"temperature", c.temperature},
                 {"top_p", c.top_p},
                 {"runs", c.runs},
                 {"judge_enabled", c.judge_enabled},
                 {"atomization", policy_json(c.atomization)},
                 {"max_mentions", c.max_mentions},
                 {"prompt_style", std::string(to_string(c.prompt_style))},
                 {"ontology_names_only", c.ontology_names_only},
                 {"dreamer_max_tokens", c.dreamer_max_tokens},
                 {"judge_max_tokens", c.judge_max_tokens}};
  m["prompts_version"] = prompts_version;
  m["dataset"] = o.dataset;
  m["ontology"] = o.ontology;
  m["backend_config"] = o.backend_config;
  m["backends"] = json::array();
  for (const auto& d : backends) m["backends"].push_back(descriptor_json(d));
  m["base_seed"] = o.seed;
  m["seeds"] = json::array();
  for (int i = 0; i < c.runs; ++i) m["seeds"].push_back(o.seed + static_cast<std::uint64_t>(i));
  m["jobs"] = o.jobs;
  return m;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const std::string started = utc_now();
  const PipelineConfig config = pipeline_config(o);
  if (o.jobs < 1) throw Error(ErrorCode::kInvalidConfig, "--jobs must be positive");
  if (o.backend_config.empty()) throw Error(ErrorCode::kInvalidConfig, "--backend-config is required");
  auto ontology = load_ontology_file(o.ontology);
  const Dataset dataset = load_dataset_file(o.dataset);
  print_diagnostics(dataset.diagnostics, o.dataset, err);
  const std::vector<Document> docs = dataset.documents();
  BackendSetup setup = load_backend_config(o.backend_config);
  PromptSet prompts = o.prompts_dir.empty() ? PromptSet::builtin() : PromptSet::load(o.prompts_dir);
  const std::string prompts_version = prompts.version();
  const Pipeline pipeline(std::move(ontology), setup.backends, setup.vocab, config,
                          std::move(prompts));

  const fs::path out_dir(o.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out_dir.string());

  json manifest = manifest_json(config, o, setup.descriptors, prompts_version);
  manifest["documents"] = docs.size();
  manifest["outputs"] = json::array();
  manifest["failures"] = json::array();
  for (int run = 0; run < config.runs; ++run) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(run);
    const auto results = pipeline.run_batch(docs, seed, o.jobs);
    std::string contents;
    std::size_t failures = 0;
    for (const auto& r : results) {
      if (r.error) {
        ++failures;
        err << "warning: run " << run << ": document " << r.id << ": " << *r.error << '\n';
      }
      const Prediction p{r.id, r.mentions};
      if (o.verbose_trace) {
        contents += prediction_to_jsonl(p, trace_to_json(r.trace));
      } else {
        contents += prediction_to_jsonl(p);
      }
      contents += '\n';
    }
    const std::string name = "predictions_run" + std::to_string(run) + ".jsonl";
    write_file_atomic(out_dir / name, contents);
    manifest["outputs"].push_back(name);
    manifest["failures"].push_back(failures);
    out << "run " << run << " (seed " << seed << "): " << results.size() << " documents, "
        << failures << " failed -> " << (out_dir / name).string() << '\n';
  }
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_now();
  write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  out << "manifest -> " << (out_dir / "manifest.json").string() << '\n';
  return 0;
}

int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  if (o.gold.empty()) throw Error(ErrorCode::kInvalidConfig, "--gold is required");
  if (o.pred.empty()) throw Error(ErrorCode::kInvalidConfig, "at least one --pred is required");
  std::map<std::string, std::vector<GoldInstance>> golds;
  for (const auto& arg : o.gold) {
    auto [name, path] = split_named(arg);
    Dataset ds = load_dataset_file(path);
    print_diagnostics(ds.diagnostics, path, err);
    if (!golds.emplace(name, std::move(ds.instances)).second) {
      throw Error(ErrorCode::kInvalidConfig, "dataset name \"" + name + "\" given twice");
    }
  }
  std::map<std::string, std::vector<std::vector<Prediction>>> preds;
  for (const auto& arg : o.pred) {
    auto [name, path] = arg.find('=') == std::string::npos && golds.size() == 1
                            ? std::pair{golds.begin()->first, arg}
                            : split_named(arg);
    if (!golds.contains(name)) {
      throw Error(ErrorCode::kShapeMismatch, "predictions " + path + " name no gold dataset \"" +
                                                 name + "\"");
    }
    PredictionSet set = load_predictions_file(path);
    print_diagnostics(set.diagnostics, path, err);
    preds[name].push_back(std::move(set.predictions));
  }
  std::size_t runs = 0;
  for (const auto& [name, _] : golds) {
    const auto it = preds.find(name);
    const std::size_t n = it == preds.end() ? 0 : it->second.size();
    if (runs == 0) runs = n;
    if (n == 0 || n != runs) {
      throw Error(ErrorCode::kShapeMismatch,
                  "every dataset needs the same number of prediction files; \"" + name + "\" has " +
                      std::to_string(n));
    }
  }
  std::vector<EvalReport> per_run;
  for (std::size_t r = 0; r < runs; ++r) {
    std::map<std::string, MetricScores> datasets;
    for (const auto& [name, gold] : golds) datasets.emplace(name, score_all(preds[name][r], gold));
    per_run.push_back(make_report(std::move(datasets)));
  }
  const EvalReport aggregate = aggregate_runs(per_run);
  write_report_table(aggregate, out);
  if (!o.out.empty()) {
    json report = json::parse(report_to_json(aggregate));
    report["per_run"] = json::array();
    for (const auto& r : per_run) report["per_run"].push_back(json::parse(report_to_json(r)));
    write_file_atomic(o.out, report.dump(2) + "\n");
    out << "report -> " << o.out << '\n';
  }
  return 0;
}

int cmd_fsm(const FsmOptions& o, std::ostream& out, std::ostream&) {
  if (o.vocab.empty()) throw Error(ErrorCode::kInvalidConfig, "--vocab is required");
  std::optional<EncoderMode> mode;
  if (!o.encoder.empty()) {
    mode = parse_encoder_mode(o.encoder);
    if (!mode) throw Error(ErrorCode::kInvalidConfig, "unknown encoder \"" + o.encoder + "\"");
  }
  const EventOntology ontology = load_ontology_file(o.ontology);
  const Vocabulary vocab = load_vocabulary_file(o.vocab, mode);
  const Document doc("sentence", o.sentence);
  const AtomizationPolicy policy = parse_policy(o.policy, o.max_phrase_words);
  policy.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const auto candidates = atomize(doc, policy);
  const TokenAutomaton automaton = build_grounder_fsm(ontology, candidates, vocab, o.max_mentions);
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);

  const AutomatonStats s = stats(automaton);
  out << "event types: " << ontology.size() << '\n';
  out << "candidates (" << candidates.size() << "):";
  for (const auto& c : candidates) out << " \"" << c << '"';
  out << '\n';
  out << "vocabulary: " << vocab.size() << " tokens\n";
  out << "states: " << s.states << '\n';
  out << "transitions: " << s.transitions << '\n';
  for (std::size_t i = 0; i < std::size(s.per_tag); ++i) {
    out << "  " << to_string(static_cast<StateTag>(i)) << ": " << s.per_tag[i] << '\n';
  }
  out << "max mentions: " << automaton.max_mentions() << '\n';
  out << "longest path: " << automaton.longest_path() << " tokens\n";
  out << "build time: " << std::fixed << std::setprecision(3) << elapsed.count() << " ms\n";
  if (o.dump) dump(automaton, out);
  if (o.enumerate > 0) {
    const auto language = enumerate_language(automaton, static_cast<std::size_t>(o.enumerate));
    out << "language (" << language.size() << " strings, <= " << o.enumerate << " tokens):\n";
    for (const auto& sentence : language) out << sentence << '\n';
  }
  return 0;
}

}  // namespace dicore::cli
