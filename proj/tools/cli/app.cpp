#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dicore/error.hpp"

namespace dicore::cli {
namespace {

void add_run(CLI::App& app, RunOptions& o) {
  auto* run = app.add_subcommand("run", "Extract events from a dataset");
  run->add_option("--dataset", o.dataset, "Input JSONL")->required()->check(CLI::ExistingFile);
  run->add_option("--ontology", o.ontology, "Ontology JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--style", o.style, "dicore|md|ms")->capture_default_str();
  run->add_option("--policy", o.policy, "single-word|substring (default: by dataset name)");
  run->add_option("--max-phrase-words", o.max_phrase_words, "Substring length bound")
      ->capture_default_str();
  run->add_option("--judge", o.judge, "on|off")->capture_default_str();
  run->add_option("--runs", o.runs, "Independent runs")->capture_default_str();
  run->add_option("--temperature", o.temperature, "Sampling temperature")->capture_default_str();
  run->add_option("--top-p", o.top_p, "Nucleus mass")->capture_default_str();
  run->add_option("--max-mentions", o.max_mentions, "Mentions per document")->capture_default_str();
  run->add_option("--backend-config", o.backend_config, "Backend JSON")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--prompts", o.prompts_dir, "Prompt template directory")->check(CLI::ExistingDirectory);
  run->add_flag("--ontology-names-only", o.ontology_names_only, "Grounder prompt without definitions");
  run->add_option("--jobs", o.jobs, "Parallel documents")->capture_default_str();
  run->add_option("--seed", o.seed, "Base seed; run i uses seed+i")->capture_default_str();
  run->add_option("--out", o.out, "Output directory")->capture_default_str();
  run->add_flag("--verbose-trace", o.verbose_trace, "Embed per-stage traces");
}

void add_eval(CLI::App& app, EvalOptions& o) {
  auto* eval = app.add_subcommand("eval", "Score prediction files against gold data");
  eval->add_option("--gold", o.gold, "Gold JSONL, as PATH or NAME=PATH")->required();
  eval->add_option("--pred", o.pred, "Prediction JSONL per run, as PATH or NAME=PATH")->required();
  eval->add_option("--out", o.out, "Report JSON path");
}

void add_fsm(CLI::App& app, FsmOptions& o) {
  auto* fsm = app.add_subcommand("fsm", "Build and inspect the grounder automaton");
  fsm->add_option("--sentence", o.sentence, "Input sentence")->required();
  fsm->add_option("--ontology", o.ontology, "Ontology JSON")->required()->check(CLI::ExistingFile);
  fsm->add_option("--vocab", o.vocab, "Vocabulary JSON")->required()->check(CLI::ExistingFile);
  fsm->add_option("--encoder", o.encoder, "char|word|greedy_bpe (overrides the file)");
  fsm->add_option("--policy", o.policy, "single-word|substring")->capture_default_str();
  fsm->add_option("--max-phrase-words", o.max_phrase_words, "Substring length bound")
      ->capture_default_str();
  fsm->add_option("--max-mentions", o.max_mentions, "Mentions per document")->capture_default_str();
  fsm->add_option("--enumerate", o.enumerate, "Print the language up to N tokens");
  fsm->add_flag("--dump", o.dump, "Print every state and transition");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event detection with divergent/convergent LLM reasoning"};
  app.set_config("--config", "", "TOML file with flag values; flags override it");
  app.require_subcommand(1);
  RunOptions run;
  EvalOptions eval;
  FsmOptions fsm;
  add_run(app, run);
  add_eval(app, eval);
  add_fsm(app, fsm);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error[INVALID_ARGUMENT]: " << e.what() << '\n';
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }
  try {
    if (app.got_subcommand("run")) return cmd_run(run, out, err);
    if (app.got_subcommand("eval")) return cmd_eval(eval, out, err);
    return cmd_fsm(fsm, out, err);
  } catch (const Error& e) {
    std::string message = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (message.starts_with(prefix)) message.erase(0, prefix.size());
    for (auto& c : message) {
      if (c == '\n') c = ' ';
    }
    err << "error[" << to_string(e.code()) << "]: " << message << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::string message = e.what();
    for (auto& c : message) {
      if (c == '\n') c = ' ';
    }
    err << "error[INTERNAL]: " << message << '\n';
    return 1;
  }
}

}  // namespace dicore::cli
