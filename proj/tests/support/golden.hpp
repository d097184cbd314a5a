#pragma once

// Loader for the qualitative-trace fixtures in data/golden.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicore/ontology.hpp"
#include "dicore/pipeline.hpp"
#include "dicore/scripted_backend.hpp"
#include "oracles.hpp"

namespace golden {

struct Row {
  std::string id;
  std::string dataset;
  std::string policy;
  std::string text;
  std::vector<oracle::Pair> dreamer;
  std::vector<oracle::Pair> grounder;
  std::vector<oracle::Pair> judge_yes;
  std::vector<oracle::Pair> final_output;
};

inline std::filesystem::path dir() { return oracle::data_dir() / "golden"; }

inline std::vector<Row> rows() {
  std::ifstream in(dir() / "expected.json");
  const auto j = nlohmann::json::parse(in);
  std::vector<Row> out;
  const auto pairs = [](const nlohmann::json& a) {
    std::vector<oracle::Pair> v;
    for (const auto& p : a) v.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    return v;
  };
  for (const auto& r : j) {
    out.push_back({r["id"], r["dataset"], r["policy"], r["text"], pairs(r["dreamer"]),
                   pairs(r["grounder"]), pairs(r["judge_yes"]), pairs(r["final"])});
  }
  return out;
}

inline dicore::EventOntology ontology(const std::string& dataset) {
  return dicore::load_ontology_file(dir() / ("ontology_" + dataset + ".json"));
}

inline std::shared_ptr<dicore::Backend> backend(const dicore::Vocabulary& vocab) {
  return dicore::make_scripted_backend(
      dicore::ScriptedSpec::from_file(dir() / "scripted_fixture.json"), vocab);
}

inline dicore::AtomizationPolicy policy(const Row& row) {
  return row.policy == "substring" ? dicore::AtomizationPolicy::substring()
                                   : dicore::AtomizationPolicy::single_word();
}

inline std::vector<oracle::Pair> as_pairs(const std::vector<dicore::GroundedMention>& ms) {
  std::vector<oracle::Pair> out;
  for (const auto& m : ms) out.emplace_back(m.event_type, m.trigger);
  return out;
}

inline std::vector<oracle::Pair> as_pairs(const std::vector<dicore::FreeFormMention>& ms) {
  std::vector<oracle::Pair> out;
  for (const auto& m : ms) out.emplace_back(m.event_name, m.trigger);
  return out;
}

}  // namespace golden
