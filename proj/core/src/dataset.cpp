#include "dicore/dataset.hpp"

#include <fstream>
#include <istream>
#include <system_error>

#include <json.hpp>

#include "dicore/error.hpp"

namespace dicore {
namespace {

using nlohmann::json;

std::vector<GroundedMention> parse_mentions(const json& arr) {
  if (!arr.is_array()) throw std::runtime_error("\"mentions\" is not an array");
  std::vector<GroundedMention> out;
  for (const auto& m : arr) {
    if (!m.is_object() || !m.contains("event_type") || !m.contains("trigger") ||
        !m["event_type"].is_string() || !m["trigger"].is_string()) {
      throw std::runtime_error("mention needs string \"event_type\" and \"trigger\"");
    }
    out.push_back({m["event_type"].get<std::string>(), m["trigger"].get<std::string>()});
  }
  return out;
}

std::string required_string(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw std::runtime_error(std::string("missing string field \"") + key + "\"");
  }
  return obj[key].get<std::string>();
}

template <typename OnObject>
std::vector<std::string> for_each_line(std::istream& source, OnObject&& on_object) {
  std::vector<std::string> diagnostics;
  std::string line;
  for (std::size_t n = 1; std::getline(source, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string prefix = "line " + std::to_string(n) + ": ";
    try {
      const json obj = json::parse(line);
      if (!obj.is_object()) throw std::runtime_error("not a JSON object");
      on_object(obj, prefix, diagnostics);
    } catch (const std::exception& e) {
      diagnostics.push_back(prefix + e.what());
    }
  }
  if (source.bad()) throw Error(ErrorCode::kIoFailure, "read error");
  return diagnostics;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<Document> Dataset::documents() const {
  std::vector<Document> docs;
  docs.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    docs.emplace_back(instances[i].id, instances[i].text,
                      i < tokens.size() ? tokens[i] : std::nullopt);
  }
  return docs;
}

Dataset load_dataset(std::istream& source) {
  Dataset ds;
  ds.diagnostics = for_each_line(source, [&](const json& obj, const std::string& prefix,
                                             std::vector<std::string>& diag) {
    GoldInstance g;
    g.id = required_string(obj, "id");
    g.text = required_string(obj, "text");
    std::optional<std::vector<std::string>> tokens;
    if (obj.contains("tokens")) tokens = obj["tokens"].get<std::vector<std::string>>();
    // Rejects blank text and inconsistent tokens before the line is accepted.
    Document probe(g.id, g.text, tokens);
    if (obj.contains("mentions") && !obj["mentions"].is_null()) {
      g.mentions = parse_mentions(obj["mentions"]);
    } else {
      g.unlabeled = true;
      diag.push_back(prefix + "document " + g.id + " is unlabeled");
    }
    for (const auto& m : g.mentions) {
      if (g.text.find(m.trigger) == std::string::npos) {
        g.flags.push_back(m.trigger);
        diag.push_back(prefix + "gold trigger \"" + m.trigger + "\" is not a substring of " + g.id);
      }
    }
    ds.instances.push_back(std::move(g));
    ds.tokens.push_back(std::move(tokens));
  });
  return ds;
}

Dataset load_dataset_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_dataset(in);
}

PredictionSet load_predictions(std::istream& source) {
  PredictionSet set;
  set.diagnostics = for_each_line(source, [&](const json& obj, const std::string&,
                                              std::vector<std::string>&) {
    Prediction p;
    p.id = required_string(obj, "id");
    if (obj.contains("mentions")) p.mentions = parse_mentions(obj["mentions"]);
    set.predictions.push_back(std::move(p));
  });
  return set;
}

PredictionSet load_predictions_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_predictions(in);
}

std::string prediction_to_jsonl(const Prediction& prediction,
                                std::optional<std::string_view> trace_json) {
  json obj;
  obj["id"] = prediction.id;
  obj["mentions"] = json::array();
  for (const auto& m : prediction.mentions) {
    obj["mentions"].push_back({{"event_type", m.event_type}, {"trigger", m.trigger}});
  }
  if (trace_json) obj["trace"] = json::parse(*trace_json);
  return obj.dump();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIoFailure, "cannot rename into " + path.string());
  }
}

}  // namespace dicore
