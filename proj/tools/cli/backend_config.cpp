#include "backend_config.hpp"

#include <fstream>

#include "dicore/error.hpp"
#include "dicore/http_backend.hpp"
#include "dicore/scripted_backend.hpp"

namespace dicore::cli {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string string_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::kInvalidConfig, std::string("backend entry needs string \"") + key + "\"");
  }
  return obj[key].get<std::string>();
}

HttpEndpoint endpoint_from(const json& entry) {
  HttpEndpoint ep;
  ep.base_url = string_field(entry, "base_url");
  ep.model = entry.value("model", std::string());
  ep.api_key_env = entry.value("api_key_env", ep.api_key_env);
  ep.timeout = std::chrono::milliseconds(entry.value("timeout_ms", ep.timeout.count()));
  ep.concurrency = entry.value("concurrency", ep.concurrency);
  ep.retry.max_attempts = entry.value("max_attempts", ep.retry.max_attempts);
  ep.retry.base_delay =
      std::chrono::milliseconds(entry.value("base_delay_ms", ep.retry.base_delay.count()));
  return ep;
}

std::optional<Vocabulary> load_vocab(const json& config, const std::filesystem::path& base) {
  if (!config.contains("vocabulary")) return std::nullopt;
  const json& v = config["vocabulary"];
  std::string path;
  std::optional<EncoderMode> mode;
  if (v.is_string()) {
    path = v.get<std::string>();
  } else if (v.is_object()) {
    path = string_field(v, "path");
    if (v.contains("mode")) {
      mode = parse_encoder_mode(v["mode"].get<std::string>());
      if (!mode) throw Error(ErrorCode::kInvalidConfig, "unknown encoder mode " + v["mode"].dump());
    }
  } else {
    throw Error(ErrorCode::kInvalidConfig, "\"vocabulary\" must be a path or an object");
  }
  return load_vocabulary_file(resolve(base, path), mode);
}

std::shared_ptr<Backend> make_backend(const json& entry, const std::filesystem::path& base,
                                      const std::optional<Vocabulary>& vocab) {
  if (!entry.is_object()) throw Error(ErrorCode::kInvalidConfig, "backend entry must be an object");
  const std::string kind = string_field(entry, "kind");
  const auto need_vocab = [&] {
    if (!vocab) throw Error(ErrorCode::kInvalidConfig, kind + " backend needs a \"vocabulary\"");
    return *vocab;
  };
  if (kind == "scripted") {
    return make_scripted_backend(ScriptedSpec::from_file(resolve(base, string_field(entry, "fixture"))),
                                 vocab);
  }
  if (kind == "remote_chat") {
    return std::make_shared<RemoteChatBackend>(
        endpoint_from(entry), entry.value("path", std::string("/v1/chat/completions")));
  }
  if (kind == "local_logit") {
    std::optional<std::string> chat_path;
    if (entry.contains("chat_path")) chat_path = entry["chat_path"].get<std::string>();
    return std::make_shared<LocalLogitBackend>(endpoint_from(entry), need_vocab(),
                                               entry.value("logits_path", std::string("/logits")),
                                               chat_path);
  }
  if (kind == "uniform") return std::make_shared<UniformLogitBackend>(need_vocab().size());
  if (kind == "random") {
    return std::make_shared<RandomLogitBackend>(need_vocab().size(),
                                                entry.value("seed", std::uint64_t{0}));
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown backend kind \"" + kind + "\"");
}

}  // namespace

BackendSetup backend_setup_from_json(const json& config, const std::filesystem::path& base_dir) {
  if (!config.is_object()) throw Error(ErrorCode::kInvalidConfig, "backend config must be an object");
  BackendSetup setup;
  try {
    setup.vocab = load_vocab(config, base_dir);
    if (config.contains("backend")) {
      auto shared = make_backend(config["backend"], base_dir, setup.vocab);
      setup.backends = {shared, shared};
    }
    if (config.contains("chat")) setup.backends.chat = make_backend(config["chat"], base_dir, setup.vocab);
    if (config.contains("logits")) {
      setup.backends.logits = make_backend(config["logits"], base_dir, setup.vocab);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  // A logit backend that also serves chat can stand in for a missing chat backend.
  if (!setup.backends.chat && setup.backends.logits &&
      setup.backends.logits->descriptor().capabilities.chat) {
    setup.backends.chat = setup.backends.logits;
  }
  if (!setup.backends.chat && !setup.backends.logits) {
    throw Error(ErrorCode::kInvalidConfig, "backend config defines no backend");
  }
  if (setup.backends.chat) setup.descriptors.push_back(setup.backends.chat->descriptor());
  if (setup.backends.logits && setup.backends.logits != setup.backends.chat) {
    setup.descriptors.push_back(setup.backends.logits->descriptor());
  }
  return setup;
}

BackendSetup load_backend_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  json config = json::parse(in, nullptr, false);
  if (config.is_discarded()) {
    throw Error(ErrorCode::kInvalidConfig, "backend config " + path.string() + " is not valid JSON");
  }
  return backend_setup_from_json(config, path.parent_path());
}

json descriptor_json(const BackendDescriptor& d) {
  return {{"kind", std::string(to_string(d.kind))},
          {"endpoint", d.endpoint},
          {"model", d.model},
          {"capabilities", {{"chat", d.capabilities.chat}, {"logits", d.capabilities.logits}}}};
}

}  // namespace dicore::cli
