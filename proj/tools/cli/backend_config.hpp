#pragma once

// Backend configuration file:
//
//   {
//     "vocabulary": "vocab.json" | {"path": "vocab.json", "mode"?: "char"|"word"|"greedy_bpe"},
//     "chat":   <backend>,
//     "logits": <backend>,
//     "backend": <backend>          // shorthand for both roles
//   }
//
//   <backend> = {"kind": "scripted", "fixture": "fixture.json"}
//             | {"kind": "remote_chat", "base_url", "model", "path"?, ...http}
//             | {"kind": "local_logit", "base_url", "model", "logits_path"?, "chat_path"?, ...http}
//             | {"kind": "uniform"} | {"kind": "random", "seed"?: int}
//   http     = "api_key_env"?, "timeout_ms"?, "concurrency"?, "max_attempts"?, "base_delay_ms"?
//
// Relative paths resolve against the configuration file's directory.

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dicore/backend.hpp"
#include "dicore/pipeline.hpp"
#include "dicore/vocabulary.hpp"

namespace dicore::cli {

struct BackendSetup {
  PipelineBackends backends;
  std::optional<Vocabulary> vocab;
  std::vector<BackendDescriptor> descriptors;
};

/// Throws INVALID_CONFIG or IO_FAILURE.
BackendSetup load_backend_config(const std::filesystem::path& path);
BackendSetup backend_setup_from_json(const nlohmann::json& config,
                                     const std::filesystem::path& base_dir);

nlohmann::json descriptor_json(const BackendDescriptor& descriptor);

}  // namespace dicore::cli
