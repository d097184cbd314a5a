#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace dicore {

enum class PromptKind {
  kDreamer,
  kGrounder,
  kGrounderNamesOnly,
  kJudge,
  kDirect,         ///< single-pass baseline
  kStagedTypes,    ///< two-stage baseline, stage 1: event types
  kStagedTriggers, ///< two-stage baseline, stage 2: triggers
};

/// File stem of a template, e.g. "grounder_names_only".
std::string_view template_name(PromptKind kind);

/// Prompt templates with {{placeholder}} slots. Templates ship as text files
/// in prompts/<version>/ and are compiled into the library as the default set.
class PromptSet {
 public:
  static constexpr std::string_view kBuiltinVersion = "v1";

  static PromptSet builtin();
  /// Loads <dir>/<template_name>.txt for every kind. Throws IO_FAILURE.
  static PromptSet load(const std::filesystem::path& dir);

  const std::string& get(PromptKind kind) const;
  const std::string& version() const { return version_; }

 private:
  std::map<PromptKind, std::string> templates_;
  std::string version_;
};

/// Substitutes every {{name}}. Throws INVALID_ARGUMENT for placeholders
/// missing from `values`.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace dicore
