#include "dicore/prompts.hpp"

#include <fstream>
#include <sstream>

#include "dicore/error.hpp"

namespace dicore {
namespace detail {
const std::map<std::string, std::string>& builtin_prompt_texts();
}  // namespace detail

namespace {
constexpr std::array kAllKinds = {
    PromptKind::kDreamer,     PromptKind::kGrounder,    PromptKind::kGrounderNamesOnly,
    PromptKind::kJudge,       PromptKind::kDirect,      PromptKind::kStagedTypes,
    PromptKind::kStagedTriggers,
};
}  // namespace

std::string_view template_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::kDreamer: return "dreamer";
    case PromptKind::kGrounder: return "grounder";
    case PromptKind::kGrounderNamesOnly: return "grounder_names_only";
    case PromptKind::kJudge: return "judge";
    case PromptKind::kDirect: return "md";
    case PromptKind::kStagedTypes: return "ms_stage1";
    case PromptKind::kStagedTriggers: return "ms_stage2";
  }
  return "";
}

PromptSet PromptSet::builtin() {
  PromptSet set;
  set.version_ = std::string(kBuiltinVersion);
  const auto& texts = detail::builtin_prompt_texts();
  for (const auto kind : kAllKinds) set.templates_[kind] = texts.at(std::string(template_name(kind)));
  return set;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet set;
  set.version_ = dir.string();
  for (const auto kind : kAllKinds) {
    const auto path = dir / (std::string(template_name(kind)) + ".txt");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIoFailure, "cannot open prompt template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    set.templates_[kind] = buf.str();
  }
  return set;
}

const std::string& PromptSet::get(PromptKind kind) const { return templates_.at(kind); }

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    const std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it == values.end()) {
      throw Error(ErrorCode::kInvalidArgument, "no value for prompt placeholder {{" + key + "}}");
    }
    out += it->second;
    pos = close + 2;
  }
  return out;
}

}  // namespace dicore
