#include "dicore/freeform_parser.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include <json.hpp>

#include "dicore/error.hpp"
#include "dicore/text.hpp"

namespace dicore {
namespace {

using nlohmann::json;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// A single quote closes a string when the next non-blank character is
// structural (or the text ends), so apostrophes inside words survive.
bool closes_single_quoted(std::string_view s, std::size_t i) {
  std::size_t j = i + 1;
  while (j < s.size() && is_space(s[j])) ++j;
  return j == s.size() || s[j] == ',' || s[j] == ')' || s[j] == ']' || s[j] == '}' ||
         s[j] == ':';
}

// A single quote opens a string only right after a structural character.
bool opens_single_quoted(const std::string& out) {
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    if (is_space(*it)) continue;
    return *it == '[' || *it == ',' || *it == '{' || *it == ':';
  }
  return true;
}

std::string strip_fences(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!text::trim(line).starts_with("```")) {
      out += line;
      out += '\n';
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

// End (exclusive) of the bracketed value starting at `open`, or nullopt.
std::optional<std::size_t> matching_bracket(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '[' || c == '{') ++depth;
    else if (c == ']' || c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

std::optional<std::string> scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  return std::nullopt;
}

std::optional<std::string> field(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (auto it = obj.find(key); it != obj.end()) {
      if (auto s = scalar_text(*it)) return s;
    }
  }
  return std::nullopt;
}

// Scans `normalized` for the first array accepted by `accept`.
template <typename T>
std::optional<T> first_array(const std::string& normalized,
                             const std::function<std::optional<T>(const json&)>& accept) {
  for (std::size_t i = normalized.find('['); i != std::string::npos;
       i = normalized.find('[', i + 1)) {
    const auto end = matching_bracket(normalized, i);
    if (!end) continue;
    json value = json::parse(normalized.begin() + static_cast<std::ptrdiff_t>(i),
                             normalized.begin() + static_cast<std::ptrdiff_t>(*end), nullptr,
                             false);
    if (value.is_discarded() || !value.is_array()) continue;
    if (auto result = accept(value)) return result;
  }
  return std::nullopt;
}

}  // namespace

std::string normalize_freeform(std::string_view input) {
  const std::string s = strip_fences(input);
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"') j += s[j] == '\\' ? 2 : 1;
      out.append(s, i, std::min(j + 1, s.size()) - i);
      i = j;
    } else if (c == '\'' && opens_single_quoted(out)) {
      std::size_t j = i + 1;
      while (j < s.size() && !(s[j] == '\'' && closes_single_quoted(s, j))) ++j;
      if (j >= s.size()) {
        out += c;
        continue;
      }
      out += '"';
      out += text::json_escape(std::string_view(s).substr(i + 1, j - i - 1));
      out += '"';
      i = j;
    } else if (c == '(') {
      out += '[';
    } else if (c == ')') {
      out += ']';
    } else {
      out += c;
    }
  }
  return out;
}

std::vector<FreeFormMention> parse_freeform_json(std::string_view text) {
  using Result = std::vector<FreeFormMention>;
  const std::string normalized = normalize_freeform(text);
  auto parsed = first_array<Result>(normalized, [](const json& array) -> std::optional<Result> {
    Result mentions;
    for (const auto& element : array) {
      if (!element.is_array() && !element.is_object()) return std::nullopt;
      std::optional<std::string> event, trigger;
      if (element.is_array()) {
        if (element.size() >= 2) {
          event = scalar_text(element[0]);
          trigger = scalar_text(element[1]);
        }
      } else {
        event = field(element, {"event_type", "event", "type", "event_name"});
        trigger = field(element, {"trigger", "trigger_word"});
      }
      if (!event || !trigger) continue;
      FreeFormMention m{std::string(text::trim(*event)), std::string(text::trim(*trigger)), true};
      if (m.event_name.empty() || m.trigger.empty()) continue;
      if (std::find(mentions.begin(), mentions.end(), m) == mentions.end()) {
        mentions.push_back(std::move(m));
      }
    }
    return mentions;
  });
  if (!parsed) throw Error(ErrorCode::kParseFailure, "no list of event mentions found in output");
  return std::move(*parsed);
}

std::vector<std::string> parse_string_list(std::string_view text) {
  using Result = std::vector<std::string>;
  const std::string normalized = normalize_freeform(text);
  auto parsed = first_array<Result>(normalized, [](const json& array) -> std::optional<Result> {
    Result items;
    for (const auto& element : array) {
      if (!element.is_string()) return std::nullopt;
      std::string item(text::trim(element.get<std::string>()));
      if (!item.empty() && std::find(items.begin(), items.end(), item) == items.end()) {
        items.push_back(std::move(item));
      }
    }
    return items;
  });
  if (!parsed) throw Error(ErrorCode::kParseFailure, "no list of strings found in output");
  return std::move(*parsed);
}

}  // namespace dicore
