#include "dicore/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace dicore::text {
namespace {

// Length in bytes of the whitespace code point starting at s[i], or 0.
std::size_t whitespace_length(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
    return 1;
  }
  auto byte = [&](std::size_t k) -> unsigned {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u;
  };
  if (c == 0xC2 && (byte(1) == 0x85 || byte(1) == 0xA0)) return 2;  // NEL, NBSP
  if (c == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;     // U+1680
  if (c == 0xE2 && byte(1) == 0x80) {
    const unsigned b = byte(2);
    if ((b >= 0x80 && b <= 0x8A) || b == 0xA8 || b == 0xA9 || b == 0xAF) return 3;
  }
  if (c == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;  // U+205F
  if (c == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;  // U+3000
  return 0;
}

}  // namespace

std::vector<WordSpan> split_whitespace_spans(std::string_view s) {
  std::vector<WordSpan> spans;
  std::size_t i = 0;
  std::size_t word_begin = std::string_view::npos;
  while (i < s.size()) {
    const std::size_t ws = whitespace_length(s, i);
    if (ws > 0) {
      if (word_begin != std::string_view::npos) {
        spans.push_back({word_begin, i});
        word_begin = std::string_view::npos;
      }
      i += ws;
    } else {
      if (word_begin == std::string_view::npos) word_begin = i;
      ++i;
    }
  }
  if (word_begin != std::string_view::npos) spans.push_back({word_begin, s.size()});
  return spans;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> words;
  for (const auto& span : split_whitespace_spans(s)) {
    words.emplace_back(s.substr(span.begin, span.end - span.begin));
  }
  return words;
}

std::string_view trim(std::string_view s) {
  const auto spans = split_whitespace_spans(s);
  if (spans.empty()) return {};
  return s.substr(spans.front().begin, spans.back().end - spans.front().begin);
}

std::string fold_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 ? static_cast<char>(std::tolower(u)) : c;
  });
  return out;
}

bool contains_case_insensitive(std::string_view haystack, std::string_view needle) {
  return fold_case(haystack).find(fold_case(needle)) != std::string::npos;
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

bool is_boundary_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '"': case '\'': case '(': case ')': case '[': case ']':
      return true;
    default:
      return false;
  }
}

std::string_view strip_boundary_punct(std::string_view s) {
  while (!s.empty() && is_boundary_punct(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_boundary_punct(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace dicore::text
