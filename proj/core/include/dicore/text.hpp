#pragma once

// Small string helpers shared across modules.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dicore::text {

struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

/// Splits on Unicode whitespace (ASCII blanks plus the UTF-8 encoded Zs/Zl/Zp
/// code points and NEL). Returns byte spans into `s`.
std::vector<WordSpan> split_whitespace_spans(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

std::string_view trim(std::string_view s);

/// ASCII lower-casing; non-ASCII bytes are left untouched.
std::string fold_case(std::string_view s);

bool contains_case_insensitive(std::string_view haystack, std::string_view needle);

/// Body of a JSON string literal for `s` (no surrounding quotes).
std::string json_escape(std::string_view s);

bool is_boundary_punct(char c);

/// Strips characters from {. , ; : ! ? " ' ( ) [ ]} at both ends.
std::string_view strip_boundary_punct(std::string_view s);

}  // namespace dicore::text
