#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers. Case folding is ASCII-only so that folded text keeps
// its byte and scalar-value length; non-ASCII bytes compare exactly.
namespace coe::text {

// Number of Unicode scalar values in UTF-8 encoded text.
std::size_t utf8_length(std::string_view s);

std::string ascii_lower(std::string_view s);
std::string trim(std::string_view s);

// Runs of whitespace become one space; leading/trailing whitespace dropped.
std::string collapse_whitespace(std::string_view s);

std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0);
bool icontains(std::string_view haystack, std::string_view needle);
bool iequals(std::string_view a, std::string_view b);

struct Replacement {
  std::string text;
  std::size_t count = 0;
};

// Replaces every non-overlapping case-insensitive match, scanning left to right.
Replacement ireplace_all(std::string_view text, std::string_view needle, std::string_view with);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercase alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view s);

}  // namespace coe::text
