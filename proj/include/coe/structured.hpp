#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

// Parsers for model responses. They tolerate chatter around the payload.
namespace coe::structured {

// First well-formed JSON object or array in the text, scanning left to right.
std::optional<nlohmann::json> find_json(std::string_view text);

// Verdict of a yes/no answer: leading whitespace, quotes and trailing
// punctuation are ignored; the first word must be "yes" or "no".
std::optional<bool> parse_yes_no(std::string_view text);

// First non-empty line with an "Output:" prefix, surrounding quotes and a
// trailing period removed.
std::string parse_phrase(std::string_view text);

}  // namespace coe::structured
