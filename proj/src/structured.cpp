#include "coe/structured.hpp"

#include <cctype>

#include "coe/text.hpp"

namespace coe::structured {
namespace {

// Index one past the bracket that closes the one at `open`, honoring JSON
// string escapes; npos when unbalanced.
std::size_t matching_close(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

bool is_quote_or_punct(char c) {
  return c == '"' || c == '\'' || c == '`' || c == '.' || c == ',' || c == '!' || c == '?' ||
         c == ';' || c == ':' || c == '*' || c == '(' || c == ')';
}

}  // namespace

std::optional<nlohmann::json> find_json(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{' && text[i] != '[') continue;
    std::size_t end = matching_close(text, i);
    if (end == std::string_view::npos) continue;
    auto parsed = nlohmann::json::parse(text.substr(i, end - i), nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  return std::nullopt;
}

std::optional<bool> parse_yes_no(std::string_view raw) {
  std::string s = text::trim(raw);
  std::size_t b = 0;
  while (b < s.size() && (is_quote_or_punct(s[b]) || std::isspace(static_cast<unsigned char>(s[b]))))
    ++b;
  std::size_t e = b;
  while (e < s.size() && std::isalpha(static_cast<unsigned char>(s[e]))) ++e;
  std::string word = text::ascii_lower(std::string_view(s).substr(b, e - b));
  if (word == "yes") return true;
  if (word == "no") return false;
  return std::nullopt;
}

std::string parse_phrase(std::string_view raw) {
  std::string_view rest = raw;
  std::string line;
  while (!rest.empty()) {
    std::size_t nl = rest.find('\n');
    line = text::trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!line.empty()) break;
  }
  if (text::ifind(line, "output:") == 0) line = text::trim(std::string_view(line).substr(7));
  while (line.size() >= 2 && (line.front() == '"' || line.front() == '\'') && line.back() == line.front()) {
    line = line.substr(1, line.size() - 2);
  }
  if (!line.empty() && line.back() == '.' &&
      !(line.size() >= 2 && std::isupper(static_cast<unsigned char>(line[line.size() - 2])))) {
    line.pop_back();
  }
  return text::trim(line);
}

}  // namespace coe::structured
