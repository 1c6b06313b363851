#include "coe/plan.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <set>

#include "coe/errors.hpp"
#include "coe/text.hpp"

namespace coe {
namespace {

class LineParser {
 public:
  LineParser(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  json value() {
    skip_space();
    if (pos_ >= s_.size()) fail("missing value");
    char c = s_[pos_];
    if (c == '"') return string();
    if (c == '[') return array();
    return scalar();
  }

  void finish() {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected text after value");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line_), msg);
  }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  json string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json array() {
    ++pos_;
    json out = json::array();
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(value());
      skip_space();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return out;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      fail("expected , or ] in array");
    }
  }

  json scalar() {
    std::size_t end = pos_;
    while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != '#' && s_[end] != ' ' &&
           s_[end] != '\t') {
      ++end;
    }
    std::string_view tok = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (char c : tok) {
      if (c != '_') clean += c;
    }
    const char* b = clean.data();
    const char* e = b + clean.size();
    if (clean.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e) return v;
    } else {
      try {
        std::size_t used = 0;
        double d = std::stod(clean, &used);
        if (used == clean.size()) return d;
      } catch (const std::exception&) {
      }
    }
    fail("cannot parse value \"" + std::string(tok) + "\"");
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

template <typename T>
T get_as(const json& v, const std::string& field, const char* type) {
  try {
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(field, std::string("expected ") + type);
  }
}

std::vector<std::string> string_list(const json& v, const std::string& field) {
  if (v.is_string()) return {v.get<std::string>()};
  return get_as<std::vector<std::string>>(v, field, "a list of strings");
}

}  // namespace

std::map<std::string, json> parse_flat_config(std::string_view text_in) {
  std::map<std::string, json> out;
  std::string section;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text_in.size()) {
    std::size_t end = text_in.find('\n', start);
    if (end == std::string_view::npos) end = text_in.size();
    std::string line = text::trim(text_in.substr(start, end - start));
    start = end + 1;
    ++lineno;
    if (line.empty() || line[0] == '#') {
      if (end == text_in.size()) break;
      continue;
    }
    if (line.front() == '[') {
      auto close = line.find(']');
      std::string rest = close == std::string::npos ? "" : text::trim(line.substr(close + 1));
      if (close == std::string::npos || (!rest.empty() && rest[0] != '#')) {
        throw ConfigError("line " + std::to_string(lineno), "malformed section header");
      }
      section = text::trim(line.substr(1, close - 1));
      if (!valid_key(section)) throw ConfigError("line " + std::to_string(lineno), "bad section name");
    } else {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
      std::string key = text::trim(line.substr(0, eq));
      if (!valid_key(key)) throw ConfigError("line " + std::to_string(lineno), "bad key \"" + key + "\"");
      if (!section.empty()) key = section + "." + key;
      LineParser p(std::string_view(line).substr(eq + 1), lineno);
      json v = p.value();
      p.finish();
      if (!out.emplace(key, std::move(v)).second) {
        throw ConfigError(key, "duplicate key at line " + std::to_string(lineno));
      }
    }
    if (end == text_in.size()) break;
  }
  return out;
}

json RunPlan::to_json() const {
  json conds = json::array();
  for (Condition c : conditions) conds.push_back(coe::to_string(c));
  return json{{"version", version},
              {"samples", samples},
              {"backend", backend},
              {"mock_rules", mock_rules},
              {"answer_models", answer_models},
              {"judge_model", judge_model},
              {"noise_fixtures", noise_fixtures},
              {"rag_fixtures", rag_fixtures},
              {"search", search},
              {"experiments", experiments},
              {"conditions", conds},
              {"ratios", ratios},
              {"repeats", repeats},
              {"seed", seed},
              {"parallelism", parallelism},
              {"per_query_limit", per_query_limit},
              {"misinformation_count", misinformation_count},
              {"cache_dir", cache_dir},
              {"mwu_unit", coe::to_string(mwu_unit)},
              {"k", k},
              {"retrieve_limit", retrieve_limit},
              {"arms", arms},
              {"scorer", scorer}};
}

RunPlan parse_plan(std::string_view text_in, const std::string& base_dir) {
  auto cfg = parse_flat_config(text_in);
  RunPlan plan;
  std::set<std::string> seen;
  auto take = [&](const std::string& key) -> const json* {
    auto it = cfg.find(key);
    if (it == cfg.end()) return nullptr;
    seen.insert(key);
    return &it->second;
  };
  auto require = [&](const std::string& key) -> const json& {
    const json* v = take(key);
    if (!v) throw ConfigError(key, "required field missing");
    return *v;
  };

  plan.version = get_as<int>(require("version"), "version", "an integer");
  if (plan.version != kPlanVersion) {
    throw ConfigError("version", "unsupported plan version " + std::to_string(plan.version));
  }
  plan.backend = get_as<std::string>(require("backend"), "backend", "a string");
  if (text::trim(plan.backend).empty()) throw ConfigError("backend", "must be non-empty");
  plan.samples = resolve(base_dir, get_as<std::string>(require("samples"), "samples", "a string"));

  if (auto v = take("mock_rules")) plan.mock_rules = resolve(base_dir, get_as<std::string>(*v, "mock_rules", "a string"));
  if (auto v = take("answer_models")) plan.answer_models = string_list(*v, "answer_models");
  if (plan.answer_models.empty()) throw ConfigError("answer_models", "must name at least one model");
  if (auto v = take("judge_model")) plan.judge_model = get_as<std::string>(*v, "judge_model", "a string");
  if (auto v = take("search.noise_fixtures")) plan.noise_fixtures = resolve(base_dir, get_as<std::string>(*v, "search.noise_fixtures", "a string"));
  if (auto v = take("search.rag_fixtures")) plan.rag_fixtures = resolve(base_dir, get_as<std::string>(*v, "search.rag_fixtures", "a string"));
  if (auto v = take("search.client")) plan.search = get_as<std::string>(*v, "search.client", "a string");
  if (plan.search != "fixture" && plan.search != "google") {
    throw ConfigError("search.client", "must be \"fixture\" or \"google\"");
  }
  if (auto v = take("experiments")) plan.experiments = string_list(*v, "experiments");
  for (const auto& e : plan.experiments) {
    const auto& known = known_experiments();
    if (std::find(known.begin(), known.end(), e) == known.end()) {
      throw ConfigError("experiments", "unknown experiment \"" + e + "\"");
    }
  }
  if (auto v = take("conditions")) {
    plan.conditions.clear();
    for (const auto& name : string_list(*v, "conditions")) {
      Condition c;
      try {
        c = condition_from_string(name);
      } catch (const std::exception&) {
        throw ConfigError("conditions", "unknown condition \"" + name + "\"");
      }
      if (c != Condition::coe && c != Condition::senp && c != Condition::wordp) {
        throw ConfigError("conditions", "only CoE, SenP and WordP are mixed conditions");
      }
      plan.conditions.push_back(c);
    }
  }
  if (auto v = take("ratios")) {
    if (!v->is_array() || v->empty()) throw ConfigError("ratios", "expected a non-empty list");
    plan.ratios.clear();
    for (const auto& r : *v) {
      if (!r.is_number()) throw ConfigError("ratios", "expected numbers");
      double d = r.get<double>();
      if (d < 0.0 || d >= 1.0) throw ConfigError("ratios", "each ratio must lie in [0, 1)");
      plan.ratios.push_back(Ratio::from_double(d));
    }
  }
  if (auto v = take("repeats")) plan.repeats = get_as<int>(*v, "repeats", "an integer");
  if (plan.repeats < 1) throw ConfigError("repeats", "must be at least 1");
  if (auto v = take("seed")) {
    auto s = get_as<std::int64_t>(*v, "seed", "an integer");
    if (s < 0) throw ConfigError("seed", "must be non-negative");
    plan.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = take("parallelism")) plan.parallelism = get_as<int>(*v, "parallelism", "an integer");
  if (plan.parallelism < 1) throw ConfigError("parallelism", "must be at least 1");
  auto positive = [&](const char* key, std::size_t& dst) {
    if (auto v = take(key)) {
      auto n = get_as<std::int64_t>(*v, key, "an integer");
      if (n < 1) throw ConfigError(key, "must be at least 1");
      dst = static_cast<std::size_t>(n);
    }
  };
  positive("search.per_query_limit", plan.per_query_limit);
  positive("misinformation_count", plan.misinformation_count);
  positive("rag.k", plan.k);
  positive("rag.retrieve_limit", plan.retrieve_limit);
  if (auto v = take("cache_dir")) plan.cache_dir = resolve(base_dir, get_as<std::string>(*v, "cache_dir", "a string"));
  if (auto v = take("mwu_unit")) {
    try {
      plan.mwu_unit = mwu_unit_from_string(get_as<std::string>(*v, "mwu_unit", "a string"));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("mwu_unit", e.what());
    }
  }
  if (auto v = take("rag.arms")) plan.arms = string_list(*v, "rag.arms");
  for (const auto& a : plan.arms) {
    if (a != "naive" && a != "scopecoe") throw ConfigError("rag.arms", "unknown arm \"" + a + "\"");
  }
  if (auto v = take("rag.scorer")) plan.scorer = get_as<std::string>(*v, "rag.scorer", "a string");

  for (const auto& [key, value] : cfg) {
    if (!seen.count(key)) throw ConfigError(key, "unknown field");
  }
  return plan;
}

RunPlan load_plan(const std::string& path) {
  std::string text_in;
  try {
    text_in = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("plan", e.what());
  }
  return parse_plan(text_in, std::filesystem::path(path).parent_path().string());
}

}  // namespace coe
