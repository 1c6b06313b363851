#include "coe/dataset.hpp"

#include <map>
#include <set>

#include "coe/errors.hpp"
#include "coe/text.hpp"

namespace coe {

std::vector<QASample> load_multihop(const json& records, Source source, std::size_t limit,
                                    ImportStats* stats) {
  if (!records.is_array()) throw Error("multi-hop dataset must be a JSON array");
  ImportStats local;
  std::vector<QASample> out;
  for (const auto& rec : records) {
    if (out.size() >= limit) break;
    ++local.records;
    std::map<std::string, std::vector<std::string>> paragraphs;
    for (const auto& para : rec.at("context")) {
      paragraphs[para.at(0).get<std::string>()] = para.at(1).get<std::vector<std::string>>();
    }
    std::vector<std::string> sentences;
    std::set<std::pair<std::string, std::size_t>> used;
    for (const auto& fact : rec.at("supporting_facts")) {
      const auto title = fact.at(0).get<std::string>();
      const auto index = fact.at(1).get<std::size_t>();
      if (!used.insert({title, index}).second) continue;
      auto it = paragraphs.find(title);
      if (it == paragraphs.end() || index >= it->second.size()) {
        ++local.missing_facts;
        continue;
      }
      std::string s = text::trim(it->second[index]);
      if (!s.empty()) sentences.push_back(std::move(s));
    }
    if (sentences.empty()) {
      ++local.skipped;
      continue;
    }
    QASample s;
    s.question = text::trim(rec.at("question").get<std::string>());
    s.answer = text::trim(rec.at("answer").get<std::string>());
    s.coe = text::join(sentences, " ");
    s.source = source;
    if (rec.contains("_id")) s.seed_metadata["id"] = rec["_id"].get<std::string>();
    for (const char* key : {"type", "level"}) {
      if (rec.contains(key) && rec[key].is_string()) s.seed_metadata[key] = rec[key].get<std::string>();
    }
    if (s.question.empty() || s.answer.empty()) {
      ++local.skipped;
      continue;
    }
    out.push_back(std::move(s));
  }
  if (stats) *stats = local;
  return out;
}

std::vector<QASample> load_samples(const std::string& jsonl_path) {
  std::vector<QASample> out;
  std::size_t line = 0;
  for (const auto& j : read_jsonl(jsonl_path)) {
    ++line;
    try {
      out.push_back(j.get<QASample>());
    } catch (const std::exception& e) {
      throw Error(jsonl_path + ": record " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

void save_samples(const std::string& jsonl_path, const std::vector<QASample>& samples) {
  std::vector<json> lines;
  lines.reserve(samples.size());
  for (const auto& s : samples) lines.push_back(s);
  write_jsonl(jsonl_path, lines);
}

}  // namespace coe
