#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coe/model.hpp"

namespace coe {

struct ImportStats {
  std::size_t records = 0;
  std::size_t missing_facts = 0;  // supporting facts naming an absent sentence
  std::size_t skipped = 0;        // records with no usable supporting sentence
};

// HotpotQA / 2WikiMultihopQA JSON (an array of records with question, answer,
// context [[title, [sentences]]] and supporting_facts [[title, index]]).
// The CoE is the supporting sentences in supporting-fact order, trimmed and
// joined with single spaces. Features are left empty for extraction.
std::vector<QASample> load_multihop(const json& records, Source source, std::size_t limit,
                                    ImportStats* stats = nullptr);

std::vector<QASample> load_samples(const std::string& jsonl_path);
void save_samples(const std::string& jsonl_path, const std::vector<QASample>& samples);

}  // namespace coe
