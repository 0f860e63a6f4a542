#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clarity/instances.hpp"

namespace clarity {

// Deterministic synthetic corpora for development and CI. The "official
// shaped" pair reproduces the published marginals of the real dataset:
// 3448/308 sizes, clarity fractions 59.2/30.5/10.3, president counts
// (Trump 1325, Obama 1010, Bush 714, Biden 399), test clarity counts
// 206/79/23, the per-annotator evasion supports, and exactly 275 of 308
// test triples resolvable by majority vote (33 all-distinct).
std::vector<TrainInstance> official_shaped_training();
std::vector<TestInstance> official_shaped_test();

// A 200/60 miniature with every label represented; for fast pipeline tests.
std::vector<TrainInstance> small_training();
std::vector<TestInstance> small_test();

// Person surface forms used by the generated texts; doubles as the default
// lexicon for the rule-based NER backend.
const std::vector<std::string>& fixture_person_names();

struct CorpusPaths {
  std::filesystem::path train;
  std::filesystem::path test;
};

// Writes train.jsonl / test.jsonl under `dir`; shape is "official" or "small".
CorpusPaths write_corpus(const std::string& shape, const std::filesystem::path& dir);

}  // namespace clarity
