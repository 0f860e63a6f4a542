#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clarity/labels.hpp"

namespace clarity {

struct TrainInstance {
  std::string id;
  std::string question;
  std::string answer;
  ClarityLabel clarity = ClarityLabel::Ambivalent;
  EvasionLabel evasion = EvasionLabel::Dodging;
  std::optional<std::string> president;
  std::optional<std::string> date;  // ISO-8601
  std::optional<bool> multiple_questions;
  std::optional<bool> affirmative_question;

  bool operator==(const TrainInstance&) const = default;
};

struct TestInstance {
  std::string id;
  std::string question;
  std::string answer;
  ClarityLabel clarity = ClarityLabel::Ambivalent;
  // Annotator identity is positional (A1, A2, A3) and consistent across the split.
  std::array<EvasionLabel, 3> evasion_annotations{};

  bool operator==(const TestInstance&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public std::runtime_error {
 public:
  explicit DuplicateId(const std::string& id);
};

class LabelInconsistency : public std::runtime_error {
 public:
  explicit LabelInconsistency(const std::vector<std::string>& ids);
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

class WrongAnnotatorCount : public std::runtime_error {
 public:
  WrongAnnotatorCount(const std::string& id, std::size_t got);
};

class EmptyDataset : public std::runtime_error {
 public:
  EmptyDataset();
};

struct LoadOptions {
  // Training rows whose clarity disagrees with clarity_of(evasion) are a hard
  // error by default; set to true to keep them and collect their ids instead.
  bool keep_taxonomy_mismatches = false;
};

std::vector<TrainInstance> load_training(const std::filesystem::path& source,
                                         const LoadOptions& options = {},
                                         std::vector<std::string>* inconsistent_ids = nullptr);
std::vector<TestInstance> load_test(const std::filesystem::path& source);

void write_training(const std::vector<TrainInstance>& instances,
                    const std::filesystem::path& dest);
void write_test(const std::vector<TestInstance>& instances, const std::filesystem::path& dest);

struct DatasetSummary {
  LabelFamily family = LabelFamily::Clarity;
  std::size_t total = 0;
  // Indexed by taxonomy order of `family`.
  std::vector<std::size_t> counts;
  std::vector<double> fractions;
  std::map<std::string, std::size_t> president_counts;

  std::size_t count_of(std::string_view label) const;
  double fraction_of(std::string_view label) const;
};

DatasetSummary class_distribution(const std::vector<TrainInstance>& instances,
                                  LabelFamily family);
// Test instances carry a single clarity gold and three evasion annotations,
// so only the clarity family has a well-defined distribution here.
DatasetSummary class_distribution(const std::vector<TestInstance>& instances,
                                  LabelFamily family);

// Label held by at least two of the three annotators; nullopt when all differ.
std::optional<EvasionLabel> majority_evasion(const TestInstance& t);

}  // namespace clarity
