#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "clarity/instances.hpp"

namespace clarity {

enum class SplitRegime : std::uint8_t { Stratified = 0, PresidentDisjoint };

std::string_view regime_name(SplitRegime r);
SplitRegime parse_regime(std::string_view s);

struct SplitAssignment {
  SplitRegime regime = SplitRegime::Stratified;
  std::uint64_t seed = 0;  // unused by the president regime (deterministic enumeration)
  double ratio = 0.8;      // train fraction
  // Sorted; disjoint; union equals the input id set.
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;

  bool operator==(const SplitAssignment&) const = default;

  std::string to_json_string() const;
  static SplitAssignment from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static SplitAssignment load(const std::filesystem::path& path);
};

class TooFewInstances : public std::runtime_error {
 public:
  explicit TooFewInstances(const std::vector<std::string>& labels);
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
};

class MissingPresident : public std::runtime_error {
 public:
  explicit MissingPresident(const std::string& id);
};

class SinglePresident : public std::runtime_error {
 public:
  SinglePresident();
};

struct SplitOptions {
  // When false, labels too small to appear in both sides raise TooFewInstances;
  // when true they are reported through `underfilled_labels` and the split proceeds.
  bool allow_underfilled_strata = false;
};

// Stratifies on the evasion label; clarity is a function of evasion so its
// proportions are preserved automatically. Validation seats are apportioned
// by largest remainder with the total pinned to round((1-ratio)*N), which
// keeps every stratum within one instance of proportional. Within a stratum
// the validation members are a prefix of a seeded pinned shuffle.
SplitAssignment dual_stratified_split(const std::vector<TrainInstance>& instances,
                                      double ratio, std::uint64_t seed,
                                      const SplitOptions& options = {},
                                      std::vector<std::string>* underfilled_labels = nullptr);

// Exhaustively enumerates proper non-empty president subsets as the validation
// side and picks the one minimizing |val_fraction - (1 - target_ratio)|.
// Ties prefer fewer validation presidents, then the lexicographically smaller
// sorted president-name list.
SplitAssignment president_disjoint_split(const std::vector<TrainInstance>& instances,
                                         double target_ratio);

// Partition of `instances` according to an assignment; unknown ids raise.
struct SplitView {
  std::vector<TrainInstance> train;
  std::vector<TrainInstance> val;
};
SplitView apply_split(const std::vector<TrainInstance>& instances,
                      const SplitAssignment& assignment);

}  // namespace clarity
