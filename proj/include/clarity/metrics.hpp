#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clarity/instances.hpp"
#include "clarity/predictions.hpp"

namespace clarity {

class IdMismatch : public std::runtime_error {
 public:
  explicit IdMismatch(const std::string& detail);
};

class InsufficientRaters : public std::runtime_error {
 public:
  InsufficientRaters();
};

struct MacroPrf {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// id -> label, as parallel pairs. The generic core works over arbitrary
// string vocabularies so tests can drive it with toy label sets.
using LabeledIds = std::vector<std::pair<std::string, std::string>>;

// Macro-averaged F1/P/R over the full declared vocabulary; per-class 0/0 is
// defined as 0. Predictions must cover exactly the gold id set.
MacroPrf macro_prf(const LabeledIds& preds, const LabeledIds& golds,
                   const std::vector<std::string>& vocabulary);

MacroPrf macro_prf(const PredictionSet& preds,
                   const std::map<std::string, std::size_t>& gold_indices);

struct EvasionEval {
  std::array<double, 3> f1_per_annotator{};
  double f1_avg = 0.0;
  double acc_match = 0.0;  // fraction matching at least one annotator
};

EvasionEval evasion_eval(const PredictionSet& preds, const std::vector<TestInstance>& test);

enum class ConfusionNormalize : std::uint8_t { None = 0, Row };

struct ConfusionMatrix {
  std::vector<std::string> labels;          // row = gold, column = predicted
  std::vector<std::vector<double>> values;  // counts, or row proportions
  bool row_normalized = false;
  std::vector<bool> zero_support_rows;      // rows left all-zero by normalization
};

// One (gold, pred) pair list per stream (seed, or seed x annotator). Raw
// count matrices are averaged elementwise across streams FIRST; row
// normalization, when requested, happens after averaging.
using GoldPredPairs = std::vector<std::pair<std::string, std::string>>;
ConfusionMatrix confusion_matrix(const std::vector<GoldPredPairs>& streams,
                                 const std::vector<std::string>& vocabulary,
                                 ConfusionNormalize normalize);

struct PerLabelRow {
  std::string label;
  std::size_t support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Rows in vocabulary (taxonomy) order; support is the gold count.
std::vector<PerLabelRow> per_label_report(const LabeledIds& preds, const LabeledIds& golds,
                                          const std::vector<std::string>& vocabulary);

// Standard Fleiss' kappa over an items x categories rating table; every row
// must sum to the same rater count n >= 2. Full agreement with degenerate
// chance agreement (single category used) returns 1 by convention.
double fleiss_kappa(const std::vector<std::vector<std::size_t>>& table);

// Build the rating table from per-item category indices.
std::vector<std::vector<std::size_t>> rating_table(
    const std::vector<std::vector<std::size_t>>& item_ratings, std::size_t num_categories);

struct AggregateStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for a single value
};

AggregateStat aggregate_stat(std::span<const double> values);

// Full scorecard for one prediction set against the test split.
struct MetricsReport {
  std::string run_id;
  LabelFamily target = LabelFamily::Clarity;
  std::optional<MacroPrf> clarity;  // direct, or derived via the taxonomy
  std::optional<EvasionEval> evasion;
  std::vector<PerLabelRow> clarity_per_label;
  std::array<std::vector<PerLabelRow>, 3> evasion_per_label;  // per annotator
  std::optional<ConfusionMatrix> clarity_confusion_raw;
  std::optional<ConfusionMatrix> clarity_confusion_row_norm;
  std::optional<ConfusionMatrix> evasion_confusion_raw;       // averaged over annotators
  std::optional<ConfusionMatrix> evasion_confusion_row_norm;

  // Flat metric values, for seed aggregation.
  std::map<std::string, double> scalar_metrics() const;
};

// Evaluates clarity predictions against the test gold, or evasion predictions
// against all three annotators plus the derived clarity against the gold.
MetricsReport evaluate_on_test(const PredictionSet& preds,
                               const std::vector<TestInstance>& test);

// Mean / sample-std per scalar metric across per-seed reports.
std::map<std::string, AggregateStat> aggregate_reports(
    const std::vector<MetricsReport>& per_seed);

}  // namespace clarity
