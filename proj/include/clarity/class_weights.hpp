#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clarity {

enum class WeightKind : std::uint8_t { Unweighted = 0, Balanced, Sqrt };

std::string_view weight_kind_name(WeightKind k);
WeightKind parse_weight_kind(std::string_view s);

struct WeightScheme {
  WeightKind kind = WeightKind::Unweighted;
  double epsilon = 1e-8;  // sqrt stability constant
  double cap = 10.0;      // sqrt cap, applied before unit-mean rescaling

  bool operator==(const WeightScheme&) const = default;
};

class ZeroCount : public std::runtime_error {
 public:
  explicit ZeroCount(std::size_t label_index);
};

struct ClassWeights {
  // Indexed like `counts`; strictly positive.
  std::vector<double> weights;
  // Provenance: what the weights were computed from.
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  std::size_t class_count = 0;
  std::vector<double> frequencies;
  WeightScheme scheme;
};

// Unweighted: all ones. Balanced: N / (C * n_y); every class must be
// represented. Sqrt: min(1/sqrt(f_y + eps), cap), then rescaled so the mean
// weight is exactly 1. Weights come from the training split only.
ClassWeights compute_class_weights(std::span<const std::size_t> counts,
                                   const WeightScheme& scheme);

// -w * ln(p). Throws std::domain_error for p <= 0.
double weighted_ce(double prob_of_gold, double weight);

// Batch reduction: mean of per-example losses.
double weighted_ce_mean(std::span<const double> probs, std::span<const double> weights);

}  // namespace clarity
