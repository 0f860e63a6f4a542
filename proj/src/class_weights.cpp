#include "clarity/class_weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace clarity {

std::string_view weight_kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::Unweighted: return "unweighted";
    case WeightKind::Balanced: return "balanced";
    case WeightKind::Sqrt: return "sqrt";
  }
  return "unweighted";
}

WeightKind parse_weight_kind(std::string_view s) {
  if (s == "unweighted") return WeightKind::Unweighted;
  if (s == "balanced") return WeightKind::Balanced;
  if (s == "sqrt") return WeightKind::Sqrt;
  throw std::invalid_argument("unknown weighting scheme: " + std::string(s));
}

ZeroCount::ZeroCount(std::size_t label_index)
    : std::runtime_error("balanced weighting undefined for zero-count class index " +
                         std::to_string(label_index)) {}

ClassWeights compute_class_weights(std::span<const std::size_t> counts,
                                   const WeightScheme& scheme) {
  if (counts.empty()) throw std::invalid_argument("no classes");
  if (scheme.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  if (scheme.cap < 1.0) throw std::invalid_argument("cap must be >= 1");

  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw std::invalid_argument("all class counts are zero");
  const std::size_t num_classes = counts.size();

  ClassWeights out;
  out.counts.assign(counts.begin(), counts.end());
  out.total = total;
  out.class_count = num_classes;
  out.scheme = scheme;
  out.frequencies.resize(num_classes);
  for (std::size_t i = 0; i < num_classes; ++i)
    out.frequencies[i] = static_cast<double>(counts[i]) / static_cast<double>(total);

  out.weights.resize(num_classes);
  switch (scheme.kind) {
    case WeightKind::Unweighted:
      std::fill(out.weights.begin(), out.weights.end(), 1.0);
      break;
    case WeightKind::Balanced:
      for (std::size_t i = 0; i < num_classes; ++i) {
        if (counts[i] == 0) throw ZeroCount(i);
        out.weights[i] = static_cast<double>(total) /
                         (static_cast<double>(num_classes) * static_cast<double>(counts[i]));
      }
      break;
    case WeightKind::Sqrt: {
      for (std::size_t i = 0; i < num_classes; ++i)
        out.weights[i] =
            std::min(1.0 / std::sqrt(out.frequencies[i] + scheme.epsilon), scheme.cap);
      const double mean =
          std::accumulate(out.weights.begin(), out.weights.end(), 0.0) /
          static_cast<double>(num_classes);
      for (double& w : out.weights) w /= mean;
      break;
    }
  }
  return out;
}

double weighted_ce(double prob_of_gold, double weight) {
  if (prob_of_gold <= 0.0) throw std::domain_error("probability of gold label must be > 0");
  if (prob_of_gold > 1.0) throw std::domain_error("probability exceeds 1");
  if (weight <= 0.0) throw std::domain_error("class weight must be > 0");
  return -weight * std::log(prob_of_gold);
}

double weighted_ce_mean(std::span<const double> probs, std::span<const double> weights) {
  if (probs.size() != weights.size())
    throw std::invalid_argument("probability/weight length mismatch");
  if (probs.empty()) throw std::invalid_argument("empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) sum += weighted_ce(probs[i], weights[i]);
  return sum / static_cast<double>(probs.size());
}

}  // namespace clarity
