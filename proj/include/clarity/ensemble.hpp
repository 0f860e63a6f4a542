#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clarity/instances.hpp"
#include "clarity/predictions.hpp"

namespace clarity {

enum class TieBreak : std::uint8_t { FrequencyPrior = 0, FixedLabelOrder };

std::string_view tie_break_name(TieBreak t);
TieBreak parse_tie_break(std::string_view s);

class MemberMismatch : public std::runtime_error {
 public:
  explicit MemberMismatch(const std::string& detail);
};

struct EnsembleSpec {
  std::vector<std::string> member_run_ids;
  TieBreak tie_break = TieBreak::FrequencyPrior;
  LabelFamily family = LabelFamily::Evasion;
};

struct EnsembleResult {
  PredictionSet predictions;
  std::optional<PredictionSet> derived_clarity;  // evasion family only
  std::size_t tie_count = 0;
  TieBreak tie_break = TieBreak::FrequencyPrior;
};

// Per-instance modal label across members. Ties go to the higher
// training-set frequency when a distribution is supplied (frequency ties and
// the fixed rule both fall back to taxonomy order). Output is invariant
// under member permutation; every tie is counted.
EnsembleResult majority_vote_ensemble(const std::vector<PredictionSet>& members,
                                      const EnsembleSpec& spec,
                                      const DatasetSummary* training_distribution = nullptr);

}  // namespace clarity
