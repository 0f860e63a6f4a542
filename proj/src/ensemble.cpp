#include "clarity/ensemble.hpp"

#include <algorithm>

namespace clarity {

std::string_view tie_break_name(TieBreak t) {
  return t == TieBreak::FrequencyPrior ? "frequency_prior" : "fixed_label_order";
}

TieBreak parse_tie_break(std::string_view s) {
  if (s == "frequency_prior") return TieBreak::FrequencyPrior;
  if (s == "fixed_label_order") return TieBreak::FixedLabelOrder;
  throw std::invalid_argument("unknown tie break: " + std::string(s));
}

MemberMismatch::MemberMismatch(const std::string& detail)
    : std::runtime_error("ensemble members disagree: " + detail) {}

EnsembleResult majority_vote_ensemble(const std::vector<PredictionSet>& members,
                                      const EnsembleSpec& spec,
                                      const DatasetSummary* training_distribution) {
  if (members.size() < 2) throw MemberMismatch("need at least two members");
  const PredictionSet& first = members.front();
  if (first.family() != spec.family) throw MemberMismatch("family differs from the spec");
  for (const PredictionSet& m : members) {
    if (m.family() != first.family()) throw MemberMismatch("label families differ");
    if (m.size() != first.size() || m.ids() != first.ids())
      throw MemberMismatch("instance id sets differ");
  }
  if (training_distribution && training_distribution->family != spec.family)
    throw MemberMismatch("training distribution covers the wrong label family");

  const std::size_t k = family_size(spec.family);
  EnsembleResult result{PredictionSet("ensemble", spec.family), std::nullopt, 0,
                        spec.tie_break};

  for (std::size_t pos = 0; pos < first.size(); ++pos) {
    const std::string& id = first.ids()[pos];
    std::vector<std::size_t> votes(k, 0);
    for (const PredictionSet& m : members) ++votes[m.label_index_of(id)];

    const std::size_t top = *std::max_element(votes.begin(), votes.end());
    std::vector<std::size_t> tied;
    for (std::size_t y = 0; y < k; ++y)
      if (votes[y] == top) tied.push_back(y);

    std::size_t winner = tied.front();  // taxonomy order is the final fallback
    if (tied.size() > 1) {
      ++result.tie_count;
      if (spec.tie_break == TieBreak::FrequencyPrior && training_distribution) {
        std::size_t best_count = training_distribution->counts[winner];
        for (std::size_t y : tied) {
          if (training_distribution->counts[y] > best_count) {
            winner = y;
            best_count = training_distribution->counts[y];
          }
        }
      }
    }
    result.predictions.add(id, winner);
  }

  if (spec.family == LabelFamily::Evasion)
    result.derived_clarity = result.predictions.derive_clarity();
  return result;
}

}  // namespace clarity
