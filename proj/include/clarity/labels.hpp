#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clarity {

// Three-way clarity of a reply, and the nine answering techniques beneath it.
// Enumerator order is the canonical taxonomy order used for report rows,
// deterministic tie-breaks, and vector indexing throughout.
enum class ClarityLabel : std::uint8_t { ClearReply = 0, Ambivalent, ClearNonReply };

enum class EvasionLabel : std::uint8_t {
  Explicit = 0,
  Implicit,
  Dodging,
  General,
  Deflection,
  Partial,
  Declining,
  Ignorance,
  Clarification,
};

inline constexpr std::size_t kClarityCount = 3;
inline constexpr std::size_t kEvasionCount = 9;

constexpr std::array<ClarityLabel, kClarityCount> all_clarity_labels() {
  return {ClarityLabel::ClearReply, ClarityLabel::Ambivalent, ClarityLabel::ClearNonReply};
}

constexpr std::array<EvasionLabel, kEvasionCount> all_evasion_labels() {
  return {EvasionLabel::Explicit,   EvasionLabel::Implicit,  EvasionLabel::Dodging,
          EvasionLabel::General,    EvasionLabel::Deflection, EvasionLabel::Partial,
          EvasionLabel::Declining,  EvasionLabel::Ignorance,  EvasionLabel::Clarification};
}

constexpr std::size_t index_of(ClarityLabel c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index_of(EvasionLabel e) { return static_cast<std::size_t>(e); }

// Canonical on-disk spelling. The dataset's punctuation and casing live here;
// code carries the short enum names only.
std::string_view display_string(ClarityLabel c);
std::string_view display_string(EvasionLabel e);

// The deterministic hierarchy: every evasion technique has exactly one
// clarity parent.
ClarityLabel clarity_of(EvasionLabel e);

// Inverse image of the hierarchy. Sizes are 1 / 5 / 3 and the three sets
// partition the evasion vocabulary.
const std::vector<EvasionLabel>& evasions_of(ClarityLabel c);

enum class LabelFamily : std::uint8_t { Clarity = 0, Evasion };

std::string_view family_name(LabelFamily f);
std::size_t family_size(LabelFamily f);
// Display strings of the family's vocabulary, in taxonomy order.
const std::vector<std::string>& family_vocabulary(LabelFamily f);

class UnknownLabel : public std::runtime_error {
 public:
  UnknownLabel(std::string offending, LabelFamily family);
  const std::string& offending() const { return offending_; }
  LabelFamily family() const { return family_; }

 private:
  std::string offending_;
  LabelFamily family_;
};

// Case-insensitive, trims surrounding whitespace. Accepts the canonical
// display strings plus the short enum spellings ("Partial", "Declining",
// "Ignorance", "Ambivalent Reply") seen in model output.
ClarityLabel parse_clarity(std::string_view s);
EvasionLabel parse_evasion(std::string_view s);
// Index into the family's taxonomy order; throws UnknownLabel.
std::size_t parse_label_index(std::string_view s, LabelFamily family);

}  // namespace clarity
