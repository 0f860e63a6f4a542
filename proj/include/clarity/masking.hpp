#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "clarity/ner.hpp"

namespace clarity {

enum class MaskingMode : std::uint8_t { None = 0, Naive, EntityAware };

std::string_view masking_name(MaskingMode m);
MaskingMode parse_masking(std::string_view s);

struct MaskedPair {
  std::string question;
  std::string answer;
};

// Every person mention becomes the single placeholder "[PERSON]"; identity
// is collapsed across mentions and across the two texts.
MaskedPair mask_naive(std::string_view question, std::string_view answer,
                      NerBackend& backend);

// Mentions across both texts are clustered by surface-form similarity
// (case-insensitive token containment, merged transitively) and each cluster
// becomes "[PERSON_i]", indexed 1..k by first appearance in question-then-
// answer reading order.
MaskedPair mask_entity_aware(std::string_view question, std::string_view answer,
                             NerBackend& backend);

MaskedPair apply_masking(MaskingMode mode, std::string_view question,
                         std::string_view answer, NerBackend* backend);

}  // namespace clarity
