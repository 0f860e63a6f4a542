#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clarity {

enum class RepresentationMode : std::uint8_t { Segmented = 0, Marked };

std::string_view representation_name(RepresentationMode m);
RepresentationMode parse_representation(std::string_view s);

inline constexpr std::string_view kQuestionMarker = "[QUESTION]";
inline constexpr std::string_view kAnswerMarker = "[ANSWER]";

struct RenderedInput {
  RepresentationMode mode = RepresentationMode::Segmented;
  // Segmented: exactly [answer, question]; marked: one combined segment.
  std::vector<std::string> segments;
  // Marker strings the tokenizer must learn (marked mode only).
  std::vector<std::string> added_special_tokens;

  // Single-sequence view for backends without segment machinery.
  std::string joined() const;
};

class EmptyText : public std::runtime_error {
 public:
  explicit EmptyText(std::string_view which);
};

class MarkerCollision : public std::runtime_error {
 public:
  explicit MarkerCollision(std::string_view marker);
};

// Two segments, answer first; the tokenizer contract adds classifier and
// separator tokens and token-type ids where the backbone supports them.
RenderedInput render_segmented(std::string_view question, std::string_view answer);

// One sequence "[QUESTION] q [ANSWER] a" with learned marker tokens. The
// question comes first, so end-truncation at the token budget preferentially
// preserves it.
RenderedInput render_marked(std::string_view question, std::string_view answer);

RenderedInput render(RepresentationMode mode, std::string_view question,
                     std::string_view answer);

}  // namespace clarity
