#include "clarity/render.hpp"

#include "clarity/text.hpp"

namespace clarity {

std::string_view representation_name(RepresentationMode m) {
  return m == RepresentationMode::Segmented ? "segmented" : "marked";
}

RepresentationMode parse_representation(std::string_view s) {
  if (s == "segmented") return RepresentationMode::Segmented;
  if (s == "marked") return RepresentationMode::Marked;
  throw std::invalid_argument("unknown representation mode: " + std::string(s));
}

std::string RenderedInput::joined() const {
  std::string out;
  for (const std::string& seg : segments) {
    if (!out.empty()) out += ' ';
    out += seg;
  }
  return out;
}

EmptyText::EmptyText(std::string_view which)
    : std::runtime_error(std::string(which) + " text is empty") {}

MarkerCollision::MarkerCollision(std::string_view marker)
    : std::runtime_error("input already contains marker " + std::string(marker)) {}

namespace {

void require_non_empty(std::string_view question, std::string_view answer) {
  if (trim(question).empty()) throw EmptyText("question");
  if (trim(answer).empty()) throw EmptyText("answer");
}

}  // namespace

RenderedInput render_segmented(std::string_view question, std::string_view answer) {
  require_non_empty(question, answer);
  RenderedInput r;
  r.mode = RepresentationMode::Segmented;
  r.segments = {std::string(answer), std::string(question)};
  return r;
}

RenderedInput render_marked(std::string_view question, std::string_view answer) {
  require_non_empty(question, answer);
  for (std::string_view marker : {kQuestionMarker, kAnswerMarker}) {
    if (question.find(marker) != std::string_view::npos ||
        answer.find(marker) != std::string_view::npos)
      throw MarkerCollision(marker);
  }
  RenderedInput r;
  r.mode = RepresentationMode::Marked;
  std::string seq;
  seq.reserve(question.size() + answer.size() + 24);
  seq.append(kQuestionMarker).append(" ").append(question);
  seq.append(" ").append(kAnswerMarker).append(" ").append(answer);
  r.segments = {std::move(seq)};
  r.added_special_tokens = {std::string(kQuestionMarker), std::string(kAnswerMarker)};
  return r;
}

RenderedInput render(RepresentationMode mode, std::string_view question,
                     std::string_view answer) {
  return mode == RepresentationMode::Segmented ? render_segmented(question, answer)
                                               : render_marked(question, answer);
}

}  // namespace clarity
