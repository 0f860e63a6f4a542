#include "clarity/labels.hpp"

#include <unordered_map>

#include "clarity/text.hpp"

namespace clarity {

namespace {

constexpr std::array<std::string_view, kClarityCount> kClarityDisplay = {
    "Clear Reply", "Ambivalent", "Clear Non-Reply"};

constexpr std::array<std::string_view, kEvasionCount> kEvasionDisplay = {
    "Explicit",       "Implicit",           "Dodging",
    "General",        "Deflection",         "Partial/half-answer",
    "Declining to answer", "Claims ignorance", "Clarification"};

constexpr std::array<ClarityLabel, kEvasionCount> kParent = {
    ClarityLabel::ClearReply,     // Explicit
    ClarityLabel::Ambivalent,     // Implicit
    ClarityLabel::Ambivalent,     // Dodging
    ClarityLabel::Ambivalent,     // General
    ClarityLabel::Ambivalent,     // Deflection
    ClarityLabel::Ambivalent,     // Partial
    ClarityLabel::ClearNonReply,  // Declining
    ClarityLabel::ClearNonReply,  // Ignorance
    ClarityLabel::ClearNonReply,  // Clarification
};

const std::unordered_map<std::string, ClarityLabel>& clarity_aliases() {
  static const std::unordered_map<std::string, ClarityLabel> map = [] {
    std::unordered_map<std::string, ClarityLabel> m;
    for (ClarityLabel c : all_clarity_labels()) m[to_lower(display_string(c))] = c;
    m["ambivalent reply"] = ClarityLabel::Ambivalent;
    m["clear non reply"] = ClarityLabel::ClearNonReply;
    m["clearreply"] = ClarityLabel::ClearReply;
    m["clearnonreply"] = ClarityLabel::ClearNonReply;
    return m;
  }();
  return map;
}

const std::unordered_map<std::string, EvasionLabel>& evasion_aliases() {
  static const std::unordered_map<std::string, EvasionLabel> map = [] {
    std::unordered_map<std::string, EvasionLabel> m;
    for (EvasionLabel e : all_evasion_labels()) m[to_lower(display_string(e))] = e;
    // Short spellings used in the taxonomy table and common in LLM replies.
    m["partial"] = EvasionLabel::Partial;
    m["declining"] = EvasionLabel::Declining;
    m["ignorance"] = EvasionLabel::Ignorance;
    return m;
  }();
  return map;
}

}  // namespace

std::string_view display_string(ClarityLabel c) { return kClarityDisplay[index_of(c)]; }
std::string_view display_string(EvasionLabel e) { return kEvasionDisplay[index_of(e)]; }

ClarityLabel clarity_of(EvasionLabel e) { return kParent[index_of(e)]; }

const std::vector<EvasionLabel>& evasions_of(ClarityLabel c) {
  static const std::array<std::vector<EvasionLabel>, kClarityCount> inverse = [] {
    std::array<std::vector<EvasionLabel>, kClarityCount> inv;
    for (EvasionLabel e : all_evasion_labels()) inv[index_of(clarity_of(e))].push_back(e);
    return inv;
  }();
  return inverse[index_of(c)];
}

std::string_view family_name(LabelFamily f) {
  return f == LabelFamily::Clarity ? "clarity" : "evasion";
}

std::size_t family_size(LabelFamily f) {
  return f == LabelFamily::Clarity ? kClarityCount : kEvasionCount;
}

const std::vector<std::string>& family_vocabulary(LabelFamily f) {
  static const std::vector<std::string> clarity_vocab = [] {
    std::vector<std::string> v;
    for (ClarityLabel c : all_clarity_labels()) v.emplace_back(display_string(c));
    return v;
  }();
  static const std::vector<std::string> evasion_vocab = [] {
    std::vector<std::string> v;
    for (EvasionLabel e : all_evasion_labels()) v.emplace_back(display_string(e));
    return v;
  }();
  return f == LabelFamily::Clarity ? clarity_vocab : evasion_vocab;
}

UnknownLabel::UnknownLabel(std::string offending, LabelFamily family)
    : std::runtime_error("unknown " + std::string(family_name(family)) + " label: \"" +
                         offending + "\""),
      offending_(std::move(offending)),
      family_(family) {}

ClarityLabel parse_clarity(std::string_view s) {
  const auto& map = clarity_aliases();
  auto it = map.find(to_lower(trim(s)));
  if (it == map.end()) throw UnknownLabel(std::string(s), LabelFamily::Clarity);
  return it->second;
}

EvasionLabel parse_evasion(std::string_view s) {
  const auto& map = evasion_aliases();
  auto it = map.find(to_lower(trim(s)));
  if (it == map.end()) throw UnknownLabel(std::string(s), LabelFamily::Evasion);
  return it->second;
}

std::size_t parse_label_index(std::string_view s, LabelFamily family) {
  return family == LabelFamily::Clarity ? index_of(parse_clarity(s))
                                        : index_of(parse_evasion(s));
}

}  // namespace clarity
