#include <doctest.h>

#include <set>

#include "clarity/labels.hpp"

using namespace clarity;

TEST_CASE("clarity_of maps every evasion label to its taxonomy parent") {
  CHECK(clarity_of(EvasionLabel::Explicit) == ClarityLabel::ClearReply);
  CHECK(clarity_of(EvasionLabel::Implicit) == ClarityLabel::Ambivalent);
  CHECK(clarity_of(EvasionLabel::Dodging) == ClarityLabel::Ambivalent);
  CHECK(clarity_of(EvasionLabel::General) == ClarityLabel::Ambivalent);
  CHECK(clarity_of(EvasionLabel::Deflection) == ClarityLabel::Ambivalent);
  CHECK(clarity_of(EvasionLabel::Partial) == ClarityLabel::Ambivalent);
  CHECK(clarity_of(EvasionLabel::Declining) == ClarityLabel::ClearNonReply);
  CHECK(clarity_of(EvasionLabel::Ignorance) == ClarityLabel::ClearNonReply);
  CHECK(clarity_of(EvasionLabel::Clarification) == ClarityLabel::ClearNonReply);
}

TEST_CASE("evasions_of yields inverse images of sizes 1/5/3 that partition the set") {
  CHECK(evasions_of(ClarityLabel::ClearReply).size() == 1);
  CHECK(evasions_of(ClarityLabel::Ambivalent).size() == 5);
  CHECK(evasions_of(ClarityLabel::ClearNonReply).size() == 3);

  std::set<EvasionLabel> all;
  for (ClarityLabel c : all_clarity_labels())
    for (EvasionLabel e : evasions_of(c)) CHECK(all.insert(e).second);  // disjoint
  CHECK(all.size() == kEvasionCount);                                   // covering
}

TEST_CASE("hierarchy round trips both directions") {
  for (EvasionLabel e : all_evasion_labels()) {
    const auto& siblings = evasions_of(clarity_of(e));
    CHECK(std::find(siblings.begin(), siblings.end(), e) != siblings.end());
  }
  for (ClarityLabel c : all_clarity_labels())
    for (EvasionLabel e : evasions_of(c)) CHECK(clarity_of(e) == c);
}

TEST_CASE("parse round trips every display string") {
  for (ClarityLabel c : all_clarity_labels()) CHECK(parse_clarity(display_string(c)) == c);
  for (EvasionLabel e : all_evasion_labels()) CHECK(parse_evasion(display_string(e)) == e);
}

TEST_CASE("parsing is case-insensitive and trims whitespace") {
  CHECK(parse_evasion("  explicit ") == EvasionLabel::Explicit);
  CHECK(parse_evasion("PARTIAL/HALF-ANSWER") == EvasionLabel::Partial);
  CHECK(parse_evasion("Partial/half-answer") == EvasionLabel::Partial);
  CHECK(parse_clarity("clear reply") == ClarityLabel::ClearReply);
  CHECK(parse_clarity("\tAmbivalent\n") == ClarityLabel::Ambivalent);
}

TEST_CASE("short taxonomy spellings are accepted as aliases") {
  CHECK(parse_evasion("Partial") == EvasionLabel::Partial);
  CHECK(parse_evasion("Declining") == EvasionLabel::Declining);
  CHECK(parse_evasion("Ignorance") == EvasionLabel::Ignorance);
  CHECK(parse_clarity("Ambivalent Reply") == ClarityLabel::Ambivalent);
}

TEST_CASE("unknown labels fail with the offending string") {
  CHECK_THROWS_AS(parse_evasion("Evasive"), UnknownLabel);
  CHECK_THROWS_AS(parse_clarity("Unclear"), UnknownLabel);
  try {
    parse_evasion("Evasive");
  } catch (const UnknownLabel& e) {
    CHECK(e.offending() == "Evasive");
    CHECK(e.family() == LabelFamily::Evasion);
  }
}

TEST_CASE("display strings carry the dataset spellings") {
  CHECK(display_string(EvasionLabel::Partial) == "Partial/half-answer");
  CHECK(display_string(EvasionLabel::Declining) == "Declining to answer");
  CHECK(display_string(EvasionLabel::Ignorance) == "Claims ignorance");
  CHECK(display_string(ClarityLabel::ClearNonReply) == "Clear Non-Reply");
}
