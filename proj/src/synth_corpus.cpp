#include "clarity/synth_corpus.hpp"

#include <array>
#include <cstdio>

#include "clarity/rng.hpp"

namespace clarity {

namespace {

using E = EvasionLabel;
using C = ClarityLabel;

constexpr std::uint64_t kCorpusSeed = 0x5eed0c0ffeeull;

const std::vector<std::string>& question_templates() {
  static const std::vector<std::string> t = {
      "Will you support the %s bill?",
      "What is your plan for %s?",
      "When will the administration act on %s?",
      "Do you stand by your earlier remarks on %s?",
      "How do you respond to criticism about %s?",
      "Can you commit to a timeline on %s?",
  };
  return t;
}

const std::vector<std::string>& topics() {
  static const std::vector<std::string> t = {"taxes",  "immigration", "healthcare",
                                             "education", "energy",  "trade",
                                             "security",  "infrastructure"};
  return t;
}

const std::vector<std::vector<std::string>>& answer_templates() {
  // Indexed by evasion label; lexically separable on purpose so the stub
  // encoder has signal to learn from.
  static const std::vector<std::vector<std::string>> t = {
      // Explicit
      {"Yes, I will sign it next week.", "No, we will not pursue that policy.",
       "We will act on Tuesday, that is settled.",
       "Yes. The order goes out this Friday."},
      // Implicit
      {"When it reaches my desk it will not sit there for long.",
       "You can expect my signature before the recess.",
       "Nobody who reads my record doubts where I stand on this."},
      // Dodging
      {"Our economy is the strongest it has ever been.",
       "Look at the numbers we posted yesterday, tremendous numbers.",
       "The real story is how well the markets are doing."},
      // General
      {"We are looking at all the options on the table.",
       "We want what is best for every family in this country.",
       "There are many moving pieces and we weigh every one of them."},
      // Deflection
      {"I hear you, but the real issue is what congress refuses to fund.",
       "That question matters less than the crisis in front of us.",
       "Let me turn that around: why has the committee stalled for a year?"},
      // Partial
      {"I can speak to the funding half: it is secured.",
       "On the first part, yes; the rest I will leave for another day.",
       "The timeline piece I can answer: within the year."},
      // Declining
      {"I am not going to discuss that today.",
       "You will hear about it after the summit, not before.",
       "I will not negotiate this in the press."},
      // Ignorance
      {"I have not seen that report.", "I honestly do not know the number.",
       "Nobody has briefed me on it yet."},
      // Clarification
      {"Which bill are you referring to?", "Can you repeat the second half of that?",
       "Do you mean this quarter or next year?"},
  };
  return t;
}

std::string format_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", prefix, n);
  return buf;
}

std::string make_question(std::size_t i, bool with_name) {
  const auto& names = fixture_person_names();
  if (with_name)
    return "Did you discuss " + topics()[i % topics().size()] + " with " +
           names[i % names.size()] + "?";
  const std::string& tpl = question_templates()[i % question_templates().size()];
  char buf[160];
  std::snprintf(buf, sizeof buf, tpl.c_str(), topics()[(i / 3) % topics().size()].c_str());
  return buf;
}

std::string make_answer(E label, std::size_t i, bool with_name) {
  const auto& pool = answer_templates()[index_of(label)];
  std::string answer = pool[i % pool.size()];
  if (with_name) {
    const auto& names = fixture_person_names();
    answer = names[(i + 3) % names.size()] + " raised this with me. " + answer;
  }
  return answer;
}

struct PresidentTerm {
  const char* name;
  int first_year;
  int years;
};

constexpr std::array<PresidentTerm, 4> kTerms = {{
    {"Trump", 2017, 4},
    {"Obama", 2009, 8},
    {"Bush", 2001, 8},
    {"Biden", 2021, 4},
}};

std::string make_date(const PresidentTerm& term, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02zu-%02zu", term.first_year + static_cast<int>(i) % term.years,
                1 + (i * 7) % 12, 1 + (i * 3) % 28);
  return buf;
}

struct TrainShape {
  std::array<std::size_t, kEvasionCount> evasion_counts;
  std::array<std::size_t, 4> president_counts;  // kTerms order
};

std::vector<TrainInstance> build_training(const TrainShape& shape) {
  // Label sequence in taxonomy order, president slots shuffled over it.
  std::vector<E> labels;
  for (std::size_t y = 0; y < kEvasionCount; ++y)
    labels.insert(labels.end(), shape.evasion_counts[y], static_cast<E>(y));

  std::vector<std::size_t> president_slots;
  for (std::size_t p = 0; p < kTerms.size(); ++p)
    president_slots.insert(president_slots.end(), shape.president_counts[p], p);

  SeededRng rng(kCorpusSeed);
  fisher_yates_shuffle(labels, rng);
  fisher_yates_shuffle(president_slots, rng);

  std::vector<TrainInstance> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const PresidentTerm& term = kTerms[president_slots[i]];
    TrainInstance t;
    t.id = format_id("train", i + 1);
    const bool with_name = i % 4 == 1;
    t.question = make_question(i, with_name);
    t.answer = make_answer(labels[i], i, with_name);
    t.evasion = labels[i];
    t.clarity = clarity_of(labels[i]);
    t.president = term.name;
    t.date = make_date(term, i);
    // Leave the boolean flags absent on a fixed sliver of rows.
    if (i % 5 != 0) {
      t.multiple_questions = i % 3 == 0;
      t.affirmative_question = i % 2 == 0;
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct TriplePattern {
  E a1, a2, a3;
  C clarity;
  std::size_t count;
};

// Annotator-triple construction matching the published test-set statistics:
// 226 unanimous + 49 two-of-three (275 majority-resolvable) + 33 all-distinct,
// per-annotator label supports as reported, clarity totals 79/206/23.
const std::vector<TriplePattern>& official_test_patterns() {
  static const std::vector<TriplePattern> p = {
      // unanimous
      {E::Explicit, E::Explicit, E::Explicit, C::ClearReply, 53},
      {E::Implicit, E::Implicit, E::Implicit, C::Ambivalent, 54},
      {E::Dodging, E::Dodging, E::Dodging, C::Ambivalent, 43},
      {E::General, E::General, E::General, C::Ambivalent, 29},
      {E::Deflection, E::Deflection, E::Deflection, C::Ambivalent, 22},
      {E::Partial, E::Partial, E::Partial, C::Ambivalent, 5},
      {E::Declining, E::Declining, E::Declining, C::ClearNonReply, 9},
      {E::Ignorance, E::Ignorance, E::Ignorance, C::ClearNonReply, 7},
      {E::Clarification, E::Clarification, E::Clarification, C::ClearNonReply, 4},
      // two-of-three
      {E::Explicit, E::Dodging, E::Explicit, C::ClearReply, 7},
      {E::Explicit, E::General, E::General, C::Ambivalent, 36},
      {E::Dodging, E::Dodging, E::Implicit, C::Ambivalent, 4},
      {E::Ignorance, E::Ignorance, E::Implicit, C::ClearNonReply, 2},
      // all-distinct
      {E::Dodging, E::General, E::Explicit, C::ClearReply, 11},
      {E::Deflection, E::Dodging, E::Explicit, C::ClearReply, 8},
      {E::Explicit, E::Dodging, E::Implicit, C::Ambivalent, 5},
      {E::Explicit, E::Dodging, E::Declining, C::Ambivalent, 4},
      {E::Explicit, E::Dodging, E::Deflection, C::Ambivalent, 1},
      {E::Partial, E::General, E::Explicit, C::Ambivalent, 1},
      {E::Partial, E::General, E::Implicit, C::Ambivalent, 1},
      {E::Declining, E::Ignorance, E::Implicit, C::Ambivalent, 1},
      {E::Partial, E::Ignorance, E::Declining, C::ClearNonReply, 1},
  };
  return p;
}

const std::vector<TriplePattern>& small_test_patterns() {
  static const std::vector<TriplePattern> p = {
      {E::Explicit, E::Explicit, E::Explicit, C::ClearReply, 10},
      {E::Implicit, E::Implicit, E::Implicit, C::Ambivalent, 8},
      {E::Dodging, E::Dodging, E::Dodging, C::Ambivalent, 8},
      {E::General, E::General, E::General, C::Ambivalent, 6},
      {E::Deflection, E::Deflection, E::Deflection, C::Ambivalent, 4},
      {E::Partial, E::Partial, E::Partial, C::Ambivalent, 2},
      {E::Declining, E::Declining, E::Declining, C::ClearNonReply, 3},
      {E::Ignorance, E::Ignorance, E::Ignorance, C::ClearNonReply, 2},
      {E::Clarification, E::Clarification, E::Clarification, C::ClearNonReply, 2},
      {E::Explicit, E::Dodging, E::Explicit, C::ClearReply, 3},
      {E::Explicit, E::General, E::General, C::Ambivalent, 4},
      {E::Dodging, E::Dodging, E::Implicit, C::Ambivalent, 2},
      {E::Dodging, E::General, E::Explicit, C::ClearReply, 2},
      {E::Explicit, E::Dodging, E::Implicit, C::Ambivalent, 2},
      {E::Partial, E::Ignorance, E::Declining, C::ClearNonReply, 1},
      {E::Declining, E::Ignorance, E::Implicit, C::Ambivalent, 1},
  };
  return p;
}

std::vector<TestInstance> build_test(const std::vector<TriplePattern>& patterns) {
  struct Proto {
    std::array<E, 3> anns;
    C clarity;
  };
  std::vector<Proto> protos;
  for (const TriplePattern& p : patterns)
    for (std::size_t i = 0; i < p.count; ++i)
      protos.push_back({{p.a1, p.a2, p.a3}, p.clarity});

  SeededRng rng(kCorpusSeed ^ 0xbeef);
  fisher_yates_shuffle(protos, rng);

  std::vector<TestInstance> out;
  out.reserve(protos.size());
  for (std::size_t i = 0; i < protos.size(); ++i) {
    TestInstance t;
    t.id = format_id("test", i + 1);
    const bool with_name = i % 4 == 2;
    t.question = make_question(i * 13 + 5, with_name);
    t.answer = make_answer(protos[i].anns[0], i * 13 + 5, with_name);
    t.clarity = protos[i].clarity;
    t.evasion_annotations = protos[i].anns;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<TrainInstance> official_shaped_training() {
  // Clarity totals: 1052 / 2041 / 355 = 30.51% / 59.19% / 10.30% of 3448.
  TrainShape shape;
  shape.evasion_counts = {1052, 500, 700, 400, 300, 141, 150, 120, 85};
  shape.president_counts = {1325, 1010, 714, 399};
  return build_training(shape);
}

std::vector<TestInstance> official_shaped_test() {
  return build_test(official_test_patterns());
}

std::vector<TrainInstance> small_training() {
  TrainShape shape;
  shape.evasion_counts = {61, 29, 41, 23, 17, 8, 9, 7, 5};
  shape.president_counts = {77, 59, 41, 23};
  return build_training(shape);
}

std::vector<TestInstance> small_test() { return build_test(small_test_patterns()); }

const std::vector<std::string>& fixture_person_names() {
  static const std::vector<std::string> names = {
      "John Smith", "Mary Johnson", "Alex Carter", "Jordan Lee", "Sam Rivera",
      "John",       "Mary",
  };
  return names;
}

CorpusPaths write_corpus(const std::string& shape, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CorpusPaths paths{dir / "train.jsonl", dir / "test.jsonl"};
  if (shape == "official") {
    write_training(official_shaped_training(), paths.train);
    write_test(official_shaped_test(), paths.test);
  } else if (shape == "small") {
    write_training(small_training(), paths.train);
    write_test(small_test(), paths.test);
  } else {
    throw std::invalid_argument("unknown corpus shape: " + shape + " (official|small)");
  }
  return paths;
}

}  // namespace clarity
