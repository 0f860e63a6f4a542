#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "clarity/instances.hpp"

using namespace clarity;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

TrainInstance make_train(const std::string& id, EvasionLabel e) {
  TrainInstance t;
  t.id = id;
  t.question = "Q?";
  t.answer = "A.";
  t.evasion = e;
  t.clarity = clarity_of(e);
  return t;
}

TestInstance make_test(const std::string& id, EvasionLabel a1, EvasionLabel a2,
                       EvasionLabel a3) {
  TestInstance t;
  t.id = id;
  t.question = "Q?";
  t.answer = "A.";
  t.clarity = clarity_of(a1);
  t.evasion_annotations = {a1, a2, a3};
  return t;
}

}  // namespace

TEST_CASE("training round trip preserves every field") {
  std::vector<TrainInstance> instances;
  auto a = make_train("x1", EvasionLabel::Partial);
  a.president = "Obama";
  a.date = "2012-05-01";
  a.multiple_questions = true;
  instances.push_back(a);
  instances.push_back(make_train("x2", EvasionLabel::Explicit));  // optionals absent

  const auto path = temp_file("roundtrip_train.jsonl", "");
  write_training(instances, path);
  const auto loaded = load_training(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded == instances);
  CHECK_FALSE(loaded[1].president.has_value());
  CHECK_FALSE(loaded[1].affirmative_question.has_value());
}

TEST_CASE("test round trip preserves annotator order") {
  std::vector<TestInstance> instances = {
      make_test("t1", EvasionLabel::Explicit, EvasionLabel::Dodging, EvasionLabel::General)};
  const auto path = temp_file("roundtrip_test.jsonl", "");
  write_test(instances, path);
  CHECK(load_test(path) == instances);
}

TEST_CASE("empty file loads as an empty list") {
  CHECK(load_training(temp_file("empty_train.jsonl", "")).empty());
  CHECK(load_test(temp_file("empty_test.jsonl", "")).empty());
}

TEST_CASE("duplicated ids are rejected") {
  std::vector<TrainInstance> two = {make_train("same", EvasionLabel::Explicit),
                                    make_train("same", EvasionLabel::Dodging)};
  const auto path = temp_file("dup.jsonl", "");
  // Serialize by hand since write expects the list as-is.
  std::ofstream out(path);
  out << R"({"id":"same","question":"Q?","answer":"A.","clarity":"Clear Reply","evasion":"Explicit"})"
      << "\n"
      << R"({"id":"same","question":"Q?","answer":"A.","clarity":"Ambivalent","evasion":"Dodging"})"
      << "\n";
  out.close();
  CHECK_THROWS_AS(load_training(path), DuplicateId);
  (void)two;
}

TEST_CASE("taxonomy-inconsistent rows are a hard error unless overridden") {
  const auto path = temp_file("inconsistent.jsonl",
                              R"({"id":"bad","question":"Q?","answer":"A.","clarity":"Clear Reply","evasion":"Dodging"})"
                              "\n");
  CHECK_THROWS_AS(load_training(path), LabelInconsistency);

  LoadOptions keep;
  keep.keep_taxonomy_mismatches = true;
  std::vector<std::string> flagged;
  const auto loaded = load_training(path, keep, &flagged);
  CHECK(loaded.size() == 1);
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0] == "bad");
}

TEST_CASE("malformed lines report the line number") {
  const auto path = temp_file("malformed.jsonl", "{not json\n");
  CHECK_THROWS_AS(load_training(path), ParseError);
  try {
    load_training(path);
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("test records with the wrong annotator count are rejected") {
  const auto path = temp_file("two_anns.jsonl",
                              R"({"id":"t","question":"Q?","answer":"A.","clarity":"Clear Reply","evasion_annotations":["Explicit","Explicit"]})"
                              "\n");
  CHECK_THROWS_AS(load_test(path), WrongAnnotatorCount);
}

TEST_CASE("all-agree triple is a valid instance") {
  const auto path = temp_file("agree.jsonl",
                              R"({"id":"t","question":"Q?","answer":"A.","clarity":"Clear Reply","evasion_annotations":["Explicit","Explicit","Explicit"]})"
                              "\n");
  const auto loaded = load_test(path);
  REQUIRE(loaded.size() == 1);
  CHECK(majority_evasion(loaded[0]) == EvasionLabel::Explicit);
}

TEST_CASE("class_distribution counts exactly") {
  std::vector<TrainInstance> instances = {make_train("a", EvasionLabel::Explicit),
                                          make_train("b", EvasionLabel::Explicit),
                                          make_train("c", EvasionLabel::Explicit)};
  const auto summary = class_distribution(instances, LabelFamily::Evasion);
  CHECK(summary.total == 3);
  CHECK(summary.count_of("Explicit") == 3);
  CHECK(summary.fraction_of("Explicit") == doctest::Approx(1.0));

  double frac_sum = 0.0;
  std::size_t count_sum = 0;
  for (std::size_t i = 0; i < summary.counts.size(); ++i) {
    frac_sum += summary.fractions[i];
    count_sum += summary.counts[i];
  }
  CHECK(frac_sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(count_sum == summary.total);
}

TEST_CASE("class_distribution is order-invariant") {
  std::vector<TrainInstance> a = {make_train("1", EvasionLabel::Explicit),
                                  make_train("2", EvasionLabel::Dodging),
                                  make_train("3", EvasionLabel::Dodging)};
  std::vector<TrainInstance> b = {a[2], a[0], a[1]};
  CHECK(class_distribution(a, LabelFamily::Evasion).counts ==
        class_distribution(b, LabelFamily::Evasion).counts);
}

TEST_CASE("class_distribution rejects empty input and evasion-family test instances") {
  CHECK_THROWS_AS(class_distribution(std::vector<TrainInstance>{}, LabelFamily::Clarity),
                  EmptyDataset);
  std::vector<TestInstance> test = {
      make_test("t", EvasionLabel::Explicit, EvasionLabel::Explicit, EvasionLabel::Explicit)};
  CHECK_THROWS_AS(class_distribution(test, LabelFamily::Evasion), std::invalid_argument);
}

TEST_CASE("majority_evasion: two-of-three wins, all-distinct yields nothing") {
  CHECK(majority_evasion(make_test("a", EvasionLabel::Explicit, EvasionLabel::Explicit,
                                   EvasionLabel::Dodging)) == EvasionLabel::Explicit);
  CHECK(majority_evasion(make_test("b", EvasionLabel::Explicit, EvasionLabel::Dodging,
                                   EvasionLabel::General)) == std::nullopt);
}

TEST_CASE("majority_evasion is invariant under annotation permutation") {
  const std::array<EvasionLabel, 3> anns = {EvasionLabel::Dodging, EvasionLabel::General,
                                            EvasionLabel::Dodging};
  std::array<std::size_t, 3> idx = {0, 1, 2};
  std::sort(idx.begin(), idx.end());
  std::optional<EvasionLabel> baseline;
  do {
    auto t = make_test("p", anns[idx[0]], anns[idx[1]], anns[idx[2]]);
    const auto got = majority_evasion(t);
    if (!baseline)
      baseline = got;
    else
      CHECK(got == *baseline);
  } while (std::next_permutation(idx.begin(), idx.end()));
  CHECK(*baseline == EvasionLabel::Dodging);
}
