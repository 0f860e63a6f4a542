#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <unordered_map>

#include "clarity/split.hpp"
#include "clarity/synth_corpus.hpp"

using namespace clarity;

namespace {

std::vector<TrainInstance> uniform_instances(std::size_t n, EvasionLabel e,
                                             const std::string& president = "") {
  std::vector<TrainInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    TrainInstance t;
    t.id = std::string(1, 'a' + static_cast<char>(i % 26)) + std::to_string(i);
    t.question = "Q?";
    t.answer = "A.";
    t.evasion = e;
    t.clarity = clarity_of(e);
    if (!president.empty()) t.president = president;
    out.push_back(std::move(t));
  }
  return out;
}

void check_partition(const SplitAssignment& a, std::size_t expected_total) {
  std::set<std::string> train(a.train_ids.begin(), a.train_ids.end());
  std::set<std::string> val(a.val_ids.begin(), a.val_ids.end());
  CHECK(train.size() == a.train_ids.size());
  CHECK(val.size() == a.val_ids.size());
  CHECK(train.size() + val.size() == expected_total);
  for (const std::string& id : val) CHECK(train.count(id) == 0);
}

}  // namespace

TEST_CASE("single-stratum 10 instances split 8/2") {
  const auto instances = uniform_instances(10, EvasionLabel::Explicit);
  const auto split = dual_stratified_split(instances, 0.8, 7);
  CHECK(split.train_ids.size() == 8);
  CHECK(split.val_ids.size() == 2);
  check_partition(split, 10);
}

TEST_CASE("stratified split is deterministic for fixed inputs and seed") {
  const auto instances = small_training();
  const auto a = dual_stratified_split(instances, 0.8, 42);
  const auto b = dual_stratified_split(instances, 0.8, 42);
  CHECK(a == b);
  const auto c = dual_stratified_split(instances, 0.8, 43);
  CHECK(a.val_ids != c.val_ids);
}

TEST_CASE("stratified split keeps every evasion label within one of proportional") {
  const auto instances = official_shaped_training();
  const auto split = dual_stratified_split(instances, 0.8, 42);
  check_partition(split, instances.size());
  CHECK(split.train_ids.size() == 2758);
  CHECK(split.val_ids.size() == 690);

  // Brute-force recount per stratum.
  std::unordered_map<std::string, EvasionLabel> label_of;
  std::map<EvasionLabel, std::size_t> total, in_val;
  for (const TrainInstance& t : instances) {
    label_of[t.id] = t.evasion;
    ++total[t.evasion];
  }
  for (const std::string& id : split.val_ids) ++in_val[label_of.at(id)];
  for (const auto& [label, n] : total) {
    const double expected = 0.2 * static_cast<double>(n);
    CHECK(std::abs(static_cast<double>(in_val[label]) - std::round(expected)) <= 1.0);
  }
}

TEST_CASE("labels too small to reach both sides are flagged") {
  auto instances = uniform_instances(40, EvasionLabel::Explicit);
  auto lone = uniform_instances(1, EvasionLabel::Clarification);
  lone[0].id = "lone";
  instances.push_back(lone[0]);

  CHECK_THROWS_AS(dual_stratified_split(instances, 0.8, 1), TooFewInstances);

  SplitOptions lax;
  lax.allow_underfilled_strata = true;
  std::vector<std::string> flagged;
  const auto split = dual_stratified_split(instances, 0.8, 1, lax, &flagged);
  check_partition(split, instances.size());
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0] == "Clarification");
}

TEST_CASE("president-disjoint split never mixes a president across sides") {
  const auto instances = official_shaped_training();
  const auto split = president_disjoint_split(instances, 0.8);
  check_partition(split, instances.size());

  std::unordered_map<std::string, std::string> president_of;
  for (const TrainInstance& t : instances) president_of[t.id] = *t.president;
  std::set<std::string> train_p, val_p;
  for (const std::string& id : split.train_ids) train_p.insert(president_of.at(id));
  for (const std::string& id : split.val_ids) val_p.insert(president_of.at(id));
  for (const std::string& p : val_p) CHECK(train_p.count(p) == 0);

  // With counts 1325/1010/714/399 the best validation subset is Bush alone.
  CHECK(val_p == std::set<std::string>{"Bush"});
  CHECK(split.train_ids.size() == 2734);
  CHECK(split.val_ids.size() == 714);
  const double fraction =
      static_cast<double>(split.val_ids.size()) / static_cast<double>(instances.size());
  CHECK(fraction == doctest::Approx(0.2071).epsilon(1e-3));
}

TEST_CASE("two presidents with counts 80/20 force the smaller into validation") {
  auto instances = uniform_instances(80, EvasionLabel::Explicit, "Big");
  auto minority = uniform_instances(20, EvasionLabel::Dodging, "Small");
  for (auto& t : minority) t.id = "s" + t.id;
  instances.insert(instances.end(), minority.begin(), minority.end());

  const auto split = president_disjoint_split(instances, 0.8);
  CHECK(split.val_ids.size() == 20);
  CHECK(split.train_ids.size() == 80);
}

TEST_CASE("president-disjoint requires president metadata and at least two speakers") {
  auto missing = uniform_instances(5, EvasionLabel::Explicit, "Solo");
  missing[2].president.reset();
  CHECK_THROWS_AS(president_disjoint_split(missing, 0.8), MissingPresident);

  const auto single = uniform_instances(5, EvasionLabel::Explicit, "Solo");
  CHECK_THROWS_AS(president_disjoint_split(single, 0.8), SinglePresident);
}

TEST_CASE("split assignments serialize and reload identically") {
  const auto instances = small_training();
  const auto split = dual_stratified_split(instances, 0.8, 42);
  const auto path = std::filesystem::temp_directory_path() / "split_roundtrip.json";
  split.save(path);
  CHECK(SplitAssignment::load(path) == split);

  // Byte determinism: writing the same assignment twice is identical.
  const std::string once = split.to_json_string();
  CHECK(once == split.to_json_string());
}
