#include <doctest.h>

#include <cmath>
#include <map>
#include <unordered_map>

#include "clarity/metrics.hpp"
#include "clarity/rng.hpp"
#include "clarity/synth_corpus.hpp"

using namespace clarity;

namespace {

// Independent oracle: naive per-class TP/FP/FN counting, written against the
// definitions rather than the implementation.
MacroPrf brute_force_prf(const LabeledIds& preds, const LabeledIds& golds,
                         const std::vector<std::string>& vocab) {
  std::unordered_map<std::string, std::string> pred_of;
  for (const auto& [id, label] : preds) pred_of[id] = label;
  MacroPrf m;
  for (const std::string& cls : vocab) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto& [id, gold] : golds) {
      const std::string& pred = pred_of.at(id);
      if (pred == cls && gold == cls) ++tp;
      if (pred == cls && gold != cls) ++fp;
      if (pred != cls && gold == cls) ++fn;
    }
    const double p = tp + fp == 0 ? 0.0 : tp / (tp + fp);
    const double r = tp + fn == 0 ? 0.0 : tp / (tp + fn);
    const double f1 = p + r == 0 ? 0.0 : 2 * p * r / (p + r);
    m.precision += p;
    m.recall += r;
    m.f1 += f1;
  }
  const double k = static_cast<double>(vocab.size());
  m.precision /= k;
  m.recall /= k;
  m.f1 /= k;
  return m;
}

TestInstance make_test(const std::string& id, EvasionLabel a1, EvasionLabel a2,
                       EvasionLabel a3, ClarityLabel clarity) {
  TestInstance t;
  t.id = id;
  t.question = "Q?";
  t.answer = "A.";
  t.clarity = clarity;
  t.evasion_annotations = {a1, a2, a3};
  return t;
}

}  // namespace

TEST_CASE("perfect predictions score 1/1/1") {
  const LabeledIds golds = {{"1", "A"}, {"2", "B"}, {"3", "A"}};
  const auto m = macro_prf(golds, golds, {"A", "B"});
  CHECK(m.f1 == doctest::Approx(1.0));
  CHECK(m.precision == doctest::Approx(1.0));
  CHECK(m.recall == doctest::Approx(1.0));
}

TEST_CASE("the worked macro case gives 2/3") {
  const LabeledIds golds = {{"1", "A"}, {"2", "A"}, {"3", "B"}};
  const LabeledIds preds = {{"1", "A"}, {"2", "B"}, {"3", "B"}};
  const auto m = macro_prf(preds, golds, {"A", "B"});
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.f1 == doctest::Approx(0.6667).epsilon(1e-3));
}

TEST_CASE("macro scores agree exactly with the brute-force oracle on 200 random sets") {
  SeededRng rng(2024);
  const std::vector<std::string> vocab = {"A", "B", "C", "D"};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(30);
    LabeledIds golds, preds;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "i" + std::to_string(i);
      golds.emplace_back(id, vocab[rng.below(vocab.size())]);
      preds.emplace_back(id, vocab[rng.below(vocab.size())]);
    }
    const auto got = macro_prf(preds, golds, vocab);
    const auto want = brute_force_prf(preds, golds, vocab);
    CHECK(got.f1 == want.f1);
    CHECK(got.precision == want.precision);
    CHECK(got.recall == want.recall);
  }
}

TEST_CASE("macro averaging runs over the full declared vocabulary") {
  // Label C never appears: its 0/0 classes count as 0 in the macro mean.
  const LabeledIds golds = {{"1", "A"}, {"2", "B"}};
  const LabeledIds preds = {{"1", "A"}, {"2", "B"}};
  const auto m = macro_prf(preds, golds, {"A", "B", "C"});
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("prediction/gold id mismatches are rejected") {
  const LabeledIds golds = {{"1", "A"}, {"2", "B"}};
  CHECK_THROWS_AS(macro_prf({{"1", "A"}}, golds, {"A", "B"}), IdMismatch);
  CHECK_THROWS_AS(macro_prf({{"1", "A"}, {"9", "B"}}, golds, {"A", "B"}), IdMismatch);
}

TEST_CASE("evasion_eval on the 3-instance fixture matches hand computation") {
  using E = EvasionLabel;
  const std::vector<TestInstance> test = {
      make_test("1", E::Explicit, E::Explicit, E::Implicit, ClarityLabel::ClearReply),
      make_test("2", E::Explicit, E::Implicit, E::Dodging, ClarityLabel::ClearReply),
      make_test("3", E::Implicit, E::Implicit, E::Implicit, ClarityLabel::Ambivalent),
  };
  PredictionSet preds("fixture", LabelFamily::Evasion);
  preds.add("1", E::Implicit);   // matches annotator 3
  preds.add("2", E::Dodging);    // matches annotator 3
  preds.add("3", E::Explicit);   // matches nobody
  const auto eval = evasion_eval(preds, test);
  CHECK(eval.acc_match == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(eval.f1_avg == doctest::Approx((eval.f1_per_annotator[0] + eval.f1_per_annotator[1] +
                                        eval.f1_per_annotator[2]) /
                                       3.0)
                           .epsilon(1e-12));
}

TEST_CASE("predicting annotator 1 everywhere maxes F1_A1 and ACC_match") {
  // Annotator 1's stream covers all nine labels, so no absent-class zeros
  // enter the macro mean and agreement scores exactly 1.
  using E = EvasionLabel;
  std::vector<TestInstance> test;
  std::size_t i = 0;
  for (E e : all_evasion_labels())
    test.push_back(make_test(std::to_string(i++), e, E::Dodging, E::General,
                             clarity_of(e)));
  PredictionSet preds("a1", LabelFamily::Evasion);
  for (const TestInstance& t : test) preds.add(t.id, t.evasion_annotations[0]);
  const auto eval = evasion_eval(preds, test);
  CHECK(eval.f1_per_annotator[0] == doctest::Approx(1.0));
  CHECK(eval.acc_match == doctest::Approx(1.0));
}

TEST_CASE("macro F1 counts absent vocabulary classes as zero by convention") {
  // Matching annotator 1 on a stream that uses only 3 of 9 labels gives 3/9.
  using E = EvasionLabel;
  const std::vector<TestInstance> test = {
      make_test("1", E::Explicit, E::Dodging, E::Implicit, ClarityLabel::ClearReply),
      make_test("2", E::General, E::Implicit, E::Dodging, ClarityLabel::Ambivalent),
      make_test("3", E::Declining, E::Declining, E::Declining, ClarityLabel::ClearNonReply),
  };
  PredictionSet preds("a1", LabelFamily::Evasion);
  for (const TestInstance& t : test) preds.add(t.id, t.evasion_annotations[0]);
  const auto eval = evasion_eval(preds, test);
  CHECK(eval.f1_per_annotator[0] == doctest::Approx(3.0 / 9.0).epsilon(1e-12));
  CHECK(eval.acc_match == doctest::Approx(1.0));
}

TEST_CASE("ACC_match is invariant under permuting each instance's annotations") {
  using E = EvasionLabel;
  auto base = make_test("1", E::Explicit, E::Dodging, E::General, ClarityLabel::ClearReply);
  PredictionSet preds("p", LabelFamily::Evasion);
  preds.add("1", E::Dodging);
  std::array<std::size_t, 3> idx = {0, 1, 2};
  std::sort(idx.begin(), idx.end());
  do {
    TestInstance t = base;
    t.evasion_annotations = {base.evasion_annotations[idx[0]],
                             base.evasion_annotations[idx[1]],
                             base.evasion_annotations[idx[2]]};
    CHECK(evasion_eval(preds, {t}).acc_match == doctest::Approx(1.0));
  } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("ACC_match dominates exact-match accuracy against any single annotator") {
  using E = EvasionLabel;
  SeededRng rng(17);
  const auto labels = all_evasion_labels();
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TestInstance> test;
    PredictionSet preds("prop" + std::to_string(trial), LabelFamily::Evasion);
    const std::size_t n = 1 + rng.below(20);
    for (std::size_t i = 0; i < n; ++i) {
      const E a1 = labels[rng.below(9)], a2 = labels[rng.below(9)], a3 = labels[rng.below(9)];
      test.push_back(make_test("i" + std::to_string(i), a1, a2, a3, clarity_of(a1)));
      preds.add("i" + std::to_string(i), labels[rng.below(9)]);
    }
    const auto eval = evasion_eval(preds, test);
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t exact = 0;
      for (const TestInstance& t : test)
        if (static_cast<EvasionLabel>(preds.label_index_of(t.id)) ==
            t.evasion_annotations[k])
          ++exact;
      CHECK(eval.acc_match >=
            static_cast<double>(exact) / static_cast<double>(test.size()) - 1e-12);
    }
  }
}

TEST_CASE("confusion matrix on the worked case, raw and row-normalised") {
  const GoldPredPairs pairs = {{"A", "A"}, {"A", "B"}, {"B", "B"}};
  const auto raw = confusion_matrix({pairs}, {"A", "B"}, ConfusionNormalize::None);
  CHECK(raw.values[0][0] == doctest::Approx(1.0));
  CHECK(raw.values[0][1] == doctest::Approx(1.0));
  CHECK(raw.values[1][0] == doctest::Approx(0.0));
  CHECK(raw.values[1][1] == doctest::Approx(1.0));

  const auto norm = confusion_matrix({pairs}, {"A", "B"}, ConfusionNormalize::Row);
  CHECK(norm.values[0][0] == doctest::Approx(0.5));
  CHECK(norm.values[0][1] == doctest::Approx(0.5));
  CHECK(norm.values[1][0] == doctest::Approx(0.0));
  CHECK(norm.values[1][1] == doctest::Approx(1.0));
}

TEST_CASE("identical streams make averaging a no-op") {
  const GoldPredPairs pairs = {{"A", "A"}, {"B", "A"}};
  const auto one = confusion_matrix({pairs}, {"A", "B"}, ConfusionNormalize::Row);
  const auto three = confusion_matrix({pairs, pairs, pairs}, {"A", "B"},
                                      ConfusionNormalize::Row);
  CHECK(one.values == three.values);
}

TEST_CASE("every nonzero row sums to one after normalisation") {
  SeededRng rng(5);
  const std::vector<std::string> vocab = {"A", "B", "C"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GoldPredPairs> streams(1 + rng.below(4));
    for (auto& stream : streams) {
      const std::size_t n = rng.below(20);
      for (std::size_t i = 0; i < n; ++i)
        stream.emplace_back(vocab[rng.below(3)], vocab[rng.below(3)]);
    }
    const auto m = confusion_matrix(streams, vocab, ConfusionNormalize::Row);
    for (std::size_t g = 0; g < vocab.size(); ++g) {
      double sum = 0.0;
      for (double v : m.values[g]) sum += v;
      if (m.zero_support_rows[g])
        CHECK(sum == 0.0);
      else
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("counts are averaged before normalisation, not after") {
  // Stream 1 row A: (1,1); stream 2 row A: (3,1). Mean counts (2,1) -> (2/3, 1/3).
  // Mean of row-normalised would be (0.625, 0.375): the orders genuinely differ.
  const GoldPredPairs s1 = {{"A", "A"}, {"A", "B"}};
  const GoldPredPairs s2 = {{"A", "A"}, {"A", "A"}, {"A", "A"}, {"A", "B"}};
  const auto m = confusion_matrix({s1, s2}, {"A", "B"}, ConfusionNormalize::Row);
  CHECK(m.values[0][0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.values[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const double mean_of_norm_a = (0.5 + 0.75) / 2.0;
  CHECK(std::abs(m.values[0][0] - mean_of_norm_a) > 0.04);
}

TEST_CASE("per-label report carries support, P, R, F1 in vocabulary order") {
  const LabeledIds golds = {{"1", "A"}, {"2", "A"}, {"3", "B"}};
  const LabeledIds preds = {{"1", "A"}, {"2", "B"}, {"3", "B"}};
  const auto rows = per_label_report(preds, golds, {"A", "B"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == "A");
  CHECK(rows[0].support == 2);
  CHECK(rows[0].precision == doctest::Approx(1.0));
  CHECK(rows[0].recall == doctest::Approx(0.5));
  CHECK(rows[1].support == 1);
  CHECK(rows[1].recall == doctest::Approx(1.0));
}

TEST_CASE("perfect predictions give F1 one for every represented label") {
  const LabeledIds golds = {{"1", "A"}, {"2", "B"}, {"3", "B"}};
  const auto rows = per_label_report(golds, golds, {"A", "B", "C"});
  CHECK(rows[0].f1 == doctest::Approx(1.0));
  CHECK(rows[1].f1 == doctest::Approx(1.0));
  CHECK(rows[2].support == 0);
  CHECK(rows[2].f1 == doctest::Approx(0.0));
}

TEST_CASE("Fleiss kappa is one under full agreement across two categories") {
  // 6 items, 3 raters; half unanimous on category 0, half on category 1.
  std::vector<std::vector<std::size_t>> table = {{3, 0}, {3, 0}, {3, 0},
                                                 {0, 3}, {0, 3}, {0, 3}};
  CHECK(fleiss_kappa(table) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate single-category full agreement returns one by convention") {
  std::vector<std::vector<std::size_t>> table = {{3, 0}, {3, 0}};
  CHECK(fleiss_kappa(table) == doctest::Approx(1.0));
}

TEST_CASE("the ten-item rating fixture matches the textbook formula oracle") {
  // 10 items x 3 raters x 3 categories; mixed agreement.
  const std::vector<std::vector<std::size_t>> table = {
      {3, 0, 0}, {2, 1, 0}, {1, 1, 1}, {0, 3, 0}, {0, 2, 1},
      {1, 0, 2}, {0, 0, 3}, {2, 0, 1}, {3, 0, 0}, {0, 1, 2},
  };

  // Oracle: direct evaluation of P_bar and Pe_bar.
  const double n = 3.0, items = 10.0;
  double p_bar = 0.0;
  std::vector<double> totals(3, 0.0);
  for (const auto& row : table) {
    double agree = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      agree += static_cast<double>(row[j]) * (static_cast<double>(row[j]) - 1.0);
      totals[j] += static_cast<double>(row[j]);
    }
    p_bar += agree / (n * (n - 1.0));
  }
  p_bar /= items;
  double pe_bar = 0.0;
  for (double t : totals) pe_bar += (t / (items * n)) * (t / (items * n));
  const double oracle = (p_bar - pe_bar) / (1.0 - pe_bar);

  CHECK(fleiss_kappa(table) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("two raters in complete disagreement give non-positive kappa") {
  // Items (A,B) and (B,A): every item splits 1/1.
  const std::vector<std::vector<std::size_t>> table = {{1, 1}, {1, 1}};
  CHECK(fleiss_kappa(table) <= 0.0);
  CHECK(fleiss_kappa(table) == doctest::Approx(-1.0));
}

TEST_CASE("rating tables require a constant rater count of at least two") {
  CHECK_THROWS_AS(fleiss_kappa({{1, 0}, {2, 1}}), InsufficientRaters);
  CHECK_THROWS_AS(fleiss_kappa({{1, 0}, {0, 1}}), InsufficientRaters);
  CHECK_THROWS_AS(fleiss_kappa({}), InsufficientRaters);
}

TEST_CASE("rating_table aggregates category indices") {
  const auto table = rating_table({{0, 0, 1}, {2, 2, 2}}, 3);
  CHECK(table[0] == std::vector<std::size_t>{2, 1, 0});
  CHECK(table[1] == std::vector<std::size_t>{0, 0, 3});
}

TEST_CASE("per-label supports on the official-shaped test split match the reference") {
  const auto test = official_shaped_test();
  PredictionSet preds("supports", LabelFamily::Evasion);
  for (const TestInstance& t : test) preds.add(t.id, t.evasion_annotations[0]);
  const auto report = evaluate_on_test(preds, test);

  // Clarity supports: Clear Reply 79, Ambivalent 206, Clear Non-Reply 23.
  REQUIRE(report.clarity_per_label.size() == 3);
  CHECK(report.clarity_per_label[0].support == 79);
  CHECK(report.clarity_per_label[1].support == 206);
  CHECK(report.clarity_per_label[2].support == 23);

  // Annotator-1 evasion supports: Explicit 106, Implicit 54, Dodging 58.
  const auto& a1 = report.evasion_per_label[0];
  CHECK(a1[index_of(EvasionLabel::Explicit)].support == 106);
  CHECK(a1[index_of(EvasionLabel::Implicit)].support == 54);
  CHECK(a1[index_of(EvasionLabel::Dodging)].support == 58);
}

TEST_CASE("president counts on the official-shaped training split") {
  const auto summary =
      class_distribution(official_shaped_training(), LabelFamily::Clarity);
  CHECK(summary.president_counts.at("Trump") == 1325);
  CHECK(summary.president_counts.at("Obama") == 1010);
  CHECK(summary.president_counts.at("Bush") == 714);
  CHECK(summary.president_counts.at("Biden") == 399);
}

TEST_CASE("aggregate_stat uses the sample standard deviation") {
  const std::vector<double> values = {0.6, 0.7, 0.8};
  const auto s = aggregate_stat(values);
  CHECK(s.mean == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(s.stddev == doctest::Approx(0.1).epsilon(1e-12));  // n-1 convention

  const std::vector<double> one = {0.5};
  CHECK(aggregate_stat(one).stddev == 0.0);
}

TEST_CASE("F1_avg equals the mean of the per-annotator F1s by construction") {
  using E = EvasionLabel;
  const std::vector<TestInstance> test = {
      make_test("1", E::Explicit, E::Dodging, E::General, ClarityLabel::ClearReply),
      make_test("2", E::Implicit, E::Implicit, E::Dodging, ClarityLabel::Ambivalent),
  };
  PredictionSet preds("x", LabelFamily::Evasion);
  preds.add("1", E::Explicit);
  preds.add("2", E::Dodging);
  const auto eval = evasion_eval(preds, test);
  const double mean = (eval.f1_per_annotator[0] + eval.f1_per_annotator[1] +
                       eval.f1_per_annotator[2]) /
                      3.0;
  CHECK(std::abs(eval.f1_avg - mean) < 1e-12);
}

TEST_CASE("evaluate_on_test wires derived clarity and confusions for evasion runs") {
  using E = EvasionLabel;
  const std::vector<TestInstance> test = {
      make_test("1", E::Explicit, E::Explicit, E::Explicit, ClarityLabel::ClearReply),
      make_test("2", E::Dodging, E::General, E::Dodging, ClarityLabel::Ambivalent),
  };
  PredictionSet preds("r", LabelFamily::Evasion);
  preds.add("1", E::Explicit);
  preds.add("2", E::General);

  const auto report = evaluate_on_test(preds, test);
  REQUIRE(report.clarity.has_value());
  REQUIRE(report.evasion.has_value());
  // General also maps to Ambivalent, so both derived labels hit; the absent
  // Clear Non-Reply class contributes a zero to the macro mean.
  CHECK(report.clarity->f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(report.evasion_confusion_row_norm.has_value());
  REQUIRE(report.clarity_confusion_row_norm.has_value());
  CHECK(report.evasion_per_label[0].size() == kEvasionCount);
}
