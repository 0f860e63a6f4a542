#include "clarity/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace clarity {

IdMismatch::IdMismatch(const std::string& detail)
    : std::runtime_error("prediction/gold id mismatch: " + detail) {}

InsufficientRaters::InsufficientRaters()
    : std::runtime_error("Fleiss' kappa needs every item rated by the same n >= 2 raters") {}

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

struct ClassCounts {
  std::vector<double> tp, fp, fn;
  std::vector<std::size_t> support;
};

ClassCounts tally(const LabeledIds& preds, const LabeledIds& golds,
                  const std::vector<std::string>& vocabulary) {
  std::unordered_map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) label_index[vocabulary[i]] = i;

  std::unordered_map<std::string, std::size_t> pred_of;
  for (const auto& [id, label] : preds) {
    auto lit = label_index.find(label);
    if (lit == label_index.end())
      throw std::invalid_argument("predicted label outside vocabulary: " + label);
    if (!pred_of.emplace(id, lit->second).second)
      throw IdMismatch("duplicate prediction for id " + id);
  }
  if (pred_of.size() != golds.size())
    throw IdMismatch("got " + std::to_string(pred_of.size()) + " predictions for " +
                     std::to_string(golds.size()) + " gold items");

  ClassCounts c;
  c.tp.assign(vocabulary.size(), 0.0);
  c.fp.assign(vocabulary.size(), 0.0);
  c.fn.assign(vocabulary.size(), 0.0);
  c.support.assign(vocabulary.size(), 0);
  for (const auto& [id, gold_label] : golds) {
    auto git = label_index.find(gold_label);
    if (git == label_index.end())
      throw std::invalid_argument("gold label outside vocabulary: " + gold_label);
    auto pit = pred_of.find(id);
    if (pit == pred_of.end()) throw IdMismatch("no prediction for gold id " + id);
    const std::size_t g = git->second, p = pit->second;
    ++c.support[g];
    if (g == p) {
      c.tp[g] += 1.0;
    } else {
      c.fn[g] += 1.0;
      c.fp[p] += 1.0;
    }
  }
  return c;
}

MacroPrf macro_from_counts(const ClassCounts& c) {
  MacroPrf m;
  const std::size_t k = c.tp.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double p = safe_div(c.tp[i], c.tp[i] + c.fp[i]);
    const double r = safe_div(c.tp[i], c.tp[i] + c.fn[i]);
    m.precision += p;
    m.recall += r;
    m.f1 += safe_div(2.0 * p * r, p + r);
  }
  m.precision /= static_cast<double>(k);
  m.recall /= static_cast<double>(k);
  m.f1 /= static_cast<double>(k);
  return m;
}

LabeledIds to_labeled_ids(const PredictionSet& preds) {
  LabeledIds out;
  out.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i)
    out.emplace_back(preds.ids()[i], std::string(preds.display_at(i)));
  return out;
}

}  // namespace

MacroPrf macro_prf(const LabeledIds& preds, const LabeledIds& golds,
                   const std::vector<std::string>& vocabulary) {
  return macro_from_counts(tally(preds, golds, vocabulary));
}

MacroPrf macro_prf(const PredictionSet& preds,
                   const std::map<std::string, std::size_t>& gold_indices) {
  const auto& vocab = family_vocabulary(preds.family());
  LabeledIds golds;
  golds.reserve(gold_indices.size());
  for (const auto& [id, idx] : gold_indices) golds.emplace_back(id, vocab[idx]);
  return macro_prf(to_labeled_ids(preds), golds, vocab);
}

EvasionEval evasion_eval(const PredictionSet& preds, const std::vector<TestInstance>& test) {
  if (preds.family() != LabelFamily::Evasion)
    throw std::invalid_argument("evasion_eval requires evasion predictions");
  if (preds.size() != test.size())
    throw IdMismatch("prediction count differs from test size");

  const auto& vocab = family_vocabulary(LabelFamily::Evasion);
  const LabeledIds pred_ids = to_labeled_ids(preds);

  EvasionEval out;
  for (std::size_t k = 0; k < 3; ++k) {
    LabeledIds golds;
    golds.reserve(test.size());
    for (const TestInstance& t : test)
      golds.emplace_back(t.id, std::string(display_string(t.evasion_annotations[k])));
    out.f1_per_annotator[k] = macro_prf(pred_ids, golds, vocab).f1;
  }
  out.f1_avg =
      (out.f1_per_annotator[0] + out.f1_per_annotator[1] + out.f1_per_annotator[2]) / 3.0;

  std::size_t matched = 0;
  for (const TestInstance& t : test) {
    const auto pred = static_cast<EvasionLabel>(preds.label_index_of(t.id));
    if (std::find(t.evasion_annotations.begin(), t.evasion_annotations.end(), pred) !=
        t.evasion_annotations.end())
      ++matched;
  }
  out.acc_match = static_cast<double>(matched) / static_cast<double>(test.size());
  return out;
}

ConfusionMatrix confusion_matrix(const std::vector<GoldPredPairs>& streams,
                                 const std::vector<std::string>& vocabulary,
                                 ConfusionNormalize normalize) {
  if (streams.empty()) throw std::invalid_argument("no confusion streams");
  std::unordered_map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) label_index[vocabulary[i]] = i;

  const std::size_t k = vocabulary.size();
  ConfusionMatrix out;
  out.labels = vocabulary;
  out.values.assign(k, std::vector<double>(k, 0.0));

  // Counts averaged across streams first; normalization only afterwards.
  for (const GoldPredPairs& stream : streams) {
    for (const auto& [gold, pred] : stream) {
      auto git = label_index.find(gold);
      auto pit = label_index.find(pred);
      if (git == label_index.end() || pit == label_index.end())
        throw std::invalid_argument("confusion label outside vocabulary");
      out.values[git->second][pit->second] += 1.0;
    }
  }
  const double n = static_cast<double>(streams.size());
  for (auto& row : out.values)
    for (double& v : row) v /= n;

  out.zero_support_rows.assign(k, false);
  if (normalize == ConfusionNormalize::Row) {
    out.row_normalized = true;
    for (std::size_t g = 0; g < k; ++g) {
      double sum = 0.0;
      for (double v : out.values[g]) sum += v;
      if (sum == 0.0) {
        out.zero_support_rows[g] = true;
        continue;
      }
      for (double& v : out.values[g]) v /= sum;
    }
  }
  return out;
}

std::vector<PerLabelRow> per_label_report(const LabeledIds& preds, const LabeledIds& golds,
                                          const std::vector<std::string>& vocabulary) {
  const ClassCounts c = tally(preds, golds, vocabulary);
  std::vector<PerLabelRow> rows;
  rows.reserve(vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    PerLabelRow row;
    row.label = vocabulary[i];
    row.support = c.support[i];
    row.precision = safe_div(c.tp[i], c.tp[i] + c.fp[i]);
    row.recall = safe_div(c.tp[i], c.tp[i] + c.fn[i]);
    row.f1 = safe_div(2.0 * row.precision * row.recall, row.precision + row.recall);
    rows.push_back(std::move(row));
  }
  return rows;
}

double fleiss_kappa(const std::vector<std::vector<std::size_t>>& table) {
  if (table.empty()) throw InsufficientRaters();
  const std::size_t categories = table.front().size();
  std::size_t raters = 0;
  for (const auto& row : table) {
    if (row.size() != categories) throw std::invalid_argument("ragged rating table");
    std::size_t row_sum = 0;
    for (std::size_t v : row) row_sum += v;
    if (raters == 0) raters = row_sum;
    if (row_sum != raters) throw InsufficientRaters();
  }
  if (raters < 2) throw InsufficientRaters();

  const double items = static_cast<double>(table.size());
  const double n = static_cast<double>(raters);

  double p_bar = 0.0;
  std::vector<double> category_share(categories, 0.0);
  for (const auto& row : table) {
    double agree = 0.0;
    for (std::size_t j = 0; j < categories; ++j) {
      const double nij = static_cast<double>(row[j]);
      agree += nij * (nij - 1.0);
      category_share[j] += nij;
    }
    p_bar += agree / (n * (n - 1.0));
  }
  p_bar /= items;

  double pe_bar = 0.0;
  for (double& share : category_share) {
    share /= items * n;
    pe_bar += share * share;
  }

  if (pe_bar >= 1.0) return p_bar >= 1.0 ? 1.0 : 0.0;
  return (p_bar - pe_bar) / (1.0 - pe_bar);
}

std::vector<std::vector<std::size_t>> rating_table(
    const std::vector<std::vector<std::size_t>>& item_ratings, std::size_t num_categories) {
  std::vector<std::vector<std::size_t>> table;
  table.reserve(item_ratings.size());
  for (const auto& ratings : item_ratings) {
    std::vector<std::size_t> row(num_categories, 0);
    for (std::size_t cat : ratings) {
      if (cat >= num_categories) throw std::out_of_range("rating category out of range");
      ++row[cat];
    }
    table.push_back(std::move(row));
  }
  return table;
}

AggregateStat aggregate_stat(std::span<const double> values) {
  AggregateStat s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::map<std::string, double> MetricsReport::scalar_metrics() const {
  std::map<std::string, double> m;
  if (clarity) {
    m["clarity_f1"] = clarity->f1;
    m["clarity_precision"] = clarity->precision;
    m["clarity_recall"] = clarity->recall;
  }
  if (evasion) {
    m["evasion_f1_a1"] = evasion->f1_per_annotator[0];
    m["evasion_f1_a2"] = evasion->f1_per_annotator[1];
    m["evasion_f1_a3"] = evasion->f1_per_annotator[2];
    m["evasion_f1_avg"] = evasion->f1_avg;
    m["evasion_acc_match"] = evasion->acc_match;
  }
  return m;
}

namespace {

LabeledIds clarity_golds(const std::vector<TestInstance>& test) {
  LabeledIds out;
  out.reserve(test.size());
  for (const TestInstance& t : test)
    out.emplace_back(t.id, std::string(display_string(t.clarity)));
  return out;
}

GoldPredPairs clarity_pairs(const PredictionSet& preds, const std::vector<TestInstance>& test) {
  GoldPredPairs pairs;
  pairs.reserve(test.size());
  for (const TestInstance& t : test)
    pairs.emplace_back(std::string(display_string(t.clarity)),
                       std::string(preds.display_of(t.id)));
  return pairs;
}

}  // namespace

MetricsReport evaluate_on_test(const PredictionSet& preds,
                               const std::vector<TestInstance>& test) {
  MetricsReport report;
  report.run_id = preds.run_id();
  report.target = preds.family();

  const auto& clarity_vocab = family_vocabulary(LabelFamily::Clarity);
  const auto& evasion_vocab = family_vocabulary(LabelFamily::Evasion);

  if (preds.family() == LabelFamily::Evasion) {
    report.evasion = evasion_eval(preds, test);

    const LabeledIds pred_ids = to_labeled_ids(preds);
    std::vector<GoldPredPairs> annotator_streams;
    for (std::size_t k = 0; k < 3; ++k) {
      LabeledIds golds;
      GoldPredPairs pairs;
      for (const TestInstance& t : test) {
        std::string gold(display_string(t.evasion_annotations[k]));
        golds.emplace_back(t.id, gold);
        pairs.emplace_back(std::move(gold), std::string(preds.display_of(t.id)));
      }
      report.evasion_per_label[k] = per_label_report(pred_ids, golds, evasion_vocab);
      annotator_streams.push_back(std::move(pairs));
    }
    report.evasion_confusion_raw =
        confusion_matrix(annotator_streams, evasion_vocab, ConfusionNormalize::None);
    report.evasion_confusion_row_norm =
        confusion_matrix(annotator_streams, evasion_vocab, ConfusionNormalize::Row);

    const PredictionSet derived = preds.derive_clarity();
    const LabeledIds derived_ids = to_labeled_ids(derived);
    const LabeledIds gold_clarity = clarity_golds(test);
    report.clarity = macro_prf(derived_ids, gold_clarity, clarity_vocab);
    report.clarity_per_label = per_label_report(derived_ids, gold_clarity, clarity_vocab);
    report.clarity_confusion_raw = confusion_matrix({clarity_pairs(derived, test)},
                                                    clarity_vocab, ConfusionNormalize::None);
    report.clarity_confusion_row_norm = confusion_matrix(
        {clarity_pairs(derived, test)}, clarity_vocab, ConfusionNormalize::Row);
  } else {
    const LabeledIds pred_ids = to_labeled_ids(preds);
    const LabeledIds gold_clarity = clarity_golds(test);
    report.clarity = macro_prf(pred_ids, gold_clarity, clarity_vocab);
    report.clarity_per_label = per_label_report(pred_ids, gold_clarity, clarity_vocab);
    report.clarity_confusion_raw = confusion_matrix({clarity_pairs(preds, test)},
                                                    clarity_vocab, ConfusionNormalize::None);
    report.clarity_confusion_row_norm = confusion_matrix(
        {clarity_pairs(preds, test)}, clarity_vocab, ConfusionNormalize::Row);
  }
  return report;
}

std::map<std::string, AggregateStat> aggregate_reports(
    const std::vector<MetricsReport>& per_seed) {
  std::map<std::string, std::vector<double>> series;
  for (const MetricsReport& r : per_seed)
    for (const auto& [name, value] : r.scalar_metrics()) series[name].push_back(value);
  std::map<std::string, AggregateStat> out;
  for (const auto& [name, values] : series) out[name] = aggregate_stat(values);
  return out;
}

}  // namespace clarity
