#include "clarity/train_loop.hpp"

#include <algorithm>

#include "clarity/rng.hpp"

namespace clarity {

std::string_view target_name(TrainTarget t) {
  return t == TrainTarget::DirectClarity ? "direct_clarity" : "evasion";
}

TrainTarget parse_target(std::string_view s) {
  if (s == "direct_clarity") return TrainTarget::DirectClarity;
  if (s == "evasion") return TrainTarget::Evasion;
  throw std::invalid_argument("unknown training target: " + std::string(s));
}

LabelFamily target_family(TrainTarget t) {
  return t == TrainTarget::DirectClarity ? LabelFamily::Clarity : LabelFamily::Evasion;
}

NoValidationSplit::NoValidationSplit()
    : std::runtime_error("training requires a non-empty validation split") {}

EarlyStopper::EarlyStopper(int patience, double threshold)
    : patience_(patience), threshold_(threshold) {
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");
}

bool EarlyStopper::observe(double score) {
  ++epoch_;
  if (score > best_ + threshold_) {
    best_ = score;
    best_epoch_ = epoch_;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

namespace {

std::size_t gold_index(const TrainInstance& t, TrainTarget target) {
  return target == TrainTarget::DirectClarity ? index_of(t.clarity) : index_of(t.evasion);
}

template <typename Instance>
TrainingExample render_example(const Instance& inst, const TrainRunSpec& spec,
                               NerBackend* ner, std::size_t label) {
  const MaskedPair masked = apply_masking(spec.masking, inst.question, inst.answer, ner);
  TrainingExample ex;
  ex.id = inst.id;
  ex.input = render(spec.representation, masked.question, masked.answer);
  ex.label_index = label;
  return ex;
}

std::vector<std::vector<TrainingExample>> make_batches(std::vector<TrainingExample> examples,
                                                       int batch_size, SeededRng& rng) {
  fisher_yates_shuffle(examples, rng);
  std::vector<std::vector<TrainingExample>> batches;
  for (std::size_t i = 0; i < examples.size(); i += batch_size) {
    const std::size_t end = std::min(examples.size(), i + batch_size);
    batches.emplace_back(examples.begin() + i, examples.begin() + end);
  }
  return batches;
}

PredictionSet predictions_from(const std::vector<TrainingExample>& examples,
                               const std::vector<std::size_t>& labels,
                               const std::string& run_id, LabelFamily family,
                               std::uint64_t seed) {
  PredictionSet out(run_id, family, seed);
  for (std::size_t i = 0; i < examples.size(); ++i) out.add(examples[i].id, labels[i]);
  return out;
}

double validation_macro_f1(EncoderBackend& backend,
                           const std::vector<TrainingExample>& val_examples,
                           LabelFamily family) {
  const auto predicted = backend.evaluate(val_examples);
  const auto& vocab = family_vocabulary(family);
  LabeledIds preds, golds;
  preds.reserve(val_examples.size());
  golds.reserve(val_examples.size());
  for (std::size_t i = 0; i < val_examples.size(); ++i) {
    preds.emplace_back(val_examples[i].id, vocab[predicted[i]]);
    golds.emplace_back(val_examples[i].id, vocab[val_examples[i].label_index]);
  }
  return macro_prf(preds, golds, vocab).f1;
}

}  // namespace

RunResult train_run(const TrainRunSpec& spec, const std::vector<TrainInstance>& train,
                    const std::vector<TrainInstance>& val,
                    const std::vector<TestInstance>& test, const BackendFactory& factory,
                    NerBackend* ner,
                    const std::optional<std::filesystem::path>& checkpoint_dir) {
  if (train.empty()) throw EmptyDataset();
  if (val.empty()) throw NoValidationSplit();
  if (spec.hp.max_epochs < 1 || spec.hp.train_batch_size < 1)
    throw std::invalid_argument("invalid hyperparameters");
  if (spec.seeds.empty()) throw std::invalid_argument("at least one seed required");

  const LabelFamily family = target_family(spec.target);
  const std::size_t num_labels = family_size(family);

  // Render once; the per-seed loops only reshuffle.
  std::vector<TrainingExample> train_examples, val_examples, test_examples;
  std::vector<std::string> special_tokens;
  for (const TrainInstance& t : train)
    train_examples.push_back(render_example(t, spec, ner, gold_index(t, spec.target)));
  for (const TrainInstance& t : val)
    val_examples.push_back(render_example(t, spec, ner, gold_index(t, spec.target)));
  for (const TestInstance& t : test)
    test_examples.push_back(render_example(t, spec, ner, 0));
  if (!train_examples.empty()) special_tokens = train_examples.front().input.added_special_tokens;

  // Weights come from the training split only.
  std::vector<std::size_t> counts(num_labels, 0);
  for (const TrainingExample& ex : train_examples) ++counts[ex.label_index];
  RunResult result;
  result.class_weights = compute_class_weights(counts, spec.weighting);

  for (std::uint64_t seed : spec.seeds) {
    auto backend = factory();
    backend->initialize(seed, special_tokens, num_labels, spec.hp);

    SeedRunResult sr;
    sr.seed = seed;
    SeededRng rng(seed);
    EarlyStopper stopper(spec.hp.early_stop_patience, spec.hp.early_stop_threshold);
    for (int epoch = 1; epoch <= spec.hp.max_epochs; ++epoch) {
      backend->train_epoch(make_batches(train_examples, spec.hp.train_batch_size, rng),
                           result.class_weights.weights);
      const double f1 = validation_macro_f1(*backend, val_examples, family);
      sr.val_f1_history.push_back(f1);
      if (stopper.observe(f1)) backend->snapshot();
      if (stopper.should_stop()) break;
    }
    backend->restore();
    sr.best_epoch = stopper.best_epoch();
    sr.epochs_run = stopper.epochs_seen();

    const std::string seed_run_id = spec.run_id + "/seed-" + std::to_string(seed);
    sr.val_predictions = predictions_from(val_examples, backend->evaluate(val_examples),
                                          seed_run_id, family, seed);
    if (!test_examples.empty())
      sr.test_predictions = predictions_from(test_examples, backend->evaluate(test_examples),
                                             seed_run_id, family, seed);
    if (spec.target == TrainTarget::Evasion) {
      sr.derived_clarity_val = sr.val_predictions.derive_clarity();
      if (sr.test_predictions)
        sr.derived_clarity_test = sr.test_predictions->derive_clarity();
    }
    if (sr.test_predictions) sr.test_report = evaluate_on_test(*sr.test_predictions, test);

    if (checkpoint_dir) {
      std::filesystem::create_directories(*checkpoint_dir);
      const auto path = *checkpoint_dir / ("seed-" + std::to_string(seed) + ".ckpt");
      if (backend->save(path)) sr.checkpoint = path;
    }
    result.per_seed.push_back(std::move(sr));
  }

  std::vector<MetricsReport> reports;
  for (const SeedRunResult& sr : result.per_seed)
    if (sr.test_report) reports.push_back(*sr.test_report);
  result.aggregate = aggregate_reports(reports);
  return result;
}

PredictionSet predict_labels(EncoderBackend& backend, const TrainRunSpec& spec,
                             const std::vector<TestInstance>& instances, NerBackend* ner,
                             const std::string& run_id) {
  const LabelFamily family = target_family(spec.target);
  PredictionSet out(run_id, family);
  if (instances.empty()) return out;
  std::vector<TrainingExample> examples;
  examples.reserve(instances.size());
  for (const TestInstance& t : instances)
    examples.push_back(render_example(t, spec, ner, 0));
  const auto labels = backend.evaluate(examples);
  for (std::size_t i = 0; i < examples.size(); ++i) out.add(examples[i].id, labels[i]);
  return out;
}

}  // namespace clarity
