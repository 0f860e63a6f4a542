#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "clarity/class_weights.hpp"
#include "clarity/encoder_backend.hpp"
#include "clarity/instances.hpp"
#include "clarity/masking.hpp"
#include "clarity/metrics.hpp"
#include "clarity/predictions.hpp"
#include "clarity/render.hpp"

namespace clarity {

enum class TrainTarget : std::uint8_t { DirectClarity = 0, Evasion };

std::string_view target_name(TrainTarget t);
TrainTarget parse_target(std::string_view s);
LabelFamily target_family(TrainTarget t);

class NoValidationSplit : public std::runtime_error {
 public:
  NoValidationSplit();
};

// Epoch-level early stopping: an epoch improves only when its score exceeds
// the tracked best by more than `threshold`; training stops after `patience`
// consecutive non-improving epochs. The tracked best (and the checkpoint)
// moves only on qualifying improvements.
class EarlyStopper {
 public:
  EarlyStopper(int patience, double threshold);

  // Returns true when the score qualifies as an improvement.
  bool observe(double score);
  bool should_stop() const { return stale_ >= patience_; }
  int best_epoch() const { return best_epoch_; }  // 1-based
  double best_score() const { return best_; }
  int epochs_seen() const { return epoch_; }

 private:
  int patience_;
  double threshold_;
  int epoch_ = 0;
  int best_epoch_ = 0;
  int stale_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

struct TrainRunSpec {
  TrainTarget target = TrainTarget::Evasion;
  RepresentationMode representation = RepresentationMode::Marked;
  MaskingMode masking = MaskingMode::None;
  WeightScheme weighting;
  std::vector<std::uint64_t> seeds = {13, 21, 42};
  Hyperparameters hp;
  std::string run_id = "run";
};

struct SeedRunResult {
  std::uint64_t seed = 0;
  int best_epoch = 0;
  int epochs_run = 0;
  std::vector<double> val_f1_history;
  std::optional<std::filesystem::path> checkpoint;
  PredictionSet val_predictions;
  std::optional<PredictionSet> test_predictions;
  std::optional<PredictionSet> derived_clarity_val;   // target = evasion only
  std::optional<PredictionSet> derived_clarity_test;
  std::optional<MetricsReport> test_report;
};

struct RunResult {
  std::vector<SeedRunResult> per_seed;
  std::map<std::string, AggregateStat> aggregate;  // across seeds, on test metrics
  ClassWeights class_weights;                      // from the training split
};

// Fine-tuning contract: renders inputs once, then per seed trains up to
// hp.max_epochs with early stopping on validation macro-F1 of the trained
// target, restores the best checkpoint, and predicts validation and test.
// For the evasion target, taxonomy-derived clarity predictions are emitted
// alongside.
RunResult train_run(const TrainRunSpec& spec, const std::vector<TrainInstance>& train,
                    const std::vector<TrainInstance>& val,
                    const std::vector<TestInstance>& test, const BackendFactory& factory,
                    NerBackend* ner = nullptr,
                    const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt);

// One label per instance from an already trained (or reloaded) backend,
// rendered the same way the run was. Derive clarity from evasion output via
// PredictionSet::derive_clarity.
PredictionSet predict_labels(EncoderBackend& backend, const TrainRunSpec& spec,
                             const std::vector<TestInstance>& instances,
                             NerBackend* ner = nullptr,
                             const std::string& run_id = "predict");

}  // namespace clarity
