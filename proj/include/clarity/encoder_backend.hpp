#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "clarity/render.hpp"

namespace clarity {

class BackendFailure : public std::runtime_error {
 public:
  explicit BackendFailure(const std::string& what);
};

struct Hyperparameters {
  int max_input_length = 512;
  double learning_rate = 2e-5;
  double warmup_ratio = 0.1;
  double weight_decay = 0.01;
  double dropout = 0.1;
  int max_epochs = 20;
  int train_batch_size = 32;
  int eval_batch_size = 32;
  int early_stop_patience = 5;
  double early_stop_threshold = 1e-3;

  bool operator==(const Hyperparameters&) const = default;
};

struct TrainingExample {
  std::string id;
  RenderedInput input;
  std::size_t label_index = 0;  // within the run's target family
};

// One training run owns its backend exclusively; the loop is single threaded.
// Seeds run as independent backends created through a factory.
class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;

  virtual void initialize(std::uint64_t seed,
                          const std::vector<std::string>& added_special_tokens,
                          std::size_t num_labels, const Hyperparameters& hp) = 0;
  // Returns the mean weighted-CE loss across the epoch's batches.
  virtual double train_epoch(const std::vector<std::vector<TrainingExample>>& batches,
                             const std::vector<double>& class_weights) = 0;
  // Predicted label indices, order-aligned with `examples` (gold labels unused).
  virtual std::vector<std::size_t> evaluate(const std::vector<TrainingExample>& examples) = 0;
  virtual void snapshot() = 0;
  virtual void restore() = 0;
  virtual std::string id() const = 0;
  // Persist the current (restored) state; returns false when unsupported.
  virtual bool save(const std::filesystem::path& path) const { (void)path; return false; }
};

using BackendFactory = std::function<std::unique_ptr<EncoderBackend>()>;

// Deterministic CI-grade stub: hashed bag-of-words features into a linear
// softmax classifier trained by SGD on the weighted cross entropy. The
// default learning rate is calibrated for pretrained transformers, so the
// stub applies lr_scale on top of it.
class HashedBowBackend final : public EncoderBackend {
 public:
  struct Options {
    std::size_t feature_dims = 1 << 15;
    double lr_scale = 5e4;
  };
  HashedBowBackend();
  explicit HashedBowBackend(Options options);

  void initialize(std::uint64_t seed, const std::vector<std::string>& added_special_tokens,
                  std::size_t num_labels, const Hyperparameters& hp) override;
  double train_epoch(const std::vector<std::vector<TrainingExample>>& batches,
                     const std::vector<double>& class_weights) override;
  std::vector<std::size_t> evaluate(const std::vector<TrainingExample>& examples) override;
  void snapshot() override;
  void restore() override;
  std::string id() const override { return "hashed-bow"; }
  bool save(const std::filesystem::path& path) const override;
  // Rehydrate a checkpoint written by save(); hyperparameters must be
  // supplied again via initialize() beforehand.
  void load(const std::filesystem::path& path);

 private:
  struct Features;
  std::vector<double> scores_for(const std::vector<std::pair<std::size_t, double>>& feats) const;
  std::vector<std::pair<std::size_t, double>> featurize(const RenderedInput& input) const;

  Options options_;
  Hyperparameters hp_;
  std::size_t num_labels_ = 0;
  std::vector<double> weights_;           // num_labels x feature_dims
  std::vector<double> snapshot_weights_;
  std::uint64_t step_ = 0;
  std::uint64_t total_steps_hint_ = 0;
  bool initialized_ = false;
};

// Test double for the run contract: emits a scripted prediction set per epoch
// and tracks which epoch snapshot/restore landed on.
class ScriptedBackend final : public EncoderBackend {
 public:
  // Outlives the backend so tests can observe the restore behavior.
  struct Probe {
    int snapshotted_epoch = -1;
    int restored_epoch = -1;
  };

  // epoch_predictions[e] is returned by evaluate() during epoch e+1.
  explicit ScriptedBackend(std::vector<std::vector<std::size_t>> epoch_predictions,
                           Probe* probe = nullptr);

  void initialize(std::uint64_t seed, const std::vector<std::string>& added_special_tokens,
                  std::size_t num_labels, const Hyperparameters& hp) override;
  double train_epoch(const std::vector<std::vector<TrainingExample>>& batches,
                     const std::vector<double>& class_weights) override;
  std::vector<std::size_t> evaluate(const std::vector<TrainingExample>& examples) override;
  void snapshot() override;
  void restore() override;
  std::string id() const override { return "scripted"; }

  int current_epoch() const { return current_epoch_; }
  int snapshotted_epoch() const { return snapshotted_epoch_; }

 private:
  std::vector<std::vector<std::size_t>> epoch_predictions_;
  int current_epoch_ = 0;  // 0 = before training
  int snapshotted_epoch_ = -1;
  Probe* probe_ = nullptr;
};

// Registry keyed by backend id; "hashed-bow" ships by default.
BackendFactory make_backend_factory(const std::string& backend_id,
                                    const HashedBowBackend::Options& bow_options = {});

}  // namespace clarity
