#include "clarity/encoder_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "clarity/class_weights.hpp"
#include "clarity/text.hpp"

namespace clarity {

BackendFailure::BackendFailure(const std::string& what) : std::runtime_error(what) {}

HashedBowBackend::HashedBowBackend() : HashedBowBackend(Options{}) {}

HashedBowBackend::HashedBowBackend(Options options) : options_(options) {}

void HashedBowBackend::initialize(std::uint64_t seed,
                                  const std::vector<std::string>& added_special_tokens,
                                  std::size_t num_labels, const Hyperparameters& hp) {
  (void)added_special_tokens;  // hashed features need no vocabulary resize
  (void)seed;                  // weights start at zero; batch order carries the seed
  hp_ = hp;
  num_labels_ = num_labels;
  weights_.assign(num_labels_ * options_.feature_dims, 0.0);
  snapshot_weights_.clear();
  step_ = 0;
  total_steps_hint_ = 0;
  initialized_ = true;
}

namespace {

// FNV-1a, the usual choice for feature hashing.
std::uint64_t fnv1a(std::string_view token) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<std::pair<std::size_t, double>> HashedBowBackend::featurize(
    const RenderedInput& input) const {
  auto tokens = split_whitespace(to_lower(input.joined()));
  // End-truncation at the token budget: the front of the sequence survives.
  if (tokens.size() > static_cast<std::size_t>(hp_.max_input_length))
    tokens.resize(static_cast<std::size_t>(hp_.max_input_length));

  std::vector<std::pair<std::size_t, double>> feats;
  feats.reserve(tokens.size());
  for (const std::string& tok : tokens)
    feats.emplace_back(fnv1a(tok) % options_.feature_dims, 1.0);
  std::sort(feats.begin(), feats.end());
  // Merge duplicates, then L2-normalize.
  std::size_t w = 0;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (w > 0 && feats[w - 1].first == feats[i].first)
      feats[w - 1].second += feats[i].second;
    else
      feats[w++] = feats[i];
  }
  feats.resize(w);
  double norm = 0.0;
  for (const auto& [idx, v] : feats) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (auto& [idx, v] : feats) v /= norm;
  return feats;
}

std::vector<double> HashedBowBackend::scores_for(
    const std::vector<std::pair<std::size_t, double>>& feats) const {
  std::vector<double> scores(num_labels_, 0.0);
  for (std::size_t y = 0; y < num_labels_; ++y) {
    const double* row = weights_.data() + y * options_.feature_dims;
    double s = 0.0;
    for (const auto& [idx, v] : feats) s += row[idx] * v;
    scores[y] = s;
  }
  return scores;
}

namespace {

void softmax_inplace(std::vector<double>& scores) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

}  // namespace

double HashedBowBackend::train_epoch(const std::vector<std::vector<TrainingExample>>& batches,
                                     const std::vector<double>& class_weights) {
  if (!initialized_) throw BackendFailure("hashed-bow backend used before initialize()");
  if (class_weights.size() != num_labels_)
    throw BackendFailure("class weight vector does not match the label count");

  if (total_steps_hint_ == 0)
    total_steps_hint_ =
        std::max<std::uint64_t>(1, batches.size() * static_cast<std::uint64_t>(hp_.max_epochs));
  const std::uint64_t warmup_steps = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(hp_.warmup_ratio * static_cast<double>(total_steps_hint_)));

  double loss_sum = 0.0;
  std::size_t example_count = 0;
  for (const auto& batch : batches) {
    if (batch.empty()) continue;
    ++step_;
    const double warm = step_ < warmup_steps
                            ? static_cast<double>(step_) / static_cast<double>(warmup_steps)
                            : 1.0;
    const double lr = hp_.learning_rate * options_.lr_scale * warm;

    // Accumulate the batch gradient, then apply one update.
    std::vector<std::tuple<std::size_t, std::size_t, double>> grad;  // (label, feat, g)
    for (const TrainingExample& ex : batch) {
      const auto feats = featurize(ex.input);
      auto probs = scores_for(feats);
      softmax_inplace(probs);
      const double wy = class_weights[ex.label_index];
      loss_sum += weighted_ce(std::max(probs[ex.label_index], 1e-12), wy);
      ++example_count;
      for (std::size_t y = 0; y < num_labels_; ++y) {
        const double delta = wy * (probs[y] - (y == ex.label_index ? 1.0 : 0.0));
        for (const auto& [idx, v] : feats) grad.emplace_back(y, idx, delta * v);
      }
    }
    const double scale = lr / static_cast<double>(batch.size());
    for (const auto& [y, idx, g] : grad)
      weights_[y * options_.feature_dims + idx] -= scale * g;
    if (hp_.weight_decay > 0.0) {
      const double decay = 1.0 - lr * hp_.weight_decay;
      for (double& v : weights_) v *= decay;
    }
  }
  return example_count == 0 ? 0.0 : loss_sum / static_cast<double>(example_count);
}

std::vector<std::size_t> HashedBowBackend::evaluate(
    const std::vector<TrainingExample>& examples) {
  if (!initialized_) throw BackendFailure("hashed-bow backend used before initialize()");
  std::vector<std::size_t> out;
  out.reserve(examples.size());
  for (const TrainingExample& ex : examples) {
    const auto scores = scores_for(featurize(ex.input));
    out.push_back(static_cast<std::size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin()));
  }
  return out;
}

void HashedBowBackend::snapshot() { snapshot_weights_ = weights_; }

void HashedBowBackend::restore() {
  if (snapshot_weights_.empty()) throw BackendFailure("restore() before any snapshot()");
  weights_ = snapshot_weights_;
}

bool HashedBowBackend::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  const std::uint64_t labels = num_labels_, dims = options_.feature_dims;
  out.write(reinterpret_cast<const char*>(&labels), sizeof labels);
  out.write(reinterpret_cast<const char*>(&dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(weights_.data()),
            static_cast<std::streamsize>(weights_.size() * sizeof(double)));
  return static_cast<bool>(out);
}

void HashedBowBackend::load(const std::filesystem::path& path) {
  if (!initialized_) throw BackendFailure("initialize() before load()");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendFailure("cannot open checkpoint " + path.string());
  std::uint64_t labels = 0, dims = 0;
  in.read(reinterpret_cast<char*>(&labels), sizeof labels);
  in.read(reinterpret_cast<char*>(&dims), sizeof dims);
  if (labels != num_labels_ || dims != options_.feature_dims)
    throw BackendFailure("checkpoint shape " + std::to_string(labels) + "x" +
                         std::to_string(dims) + " does not match the configured model");
  weights_.assign(labels * dims, 0.0);
  in.read(reinterpret_cast<char*>(weights_.data()),
          static_cast<std::streamsize>(weights_.size() * sizeof(double)));
  if (!in) throw BackendFailure("checkpoint " + path.string() + " is truncated");
}

ScriptedBackend::ScriptedBackend(std::vector<std::vector<std::size_t>> epoch_predictions,
                                 Probe* probe)
    : epoch_predictions_(std::move(epoch_predictions)), probe_(probe) {}

void ScriptedBackend::initialize(std::uint64_t, const std::vector<std::string>&, std::size_t,
                                 const Hyperparameters&) {
  current_epoch_ = 0;
  snapshotted_epoch_ = -1;
}

double ScriptedBackend::train_epoch(const std::vector<std::vector<TrainingExample>>&,
                                    const std::vector<double>&) {
  ++current_epoch_;
  return 0.0;
}

std::vector<std::size_t> ScriptedBackend::evaluate(
    const std::vector<TrainingExample>& examples) {
  const std::size_t epoch_idx =
      current_epoch_ == 0
          ? 0
          : std::min<std::size_t>(current_epoch_ - 1, epoch_predictions_.size() - 1);
  const auto& script = epoch_predictions_.at(epoch_idx);
  if (script.size() != examples.size())
    throw BackendFailure("scripted predictions do not match the evaluation set size");
  return script;
}

void ScriptedBackend::snapshot() {
  snapshotted_epoch_ = current_epoch_;
  if (probe_) probe_->snapshotted_epoch = snapshotted_epoch_;
}

void ScriptedBackend::restore() {
  if (snapshotted_epoch_ < 0) throw BackendFailure("restore() before any snapshot()");
  current_epoch_ = snapshotted_epoch_;
  if (probe_) probe_->restored_epoch = current_epoch_;
}

BackendFactory make_backend_factory(const std::string& backend_id,
                                    const HashedBowBackend::Options& bow_options) {
  if (backend_id == "hashed-bow")
    return [bow_options] { return std::make_unique<HashedBowBackend>(bow_options); };
  throw std::invalid_argument("unknown encoder backend: " + backend_id);
}

}  // namespace clarity
