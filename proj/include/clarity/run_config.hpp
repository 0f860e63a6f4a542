#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clarity/class_weights.hpp"
#include "clarity/encoder_backend.hpp"
#include "clarity/masking.hpp"
#include "clarity/render.hpp"
#include "clarity/split.hpp"
#include "clarity/train_loop.hpp"

namespace clarity {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what);
};

enum class RunMode : std::uint8_t { Train = 0, ZeroShot };

std::string_view run_mode_name(RunMode m);
RunMode parse_run_mode(std::string_view s);

// Full experiment specification. Defaults mirror the fixed encoder training
// setup: 512-token budget, lr 2e-5, warmup 0.1, weight decay 0.01, dropout
// 0.1, 20 epochs, batch 32/32, patience 5 at threshold 1e-3, seeds 13/21/42.
struct RunConfig {
  std::string name = "run";
  RunMode mode = RunMode::Train;
  TrainTarget target = TrainTarget::Evasion;

  std::filesystem::path train_path;
  std::filesystem::path test_path;

  RepresentationMode representation = RepresentationMode::Marked;
  MaskingMode masking = MaskingMode::None;
  std::optional<std::filesystem::path> lexicon_path;

  WeightScheme weighting;

  SplitRegime split_regime = SplitRegime::Stratified;
  double split_ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::optional<std::filesystem::path> split_file;

  std::vector<std::uint64_t> seeds = {13, 21, 42};
  Hyperparameters hp;

  std::string backend_id = "hashed-bow";
  HashedBowBackend::Options backend_options;

  // Zero-shot protocol settings.
  std::string provider = "mock";
  std::filesystem::path prompt_path = "data/prompts/evasion_zero_shot.txt";
  bool allow_custom_prompt = false;
  std::size_t batch_size = 20;
  int max_attempts = 3;
  int parallelism = 1;
  int backoff_base_ms = 250;
  std::string chat_host;
  int chat_port = 443;
  std::string chat_path = "/v1/chat/completions";
  std::string chat_model;
  double chat_temperature = 0.0;
  std::string api_key_env = "CLARITY_API_KEY";
};

// Relative paths inside the file resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const std::string& text,
                               const std::filesystem::path& base_dir = ".");

// Canonical serialization (sorted keys, resolved settings); its SHA-256 is
// the run identity used for idempotent re-run detection.
std::string config_canonical_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace clarity
