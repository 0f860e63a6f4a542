#include "clarity/run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "clarity/hashing.hpp"

namespace clarity {

using nlohmann::json;

ConfigError::ConfigError(const std::string& what) : std::runtime_error(what) {}

std::string_view run_mode_name(RunMode m) {
  return m == RunMode::Train ? "train" : "zeroshot";
}

RunMode parse_run_mode(std::string_view s) {
  if (s == "train") return RunMode::Train;
  if (s == "zeroshot") return RunMode::ZeroShot;
  throw ConfigError("unknown run mode: " + std::string(s));
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig run_config_from_json(const std::string& text,
                               const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig c;
  try {
    c.name = j.value("name", c.name);
    if (j.contains("mode")) c.mode = parse_run_mode(j["mode"].get<std::string>());
    if (j.contains("target")) c.target = parse_target(j["target"].get<std::string>());

    const json data = j.value("data", json::object());
    if (data.contains("train"))
      c.train_path = resolve(base_dir, data["train"].get<std::string>());
    if (data.contains("test"))
      c.test_path = resolve(base_dir, data["test"].get<std::string>());

    if (j.contains("representation"))
      c.representation = parse_representation(j["representation"].get<std::string>());
    if (j.contains("masking")) c.masking = parse_masking(j["masking"].get<std::string>());
    if (j.contains("ner") && j["ner"].contains("lexicon"))
      c.lexicon_path = resolve(base_dir, j["ner"]["lexicon"].get<std::string>());

    if (j.contains("weighting")) {
      const json& w = j["weighting"];
      c.weighting.kind = parse_weight_kind(w.value("kind", "unweighted"));
      c.weighting.epsilon = w.value("epsilon", c.weighting.epsilon);
      c.weighting.cap = w.value("cap", c.weighting.cap);
    }

    if (j.contains("split")) {
      const json& s = j["split"];
      if (s.contains("regime")) c.split_regime = parse_regime(s["regime"].get<std::string>());
      c.split_ratio = s.value("ratio", c.split_ratio);
      c.split_seed = s.value("seed", c.split_seed);
      if (s.contains("file")) c.split_file = resolve(base_dir, s["file"].get<std::string>());
    }

    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();

    if (j.contains("hyperparameters")) {
      const json& h = j["hyperparameters"];
      c.hp.max_input_length = h.value("max_input_length", c.hp.max_input_length);
      c.hp.learning_rate = h.value("learning_rate", c.hp.learning_rate);
      c.hp.warmup_ratio = h.value("warmup_ratio", c.hp.warmup_ratio);
      c.hp.weight_decay = h.value("weight_decay", c.hp.weight_decay);
      c.hp.dropout = h.value("dropout", c.hp.dropout);
      c.hp.max_epochs = h.value("max_epochs", c.hp.max_epochs);
      c.hp.train_batch_size = h.value("train_batch_size", c.hp.train_batch_size);
      c.hp.eval_batch_size = h.value("eval_batch_size", c.hp.eval_batch_size);
      c.hp.early_stop_patience = h.value("early_stop_patience", c.hp.early_stop_patience);
      c.hp.early_stop_threshold = h.value("early_stop_threshold", c.hp.early_stop_threshold);
    }

    if (j.contains("backend")) {
      const json& b = j["backend"];
      c.backend_id = b.value("id", c.backend_id);
      c.backend_options.feature_dims = b.value("feature_dims", c.backend_options.feature_dims);
      c.backend_options.lr_scale = b.value("lr_scale", c.backend_options.lr_scale);
    }

    if (j.contains("zeroshot")) {
      const json& z = j["zeroshot"];
      c.provider = z.value("provider", c.provider);
      if (z.contains("prompt"))
        c.prompt_path = resolve(base_dir, z["prompt"].get<std::string>());
      c.allow_custom_prompt = z.value("allow_custom_prompt", c.allow_custom_prompt);
      c.batch_size = z.value("batch_size", c.batch_size);
      c.max_attempts = z.value("max_attempts", c.max_attempts);
      c.parallelism = z.value("parallelism", c.parallelism);
      c.backoff_base_ms = z.value("backoff_base_ms", c.backoff_base_ms);
      c.chat_host = z.value("host", c.chat_host);
      c.chat_port = z.value("port", c.chat_port);
      c.chat_path = z.value("path", c.chat_path);
      c.chat_model = z.value("model", c.chat_model);
      c.chat_temperature = z.value("temperature", c.chat_temperature);
      c.api_key_env = z.value("api_key_env", c.api_key_env);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }

  if (c.mode == RunMode::Train && c.train_path.empty())
    throw ConfigError("train mode requires data.train");
  if (c.mode == RunMode::ZeroShot && c.test_path.empty())
    throw ConfigError("zeroshot mode requires data.test");
  if (c.seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0))
    throw ConfigError("split.ratio must lie in (0, 1)");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return run_config_from_json(text, path.parent_path());
}

std::string config_canonical_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["mode"] = run_mode_name(c.mode);
  j["target"] = target_name(c.target);
  j["data"] = {{"train", c.train_path.string()}, {"test", c.test_path.string()}};
  j["representation"] = representation_name(c.representation);
  j["masking"] = masking_name(c.masking);
  if (c.lexicon_path) j["ner"]["lexicon"] = c.lexicon_path->string();
  j["weighting"] = {{"kind", weight_kind_name(c.weighting.kind)},
                    {"epsilon", c.weighting.epsilon},
                    {"cap", c.weighting.cap}};
  j["split"] = {{"regime", regime_name(c.split_regime)},
                {"ratio", c.split_ratio},
                {"seed", c.split_seed},
                {"file", c.split_file ? c.split_file->string() : ""}};
  j["seeds"] = c.seeds;
  j["hyperparameters"] = {{"max_input_length", c.hp.max_input_length},
                          {"learning_rate", c.hp.learning_rate},
                          {"warmup_ratio", c.hp.warmup_ratio},
                          {"weight_decay", c.hp.weight_decay},
                          {"dropout", c.hp.dropout},
                          {"max_epochs", c.hp.max_epochs},
                          {"train_batch_size", c.hp.train_batch_size},
                          {"eval_batch_size", c.hp.eval_batch_size},
                          {"early_stop_patience", c.hp.early_stop_patience},
                          {"early_stop_threshold", c.hp.early_stop_threshold}};
  j["backend"] = {{"id", c.backend_id},
                  {"feature_dims", c.backend_options.feature_dims},
                  {"lr_scale", c.backend_options.lr_scale}};
  if (c.mode == RunMode::ZeroShot) {
    j["zeroshot"] = {{"provider", c.provider},
                     {"prompt", c.prompt_path.string()},
                     {"allow_custom_prompt", c.allow_custom_prompt},
                     {"batch_size", c.batch_size},
                     {"max_attempts", c.max_attempts},
                     {"parallelism", c.parallelism},
                     {"backoff_base_ms", c.backoff_base_ms},
                     {"host", c.chat_host},
                     {"port", c.chat_port},
                     {"path", c.chat_path},
                     {"model", c.chat_model},
                     {"temperature", c.chat_temperature},
                     {"api_key_env", c.api_key_env}};
  }
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& config) {
  return sha256_hex(config_canonical_json(config));
}

}  // namespace clarity
