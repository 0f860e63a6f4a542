#include "clarity/runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "clarity/hashing.hpp"
#include "clarity/ner.hpp"
#include "clarity/predictions.hpp"
#include "clarity/reporting.hpp"
#include "clarity/synth_corpus.hpp"
#include "clarity/zeroshot.hpp"

namespace clarity {

using nlohmann::json;

RunExists::RunExists(const std::filesystem::path& dir)
    : std::runtime_error("run directory " + dir.string() +
                         " already exists for this config hash (use --force to redo)") {}

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::unique_ptr<NerBackend> make_ner(const RunConfig& config) {
  if (config.masking == MaskingMode::None) return nullptr;
  if (config.lexicon_path)
    return std::make_unique<LexiconNer>(LexiconNer::from_file(*config.lexicon_path));
  return std::make_unique<LexiconNer>(fixture_person_names());
}

SplitAssignment make_split(const RunConfig& config,
                           const std::vector<TrainInstance>& train) {
  if (config.split_file) return SplitAssignment::load(*config.split_file);
  if (config.split_regime == SplitRegime::Stratified)
    return dual_stratified_split(train, config.split_ratio, config.split_seed);
  return president_disjoint_split(train, config.split_ratio);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Cross-seed report: scalar means, per-label means, and confusion matrices
// whose raw counts are averaged across seeds (and annotators) before any
// row normalisation.
MetricsReport build_aggregate_report(const std::vector<SeedRunResult>& per_seed,
                                     const std::vector<TestInstance>& test,
                                     TrainTarget target, const std::string& run_id) {
  MetricsReport agg;
  agg.run_id = run_id + "/aggregate";
  agg.target = target_family(target);

  std::vector<MetricsReport> reports;
  for (const SeedRunResult& sr : per_seed)
    if (sr.test_report) reports.push_back(*sr.test_report);
  if (reports.empty()) return agg;

  const auto stats = aggregate_reports(reports);
  if (reports.front().clarity) {
    MacroPrf m;
    m.f1 = stats.at("clarity_f1").mean;
    m.precision = stats.at("clarity_precision").mean;
    m.recall = stats.at("clarity_recall").mean;
    agg.clarity = m;
  }
  if (reports.front().evasion) {
    EvasionEval e;
    e.f1_per_annotator = {stats.at("evasion_f1_a1").mean, stats.at("evasion_f1_a2").mean,
                          stats.at("evasion_f1_a3").mean};
    e.f1_avg = stats.at("evasion_f1_avg").mean;
    e.acc_match = stats.at("evasion_acc_match").mean;
    agg.evasion = e;
  }

  auto mean_per_label = [&](auto pick) {
    std::vector<PerLabelRow> rows = pick(reports.front());
    for (std::size_t i = 1; i < reports.size(); ++i) {
      const auto other = pick(reports[i]);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r].precision += other[r].precision;
        rows[r].recall += other[r].recall;
        rows[r].f1 += other[r].f1;
      }
    }
    const double n = static_cast<double>(reports.size());
    for (PerLabelRow& r : rows) {
      r.precision /= n;
      r.recall /= n;
      r.f1 /= n;
    }
    return rows;
  };
  agg.clarity_per_label = mean_per_label([](const MetricsReport& r) { return r.clarity_per_label; });
  if (reports.front().evasion) {
    for (std::size_t k = 0; k < 3; ++k)
      agg.evasion_per_label[k] = mean_per_label(
          [k](const MetricsReport& r) { return r.evasion_per_label[k]; });
  }

  // Confusions from raw (gold, pred) streams across every seed.
  const auto& clarity_vocab = family_vocabulary(LabelFamily::Clarity);
  std::vector<GoldPredPairs> clarity_streams;
  std::vector<GoldPredPairs> evasion_streams;
  for (const SeedRunResult& sr : per_seed) {
    if (!sr.test_predictions) continue;
    const PredictionSet* clarity_preds =
        target == TrainTarget::Evasion ? (sr.derived_clarity_test ? &*sr.derived_clarity_test
                                                                  : nullptr)
                                       : &*sr.test_predictions;
    if (clarity_preds) {
      GoldPredPairs pairs;
      for (const TestInstance& t : test)
        pairs.emplace_back(std::string(display_string(t.clarity)),
                           std::string(clarity_preds->display_of(t.id)));
      clarity_streams.push_back(std::move(pairs));
    }
    if (target == TrainTarget::Evasion) {
      for (std::size_t k = 0; k < 3; ++k) {
        GoldPredPairs pairs;
        for (const TestInstance& t : test)
          pairs.emplace_back(std::string(display_string(t.evasion_annotations[k])),
                             std::string(sr.test_predictions->display_of(t.id)));
        evasion_streams.push_back(std::move(pairs));
      }
    }
  }
  if (!clarity_streams.empty()) {
    agg.clarity_confusion_raw =
        confusion_matrix(clarity_streams, clarity_vocab, ConfusionNormalize::None);
    agg.clarity_confusion_row_norm =
        confusion_matrix(clarity_streams, clarity_vocab, ConfusionNormalize::Row);
  }
  if (!evasion_streams.empty()) {
    const auto& evasion_vocab = family_vocabulary(LabelFamily::Evasion);
    agg.evasion_confusion_raw =
        confusion_matrix(evasion_streams, evasion_vocab, ConfusionNormalize::None);
    agg.evasion_confusion_row_norm =
        confusion_matrix(evasion_streams, evasion_vocab, ConfusionNormalize::Row);
  }
  return agg;
}

json base_manifest(const RunConfig& config, const std::string& run_id) {
  json m;
  m["run_id"] = run_id;
  m["config_hash"] = config_hash(config);
  m["created_utc"] = timestamp_utc();
  m["mode"] = run_mode_name(config.mode);
  json data;
  if (!config.train_path.empty() && std::filesystem::exists(config.train_path))
    data["train"] = {{"path", config.train_path.string()},
                     {"sha256", sha256_file_hex(config.train_path)}};
  if (!config.test_path.empty() && std::filesystem::exists(config.test_path))
    data["test"] = {{"path", config.test_path.string()},
                    {"sha256", sha256_file_hex(config.test_path)}};
  m["data"] = std::move(data);
  return m;
}

std::filesystem::path train_flow(const RunConfig& config,
                                 const std::filesystem::path& run_dir) {
  auto train = load_training(config.train_path);
  std::vector<TestInstance> test;
  if (!config.test_path.empty()) test = load_test(config.test_path);

  const SplitAssignment split = make_split(config, train);
  split.save(run_dir / "split.json");
  const SplitView view = apply_split(train, split);

  auto ner = make_ner(config);
  TrainRunSpec spec;
  spec.target = config.target;
  spec.representation = config.representation;
  spec.masking = config.masking;
  spec.weighting = config.weighting;
  spec.seeds = config.seeds;
  spec.hp = config.hp;
  spec.run_id = config.name;

  const BackendFactory factory =
      make_backend_factory(config.backend_id, config.backend_options);
  const RunResult result = train_run(spec, view.train, view.val, test, factory, ner.get(),
                                     run_dir / "checkpoints");

  json manifest = base_manifest(config, config.name);
  manifest["split"] = {{"regime", regime_name(split.regime)},
                       {"train_size", split.train_ids.size()},
                       {"val_size", split.val_ids.size()}};
  json seeds_json = json::array();

  for (const SeedRunResult& sr : result.per_seed) {
    const auto seed_dir = run_dir / ("seed_" + std::to_string(sr.seed));
    std::filesystem::create_directories(seed_dir);
    write_predictions(sr.val_predictions, PredictionFormat::Csv,
                      seed_dir / "predictions_val.csv");
    if (sr.test_predictions)
      write_predictions(*sr.test_predictions, PredictionFormat::Csv,
                        seed_dir / "predictions_test.csv");
    if (sr.derived_clarity_test)
      write_predictions(*sr.derived_clarity_test, PredictionFormat::Csv,
                        seed_dir / "derived_clarity_test.csv");
    if (sr.test_report)
      write_text(seed_dir / "metrics.json", report_to_json(*sr.test_report));

    json s;
    s["seed"] = sr.seed;
    s["best_epoch"] = sr.best_epoch;
    s["epochs_run"] = sr.epochs_run;
    s["val_f1_history"] = sr.val_f1_history;
    if (sr.checkpoint) s["checkpoint"] = sr.checkpoint->string();
    seeds_json.push_back(std::move(s));
  }
  manifest["seeds"] = std::move(seeds_json);
  manifest["class_weights"] = result.class_weights.weights;

  const auto agg_dir = run_dir / "aggregate";
  std::filesystem::create_directories(agg_dir);
  const MetricsReport agg =
      build_aggregate_report(result.per_seed, test, config.target, config.name);
  write_text(agg_dir / "metrics.json", report_to_json(agg, result.aggregate));
  write_text(agg_dir / "report.txt", render_report_tables(agg));
  const DatasetSummary train_dist = class_distribution(view.train, LabelFamily::Clarity);
  emit_report_plots(agg, agg_dir / "plots", &train_dist);

  manifest["status"] = "complete";
  write_text(run_dir / "manifest.json", json(manifest).dump(2) + "\n");
  return run_dir;
}

std::filesystem::path zeroshot_flow(const RunConfig& config,
                                    const std::filesystem::path& run_dir) {
  const auto test = load_test(config.test_path);
  PromptTemplate tpl = PromptTemplate::load(config.prompt_path, config.batch_size);
  const std::string prompt_hash = tpl.system_sha256();
  if (prompt_hash != kZeroShotPromptSha256 && !config.allow_custom_prompt)
    throw ConfigError("prompt hash " + prompt_hash +
                      " does not match the pinned prompt; set zeroshot.allow_custom_prompt "
                      "to run with a modified prompt");

  std::unique_ptr<ChatBackend> backend;
  if (config.provider == "mock") {
    backend = std::make_unique<MockChatBackend>();
  } else if (config.provider == "openai-compat") {
    HttpChatBackend::Options opts;
    opts.base_host = config.chat_host;
    opts.port = config.chat_port;
    opts.path = config.chat_path;
    opts.model = config.chat_model;
    opts.temperature = config.chat_temperature;
    opts.api_key_env = config.api_key_env;
    backend = std::make_unique<HttpChatBackend>(opts);
  } else {
    throw ConfigError("unknown zero-shot provider: " + config.provider);
  }

  ZeroShotOptions options;
  options.batch_size = config.batch_size;
  options.max_attempts = config.max_attempts;
  options.parallelism = config.parallelism;
  options.backoff_base_ms = config.backoff_base_ms;

  // Every batch lands in the transcript and the partial file as soon as it
  // completes, so a failed run can be audited and resumed.
  std::ofstream transcript(run_dir / "transcripts.jsonl");
  std::ofstream partial(run_dir / "partial_predictions.csv");
  partial << "id,label\n";
  const BatchSink sink = [&](const BatchLog& log, const std::vector<QaItem>& items,
                             const std::vector<EvasionLabel>& labels) {
    json t;
    t["batch_index"] = log.batch_index;
    t["first_item"] = log.first_item;
    t["size"] = log.size;
    t["attempts"] = log.attempts;
    t["stripped_fence"] = log.stripped_fence;
    t["request"] = log.user_text;
    t["raw_responses"] = log.raw_responses;
    transcript << t.dump() << '\n' << std::flush;
    for (std::size_t i = 0; i < items.size(); ++i)
      partial << items[i].id << ',' << display_string(labels[i]) << '\n';
    partial.flush();
  };

  json manifest = base_manifest(config, config.name);
  manifest["prompt_sha256"] = prompt_hash;
  manifest["provider"] = backend->provider();
  manifest["batch_size"] = options.batch_size;
  manifest["max_attempts"] = options.max_attempts;
  manifest["temperature"] = config.chat_temperature;

  ZeroShotResult result = [&] {
    try {
      return classify_dataset(qa_items(test), *backend, tpl, options, config.name, sink);
    } catch (...) {
      manifest["status"] = "failed";
      write_text(run_dir / "manifest.json", json(manifest).dump(2) + "\n");
      throw;
    }
  }();

  write_predictions(result.evasion, PredictionFormat::Csv, run_dir / "predictions.csv");
  write_predictions(result.derived_clarity, PredictionFormat::Csv,
                    run_dir / "derived_clarity.csv");

  const MetricsReport report = evaluate_on_test(result.evasion, test);
  write_text(run_dir / "metrics.json", report_to_json(report));
  write_text(run_dir / "report.txt", render_report_tables(report));
  emit_report_plots(report, run_dir / "plots", nullptr);

  json batches = json::array();
  for (const BatchLog& log : result.batch_logs)
    batches.push_back({{"batch_index", log.batch_index},
                       {"attempts", log.attempts},
                       {"stripped_fence", log.stripped_fence}});
  manifest["batches"] = std::move(batches);
  manifest["status"] = "complete";
  write_text(run_dir / "manifest.json", json(manifest).dump(2) + "\n");
  return run_dir;
}

}  // namespace

std::filesystem::path run_experiment(const RunConfig& config,
                                     const std::filesystem::path& out_root, bool force) {
  const std::string hash = config_hash(config);
  const auto run_dir = out_root / (config.name + "-" + hash.substr(0, 8));
  if (std::filesystem::exists(run_dir)) {
    if (!force) throw RunExists(run_dir);
    std::filesystem::remove_all(run_dir);
  }
  std::filesystem::create_directories(run_dir);
  write_text(run_dir / "config.json", config_canonical_json(config));
  return config.mode == RunMode::Train ? train_flow(config, run_dir)
                                       : zeroshot_flow(config, run_dir);
}

std::filesystem::path run_experiment(const std::filesystem::path& config_path,
                                     const std::filesystem::path& out_root, bool force) {
  return run_experiment(load_run_config(config_path), out_root, force);
}

}  // namespace clarity
