#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "clarity/ensemble.hpp"
#include "clarity/import_adapter.hpp"
#include "clarity/instances.hpp"
#include "clarity/predictions.hpp"
#include "clarity/reporting.hpp"
#include "clarity/runner.hpp"
#include "clarity/split.hpp"
#include "clarity/synth_corpus.hpp"

namespace fs = std::filesystem;
using namespace clarity;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_split(const std::string& train_path, const std::string& regime, double ratio,
              std::uint64_t seed, const std::string& out, bool allow_small) {
  const auto instances = load_training(train_path);
  SplitAssignment assignment;
  if (parse_regime(regime) == SplitRegime::Stratified) {
    std::vector<std::string> underfilled;
    SplitOptions options;
    options.allow_underfilled_strata = allow_small;
    assignment = dual_stratified_split(instances, ratio, seed, options, &underfilled);
    for (const std::string& label : underfilled)
      std::cerr << "warning: label cannot appear in both splits: " << label << "\n";
  } else {
    assignment = president_disjoint_split(instances, ratio);
  }
  assignment.save(out);
  std::cout << "split " << regime << ": train " << assignment.train_ids.size() << ", val "
            << assignment.val_ids.size() << " -> " << out << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_root, bool force,
            RunMode expected_mode) {
  const RunConfig config = load_run_config(config_path);
  if (config.mode != expected_mode)
    throw ConfigError(std::string("config mode is \"") +
                      std::string(run_mode_name(config.mode)) + "\"; use the " +
                      std::string(run_mode_name(config.mode)) + " subcommand");
  const auto dir = run_experiment(config, out_root, force);
  std::cout << "run complete: " << dir.string() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& test_path,
                 const std::string& target, const std::string& out_dir) {
  const auto test = load_test(test_path);
  const LabelFamily family =
      target == "clarity" ? LabelFamily::Clarity : LabelFamily::Evasion;
  const PredictionSet preds = read_predictions(pred_path, family, pred_path);
  const MetricsReport report = evaluate_on_test(preds, test);
  const std::string tables = render_report_tables(report);
  std::cout << tables;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text_file(fs::path(out_dir) / "metrics.json", report_to_json(report));
    write_text_file(fs::path(out_dir) / "report.txt", tables);
  }
  return 0;
}

int cmd_ensemble(const std::vector<std::string>& pred_paths, const std::string& family_name_,
                 const std::string& tie_break, const std::string& train_path,
                 const std::string& out_dir) {
  const LabelFamily family =
      family_name_ == "clarity" ? LabelFamily::Clarity : LabelFamily::Evasion;
  std::vector<PredictionSet> members;
  EnsembleSpec spec;
  spec.family = family;
  spec.tie_break = parse_tie_break(tie_break);
  for (const std::string& p : pred_paths) {
    members.push_back(read_predictions(p, family, p));
    spec.member_run_ids.push_back(p);
  }

  std::optional<DatasetSummary> distribution;
  if (!train_path.empty())
    distribution = class_distribution(load_training(train_path), family);

  const EnsembleResult result =
      majority_vote_ensemble(members, spec, distribution ? &*distribution : nullptr);

  fs::create_directories(out_dir);
  write_predictions(result.predictions, PredictionFormat::Csv,
                    fs::path(out_dir) / "ensemble_predictions.csv");
  if (result.derived_clarity)
    write_predictions(*result.derived_clarity, PredictionFormat::Csv,
                      fs::path(out_dir) / "ensemble_derived_clarity.csv");

  nlohmann::json manifest;
  manifest["members"] = spec.member_run_ids;
  manifest["tie_break"] = tie_break_name(result.tie_break);
  manifest["tie_count"] = result.tie_count;
  manifest["family"] = clarity::family_name(family);
  write_text_file(fs::path(out_dir) / "ensemble_manifest.json", manifest.dump(2) + "\n");
  std::cout << "ensemble of " << members.size() << " members, " << result.tie_count
            << " tie(s) -> " << out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& metrics_path, const std::string& out_dir,
               const std::string& train_path, const std::string& family_name_) {
  std::ifstream in(metrics_path);
  if (!in) throw std::runtime_error("cannot open " + metrics_path);
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  const MetricsReport report = report_from_json(text);

  std::optional<DatasetSummary> distribution;
  if (!train_path.empty()) {
    const LabelFamily family =
        family_name_ == "evasion" ? LabelFamily::Evasion : LabelFamily::Clarity;
    distribution = class_distribution(load_training(train_path), family);
  }
  const ReportArtifacts art =
      emit_report_plots(report, out_dir, distribution ? &*distribution : nullptr);
  std::cout << "wrote " << art.svg_files.size() << " plot(s) and " << art.csv_files.size()
            << " csv file(s) to " << out_dir << "\n";
  return 0;
}

int cmd_submit_file(const std::string& pred_path, const std::string& family_name_,
                    const std::string& format, const std::string& out) {
  const LabelFamily family =
      family_name_ == "clarity" ? LabelFamily::Clarity : LabelFamily::Evasion;
  const PredictionSet preds = read_predictions(pred_path, family, pred_path);
  write_predictions(preds, parse_prediction_format(format), out);
  std::cout << "wrote " << preds.size() << " predictions to " << out << "\n";
  return 0;
}

int cmd_import(const std::string& source, const std::string& kind, const std::string& out,
               const std::string& mapping_path) {
  const ImportMapping mapping =
      mapping_path.empty() ? ImportMapping::defaults() : ImportMapping::load(mapping_path);
  const std::size_t n = kind == "train" ? import_training(source, mapping, out)
                                        : import_test(source, mapping, out);
  std::cout << "imported " << n << " " << kind << " records -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Political interview answer classification toolkit"};
  app.require_subcommand(1);

  // split
  std::string split_train, split_regime = "stratified", split_out = "split.json";
  double split_ratio = 0.8;
  std::uint64_t split_seed = 42;
  bool split_allow_small = false;
  auto* split = app.add_subcommand("split", "Create a train/validation split");
  split->add_option("--train", split_train, "training JSONL")->required();
  split->add_option("--regime", split_regime, "stratified|president_disjoint");
  split->add_option("--ratio", split_ratio, "train fraction (default 0.8)");
  split->add_option("--seed", split_seed, "shuffle seed (stratified only)");
  split->add_option("--out", split_out, "output split JSON");
  split->add_flag("--allow-small-strata", split_allow_small,
                  "warn instead of failing on labels too small for both sides");

  // train / zeroshot
  std::string run_config_path, run_out = "runs";
  bool run_force = false;
  auto* train = app.add_subcommand("train", "Run a fine-tuning experiment from a config");
  train->add_option("--config", run_config_path, "run config JSON")->required();
  train->add_option("--out", run_out, "runs root directory");
  train->add_flag("--force", run_force, "redo an existing run with the same config hash");

  std::string zs_config_path, zs_out = "runs";
  bool zs_force = false;
  auto* zeroshot = app.add_subcommand("zeroshot", "Run the zero-shot protocol from a config");
  zeroshot->add_option("--config", zs_config_path, "run config JSON")->required();
  zeroshot->add_option("--out", zs_out, "runs root directory");
  zeroshot->add_flag("--force", zs_force, "redo an existing run with the same config hash");

  // evaluate
  std::string eval_pred, eval_test, eval_target = "evasion", eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against the test split");
  evaluate->add_option("--pred", eval_pred, "prediction CSV/JSONL")->required();
  evaluate->add_option("--test", eval_test, "test JSONL")->required();
  evaluate->add_option("--target", eval_target, "evasion|clarity");
  evaluate->add_option("--out", eval_out, "directory for metrics.json/report.txt");

  // ensemble
  std::vector<std::string> ens_preds;
  std::string ens_family = "evasion", ens_tie = "frequency_prior", ens_train, ens_out = "ensemble";
  auto* ensemble = app.add_subcommand("ensemble", "Majority-vote over member predictions");
  ensemble->add_option("--pred", ens_preds, "member prediction files (repeat)")
      ->required()
      ->expected(-2);
  ensemble->add_option("--family", ens_family, "evasion|clarity");
  ensemble->add_option("--tie-break", ens_tie, "frequency_prior|fixed_label_order");
  ensemble->add_option("--train", ens_train, "training JSONL for the frequency prior");
  ensemble->add_option("--out", ens_out, "output directory");

  // report
  std::string rep_metrics, rep_out = "report", rep_train, rep_family = "clarity";
  auto* report = app.add_subcommand("report", "Render plots and CSVs from a metrics file");
  report->add_option("--metrics", rep_metrics, "metrics.json from evaluate/train")->required();
  report->add_option("--out", rep_out, "output directory");
  report->add_option("--train", rep_train, "training JSONL for distribution bars");
  report->add_option("--family", rep_family, "distribution family: clarity|evasion");

  // submit-file
  std::string sub_pred, sub_family = "evasion", sub_format = "csv", sub_out = "submission.csv";
  auto* submit = app.add_subcommand("submit-file", "Re-emit predictions as a submission file");
  submit->add_option("--pred", sub_pred, "prediction CSV/JSONL")->required();
  submit->add_option("--family", sub_family, "evasion|clarity");
  submit->add_option("--format", sub_format, "csv|jsonl");
  submit->add_option("--out", sub_out, "output file");

  // make-fixture
  std::string fix_shape = "official", fix_out = "data/fixtures";
  auto* fixture = app.add_subcommand("make-fixture", "Write a deterministic synthetic corpus");
  fixture->add_option("--shape", fix_shape, "official|small");
  fixture->add_option("--out", fix_out, "output directory");

  // import
  std::string imp_source, imp_kind = "train", imp_out, imp_mapping;
  auto* import_cmd = app.add_subcommand("import", "Convert an upstream dataset file");
  import_cmd->add_option("--source", imp_source, "CSV or JSONL source")->required();
  import_cmd->add_option("--kind", imp_kind, "train|test");
  import_cmd->add_option("--out", imp_out, "output JSONL")->required();
  import_cmd->add_option("--mapping", imp_mapping, "field mapping JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (split->parsed())
      return cmd_split(split_train, split_regime, split_ratio, split_seed, split_out,
                       split_allow_small);
    if (train->parsed()) return cmd_run(run_config_path, run_out, run_force, RunMode::Train);
    if (zeroshot->parsed())
      return cmd_run(zs_config_path, zs_out, zs_force, RunMode::ZeroShot);
    if (evaluate->parsed()) return cmd_evaluate(eval_pred, eval_test, eval_target, eval_out);
    if (ensemble->parsed())
      return cmd_ensemble(ens_preds, ens_family, ens_tie, ens_train, ens_out);
    if (report->parsed()) return cmd_report(rep_metrics, rep_out, rep_train, rep_family);
    if (submit->parsed()) return cmd_submit_file(sub_pred, sub_family, sub_format, sub_out);
    if (fixture->parsed()) {
      const CorpusPaths paths = write_corpus(fix_shape, fix_out);
      std::cout << "wrote " << paths.train.string() << " and " << paths.test.string() << "\n";
      return 0;
    }
    if (import_cmd->parsed()) return cmd_import(imp_source, imp_kind, imp_out, imp_mapping);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
