#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "clarity/reporting.hpp"
#include "clarity/synth_corpus.hpp"

using namespace clarity;
namespace fs = std::filesystem;

namespace {

MetricsReport sample_report() {
  const auto test = small_test();
  PredictionSet preds("sample", LabelFamily::Evasion);
  for (const TestInstance& t : test) preds.add(t.id, t.evasion_annotations[1]);
  return evaluate_on_test(preds, test);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("metrics reports round trip through JSON") {
  const MetricsReport report = sample_report();
  const std::string text = report_to_json(report);
  const MetricsReport back = report_from_json(text);

  REQUIRE(back.clarity.has_value());
  CHECK(back.clarity->f1 == doctest::Approx(report.clarity->f1).epsilon(1e-15));
  REQUIRE(back.evasion.has_value());
  CHECK(back.evasion->acc_match == doctest::Approx(report.evasion->acc_match).epsilon(1e-15));
  CHECK(back.clarity_per_label.size() == report.clarity_per_label.size());
  REQUIRE(back.evasion_confusion_row_norm.has_value());
  CHECK(back.evasion_confusion_row_norm->values ==
        report.evasion_confusion_row_norm->values);

  // Serialization is byte-deterministic.
  CHECK(report_to_json(back) == text);
}

TEST_CASE("confusion CSVs round trip exactly") {
  const MetricsReport report = sample_report();
  const auto path = fs::temp_directory_path() / "confusion_rt.csv";
  write_confusion_csv(*report.evasion_confusion_row_norm, path);
  const ConfusionMatrix back = read_confusion_csv(path);
  CHECK(back.labels == report.evasion_confusion_row_norm->labels);
  REQUIRE(back.values.size() == report.evasion_confusion_row_norm->values.size());
  for (std::size_t g = 0; g < back.values.size(); ++g)
    for (std::size_t p = 0; p < back.values[g].size(); ++p)
      CHECK(back.values[g][p] ==
            doctest::Approx(report.evasion_confusion_row_norm->values[g][p]).epsilon(1e-15));
}

TEST_CASE("emit_report_plots writes two heatmaps, a distribution, and CSV siblings") {
  const MetricsReport report = sample_report();
  const auto dir = fs::temp_directory_path() / "plots_test";
  fs::remove_all(dir);
  const auto dist = class_distribution(small_training(), LabelFamily::Clarity);
  const ReportArtifacts art = emit_report_plots(report, dir, &dist);

  CHECK(fs::exists(dir / "confusion_clarity_row_normalized.svg"));
  CHECK(fs::exists(dir / "confusion_evasion_row_normalized.svg"));
  CHECK(fs::exists(dir / "class_distribution.svg"));
  CHECK(art.svg_files.size() == 3);

  // Every plot has a CSV sibling with the same stem.
  for (const fs::path& svg : art.svg_files) {
    fs::path csv = svg;
    csv.replace_extension(".csv");
    CHECK(fs::exists(csv));
  }

  // The CSV sibling equals the report's matrix.
  const ConfusionMatrix back =
      read_confusion_csv(dir / "confusion_evasion_row_normalized.csv");
  for (std::size_t g = 0; g < back.values.size(); ++g)
    for (std::size_t p = 0; p < back.values[g].size(); ++p)
      CHECK(back.values[g][p] ==
            doctest::Approx(report.evasion_confusion_row_norm->values[g][p]).epsilon(1e-15));

  // Every plotted normalised row with support sums to 1.
  for (std::size_t g = 0; g < back.values.size(); ++g) {
    double sum = 0.0;
    for (double v : back.values[g]) sum += v;
    if (!back.zero_support_rows[g]) CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("SVG output is minimally well-formed") {
  const MetricsReport report = sample_report();
  const auto dir = fs::temp_directory_path() / "svg_check";
  fs::remove_all(dir);
  emit_report_plots(report, dir, nullptr);
  const std::string svg = slurp(dir / "confusion_clarity_row_normalized.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("Clear Non-Reply") != std::string::npos);
}

TEST_CASE("distribution bars reflect the dominant class") {
  const auto dist = class_distribution(official_shaped_training(), LabelFamily::Clarity);
  const auto dir = fs::temp_directory_path() / "dist_check";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_distribution_csv(dist, dir / "d.csv");
  const std::string csv = slurp(dir / "d.csv");
  CHECK(csv.find("Ambivalent,2041") != std::string::npos);

  double max_fraction = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < dist.fractions.size(); ++i)
    if (dist.fractions[i] > max_fraction) {
      max_fraction = dist.fractions[i];
      argmax = i;
    }
  CHECK(family_vocabulary(LabelFamily::Clarity)[argmax] == "Ambivalent");
}

TEST_CASE("console tables include the headline numbers") {
  const MetricsReport report = sample_report();
  const std::string tables = render_report_tables(report);
  CHECK(tables.find("clarity") != std::string::npos);
  CHECK(tables.find("ACC_match") != std::string::npos);
  CHECK(tables.find("per-label evasion vs annotator A3") != std::string::npos);
}
