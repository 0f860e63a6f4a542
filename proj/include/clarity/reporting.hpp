#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "clarity/instances.hpp"
#include "clarity/metrics.hpp"

namespace clarity {

// Stable machine-readable schema; from_json round-trips everything to_json emits.
std::string report_to_json(const MetricsReport& report,
                           const std::map<std::string, AggregateStat>& aggregate = {});
MetricsReport report_from_json(const std::string& text);

// Aligned console tables mirroring the usual result layout.
std::string render_report_tables(const MetricsReport& report);

void write_confusion_csv(const ConfusionMatrix& matrix, const std::filesystem::path& path);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);

void write_per_label_csv(const std::vector<PerLabelRow>& rows,
                         const std::filesystem::path& path);

void write_distribution_csv(const DatasetSummary& summary, const std::filesystem::path& path);

// SVG renderers fed from the CSV-layer data, so the plotting side is
// swappable and CI can assert on the CSVs alone.
void write_confusion_heatmap_svg(const ConfusionMatrix& matrix, const std::string& title,
                                 const std::filesystem::path& path);
void write_distribution_bars_svg(const DatasetSummary& summary, const std::string& title,
                                 const std::filesystem::path& path);

struct ReportArtifacts {
  std::vector<std::filesystem::path> csv_files;
  std::vector<std::filesystem::path> svg_files;
};

// Row-normalised heatmaps for whatever confusions the report carries, plus
// optional class-distribution bars, with CSV siblings for every plot.
ReportArtifacts emit_report_plots(const MetricsReport& report,
                                  const std::filesystem::path& out_dir,
                                  const DatasetSummary* distribution = nullptr);

}  // namespace clarity
