#include "clarity/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "clarity/text.hpp"

namespace clarity {

using nlohmann::json;

namespace {

json confusion_to_json(const ConfusionMatrix& m) {
  json j;
  j["labels"] = m.labels;
  j["values"] = m.values;
  j["row_normalized"] = m.row_normalized;
  j["zero_support_rows"] = m.zero_support_rows;
  return j;
}

ConfusionMatrix confusion_from_json(const json& j) {
  ConfusionMatrix m;
  m.labels = j.at("labels").get<std::vector<std::string>>();
  m.values = j.at("values").get<std::vector<std::vector<double>>>();
  m.row_normalized = j.at("row_normalized").get<bool>();
  m.zero_support_rows = j.at("zero_support_rows").get<std::vector<bool>>();
  return m;
}

json per_label_to_json(const std::vector<PerLabelRow>& rows) {
  json arr = json::array();
  for (const PerLabelRow& r : rows) {
    json row;
    row["label"] = r.label;
    row["support"] = r.support;
    row["precision"] = r.precision;
    row["recall"] = r.recall;
    row["f1"] = r.f1;
    arr.push_back(std::move(row));
  }
  return arr;
}

std::vector<PerLabelRow> per_label_from_json(const json& arr) {
  std::vector<PerLabelRow> rows;
  for (const json& row : arr) {
    PerLabelRow r;
    r.label = row.at("label").get<std::string>();
    r.support = row.at("support").get<std::size_t>();
    r.precision = row.at("precision").get<double>();
    r.recall = row.at("recall").get<double>();
    r.f1 = row.at("f1").get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string report_to_json(const MetricsReport& report,
                           const std::map<std::string, AggregateStat>& aggregate) {
  json j;
  j["run_id"] = report.run_id;
  j["target"] = family_name(report.target);
  if (report.clarity) {
    j["clarity"] = {{"f1", report.clarity->f1},
                    {"precision", report.clarity->precision},
                    {"recall", report.clarity->recall}};
  }
  if (report.evasion) {
    j["evasion"] = {{"f1_a1", report.evasion->f1_per_annotator[0]},
                    {"f1_a2", report.evasion->f1_per_annotator[1]},
                    {"f1_a3", report.evasion->f1_per_annotator[2]},
                    {"f1_avg", report.evasion->f1_avg},
                    {"acc_match", report.evasion->acc_match}};
  }
  if (!report.clarity_per_label.empty())
    j["per_label"]["clarity"] = per_label_to_json(report.clarity_per_label);
  for (std::size_t k = 0; k < 3; ++k)
    if (!report.evasion_per_label[k].empty())
      j["per_label"]["evasion_a" + std::to_string(k + 1)] =
          per_label_to_json(report.evasion_per_label[k]);
  if (report.clarity_confusion_raw)
    j["confusion"]["clarity_raw"] = confusion_to_json(*report.clarity_confusion_raw);
  if (report.clarity_confusion_row_norm)
    j["confusion"]["clarity_row_normalized"] =
        confusion_to_json(*report.clarity_confusion_row_norm);
  if (report.evasion_confusion_raw)
    j["confusion"]["evasion_raw"] = confusion_to_json(*report.evasion_confusion_raw);
  if (report.evasion_confusion_row_norm)
    j["confusion"]["evasion_row_normalized"] =
        confusion_to_json(*report.evasion_confusion_row_norm);
  if (!aggregate.empty()) {
    json agg;
    for (const auto& [name, stat] : aggregate)
      agg[name] = {{"mean", stat.mean}, {"std", stat.stddev}};
    j["aggregate"] = std::move(agg);
  }
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  json j = json::parse(text);
  MetricsReport r;
  r.run_id = j.value("run_id", "");
  r.target = j.at("target").get<std::string>() == "clarity" ? LabelFamily::Clarity
                                                            : LabelFamily::Evasion;
  if (j.contains("clarity")) {
    MacroPrf m;
    m.f1 = j["clarity"].at("f1").get<double>();
    m.precision = j["clarity"].at("precision").get<double>();
    m.recall = j["clarity"].at("recall").get<double>();
    r.clarity = m;
  }
  if (j.contains("evasion")) {
    EvasionEval e;
    e.f1_per_annotator[0] = j["evasion"].at("f1_a1").get<double>();
    e.f1_per_annotator[1] = j["evasion"].at("f1_a2").get<double>();
    e.f1_per_annotator[2] = j["evasion"].at("f1_a3").get<double>();
    e.f1_avg = j["evasion"].at("f1_avg").get<double>();
    e.acc_match = j["evasion"].at("acc_match").get<double>();
    r.evasion = e;
  }
  if (j.contains("per_label")) {
    const json& pl = j["per_label"];
    if (pl.contains("clarity")) r.clarity_per_label = per_label_from_json(pl["clarity"]);
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string key = "evasion_a" + std::to_string(k + 1);
      if (pl.contains(key)) r.evasion_per_label[k] = per_label_from_json(pl[key]);
    }
  }
  if (j.contains("confusion")) {
    const json& c = j["confusion"];
    if (c.contains("clarity_raw"))
      r.clarity_confusion_raw = confusion_from_json(c["clarity_raw"]);
    if (c.contains("clarity_row_normalized"))
      r.clarity_confusion_row_norm = confusion_from_json(c["clarity_row_normalized"]);
    if (c.contains("evasion_raw"))
      r.evasion_confusion_raw = confusion_from_json(c["evasion_raw"]);
    if (c.contains("evasion_row_normalized"))
      r.evasion_confusion_row_norm = confusion_from_json(c["evasion_row_normalized"]);
  }
  return r;
}

namespace {

std::string fixed3(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

void render_per_label(std::ostringstream& os, const std::string& title,
                      const std::vector<PerLabelRow>& rows) {
  std::size_t width = 5;
  for (const PerLabelRow& r : rows) width = std::max(width, r.label.size());
  os << title << "\n";
  os << std::left << std::setw(static_cast<int>(width) + 2) << "label"
     << std::right << std::setw(9) << "support" << std::setw(8) << "P" << std::setw(8)
     << "R" << std::setw(8) << "F1" << "\n";
  for (const PerLabelRow& r : rows) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << r.label << std::right
       << std::setw(9) << r.support << std::setw(8) << fixed3(r.precision) << std::setw(8)
       << fixed3(r.recall) << std::setw(8) << fixed3(r.f1) << "\n";
  }
}

}  // namespace

std::string render_report_tables(const MetricsReport& report) {
  std::ostringstream os;
  os << "run: " << report.run_id << "  target: " << family_name(report.target) << "\n";
  if (report.clarity) {
    os << "clarity  F1 " << fixed3(report.clarity->f1) << "  P "
       << fixed3(report.clarity->precision) << "  R " << fixed3(report.clarity->recall)
       << "\n";
  }
  if (report.evasion) {
    os << "evasion  ACC_match " << fixed3(report.evasion->acc_match) << "  F1_A1 "
       << fixed3(report.evasion->f1_per_annotator[0]) << "  F1_A2 "
       << fixed3(report.evasion->f1_per_annotator[1]) << "  F1_A3 "
       << fixed3(report.evasion->f1_per_annotator[2]) << "  F1_avg "
       << fixed3(report.evasion->f1_avg) << "\n";
  }
  if (!report.clarity_per_label.empty()) {
    os << "\n";
    render_per_label(os, "per-label clarity", report.clarity_per_label);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (report.evasion_per_label[k].empty()) continue;
    os << "\n";
    render_per_label(os, "per-label evasion vs annotator A" + std::to_string(k + 1),
                     report.evasion_per_label[k]);
  }
  return os.str();
}

void write_confusion_csv(const ConfusionMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "gold\\pred";
  for (const std::string& l : matrix.labels) out << ',' << l;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t g = 0; g < matrix.labels.size(); ++g) {
    out << matrix.labels[g];
    for (double v : matrix.values[g]) out << ',' << v;
    out << '\n';
  }
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ConfusionMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty confusion CSV");
  std::stringstream header(line);
  std::string cell;
  std::getline(header, cell, ',');  // corner
  while (std::getline(header, cell, ',')) m.labels.push_back(cell);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream row(line);
    std::getline(row, cell, ',');
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != m.labels.size())
      throw std::runtime_error("ragged confusion CSV row");
    m.values.push_back(std::move(values));
  }
  m.zero_support_rows.assign(m.labels.size(), false);
  for (std::size_t g = 0; g < m.values.size(); ++g) {
    double sum = 0.0;
    for (double v : m.values[g]) sum += v;
    m.zero_support_rows[g] = sum == 0.0;
  }
  return m;
}

void write_per_label_csv(const std::vector<PerLabelRow>& rows,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "label,support,precision,recall,f1\n";
  out << std::setprecision(17);
  for (const PerLabelRow& r : rows)
    out << r.label << ',' << r.support << ',' << r.precision << ',' << r.recall << ','
        << r.f1 << '\n';
}

void write_distribution_csv(const DatasetSummary& summary,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "label,count,fraction\n";
  out << std::setprecision(17);
  const auto& vocab = family_vocabulary(summary.family);
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out << vocab[i] << ',' << summary.counts[i] << ',' << summary.fractions[i] << '\n';
}

namespace {

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// White -> blue ramp.
std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255.0 - 200.0 * v));
  const int g = static_cast<int>(std::lround(255.0 - 160.0 * v));
  const int b = 255;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_confusion_heatmap_svg(const ConfusionMatrix& matrix, const std::string& title,
                                 const std::filesystem::path& path) {
  const std::size_t n = matrix.labels.size();
  const int cell = 56, left = 170, top = 60, bottom = 120;
  const int width = left + cell * static_cast<int>(n) + 20;
  const int height = top + cell * static_cast<int>(n) + bottom;

  double max_v = 1.0;
  if (!matrix.row_normalized) {
    max_v = 0.0;
    for (const auto& row : matrix.values)
      for (double v : row) max_v = std::max(max_v, v);
    if (max_v == 0.0) max_v = 1.0;
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << svg_escape(title) << "</text>\n";
  for (std::size_t g = 0; g < n; ++g) {
    out << "<text x=\"" << left - 8 << "\" y=\"" << top + cell * (int)g + cell / 2 + 4
        << "\" text-anchor=\"end\">" << svg_escape(matrix.labels[g]) << "</text>\n";
    for (std::size_t p = 0; p < n; ++p) {
      const double v = matrix.values[g][p];
      out << "<rect x=\"" << left + cell * (int)p << "\" y=\"" << top + cell * (int)g
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << heat_color(v / max_v) << "\" stroke=\"#ffffff\"/>\n";
      char label[32];
      std::snprintf(label, sizeof label, matrix.row_normalized ? "%.2f" : "%.1f", v);
      out << "<text x=\"" << left + cell * (int)p + cell / 2 << "\" y=\""
          << top + cell * (int)g + cell / 2 + 4 << "\" text-anchor=\"middle\">" << label
          << "</text>\n";
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    const int x = left + cell * (int)p + cell / 2;
    const int y = top + cell * (int)n + 12;
    out << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"start\" transform=\"rotate(45 "
        << x << ' ' << y << ")\">" << svg_escape(matrix.labels[p]) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_distribution_bars_svg(const DatasetSummary& summary, const std::string& title,
                                 const std::filesystem::path& path) {
  const auto& vocab = family_vocabulary(summary.family);
  const std::size_t n = vocab.size();
  const int bar = 44, gap = 18, left = 60, top = 60, bottom = 130;
  const int plot_h = 220;
  const int width = left + static_cast<int>(n) * (bar + gap) + 30;
  const int height = top + plot_h + bottom;

  double max_f = 0.0;
  for (double f : summary.fractions) max_f = std::max(max_f, f);
  if (max_f == 0.0) max_f = 1.0;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << svg_escape(title) << "</text>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int h = static_cast<int>(std::lround(plot_h * summary.fractions[i] / max_f));
    const int x = left + static_cast<int>(i) * (bar + gap);
    const int y = top + plot_h - h;
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar << "\" height=\"" << h
        << "\" fill=\"#4c72b0\"/>\n";
    char pct[16];
    std::snprintf(pct, sizeof pct, "%.1f%%", 100.0 * summary.fractions[i]);
    out << "<text x=\"" << x + bar / 2 << "\" y=\"" << y - 6 << "\" text-anchor=\"middle\">"
        << pct << "</text>\n";
    const int lx = x + bar / 2, ly = top + plot_h + 14;
    out << "<text x=\"" << lx << "\" y=\"" << ly << "\" text-anchor=\"start\" transform=\"rotate(45 "
        << lx << ' ' << ly << ")\">" << svg_escape(vocab[i]) << "</text>\n";
  }
  out << "</svg>\n";
}

ReportArtifacts emit_report_plots(const MetricsReport& report,
                                  const std::filesystem::path& out_dir,
                                  const DatasetSummary* distribution) {
  std::filesystem::create_directories(out_dir);
  ReportArtifacts art;

  auto emit_confusion = [&](const ConfusionMatrix& m, const std::string& stem,
                            const std::string& title) {
    const auto csv = out_dir / (stem + ".csv");
    const auto svg = out_dir / (stem + ".svg");
    write_confusion_csv(m, csv);
    write_confusion_heatmap_svg(m, title, svg);
    art.csv_files.push_back(csv);
    art.svg_files.push_back(svg);
  };

  if (report.clarity_confusion_row_norm)
    emit_confusion(*report.clarity_confusion_row_norm, "confusion_clarity_row_normalized",
                   "Clarity confusion (row-normalised)");
  if (report.evasion_confusion_row_norm)
    emit_confusion(*report.evasion_confusion_row_norm, "confusion_evasion_row_normalized",
                   "Evasion confusion (row-normalised)");
  if (distribution) {
    const auto csv = out_dir / "class_distribution.csv";
    const auto svg = out_dir / "class_distribution.svg";
    write_distribution_csv(*distribution, csv);
    write_distribution_bars_svg(*distribution,
                                std::string(family_name(distribution->family)) +
                                    " class distribution",
                                svg);
    art.csv_files.push_back(csv);
    art.svg_files.push_back(svg);
  }
  if (!report.clarity_per_label.empty()) {
    const auto csv = out_dir / "per_label_clarity.csv";
    write_per_label_csv(report.clarity_per_label, csv);
    art.csv_files.push_back(csv);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (report.evasion_per_label[k].empty()) continue;
    const auto csv = out_dir / ("per_label_evasion_a" + std::to_string(k + 1) + ".csv");
    write_per_label_csv(report.evasion_per_label[k], csv);
    art.csv_files.push_back(csv);
  }
  return art;
}

}  // namespace clarity
