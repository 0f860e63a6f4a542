#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "clarity/labels.hpp"

namespace clarity {

// Per-instance predicted labels in input order, tagged with run provenance.
class PredictionSet {
 public:
  PredictionSet() = default;
  PredictionSet(std::string run_id, LabelFamily family,
                std::optional<std::uint64_t> seed = std::nullopt);

  void add(std::string id, std::size_t label_index);
  void add(std::string id, ClarityLabel label);
  void add(std::string id, EvasionLabel label);
  void add_scores(std::vector<double> scores);  // for the most recent id

  const std::string& run_id() const { return run_id_; }
  LabelFamily family() const { return family_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t label_index_at(std::size_t pos) const { return labels_[pos]; }
  std::string_view display_at(std::size_t pos) const;
  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  std::size_t label_index_of(const std::string& id) const;
  std::string_view display_of(const std::string& id) const;
  const std::vector<std::vector<double>>& scores() const { return scores_; }

  // Same ids, labels, and family; provenance is not part of equality.
  bool same_predictions(const PredictionSet& other) const;

  // Evasion predictions mapped through the taxonomy.
  PredictionSet derive_clarity() const;

 private:
  std::string run_id_;
  LabelFamily family_ = LabelFamily::Clarity;
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> ids_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::vector<double>> scores_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class PredictionFormat : std::uint8_t { Csv = 0, Jsonl };

PredictionFormat parse_prediction_format(std::string_view s);

// CSV: header "id,label" then one row per instance in input order.
// JSONL: {"id": ..., "label": ...} per line. Labels use canonical display
// strings; output is byte-deterministic for a fixed set.
void write_predictions(const PredictionSet& preds, PredictionFormat format,
                       const std::filesystem::path& path);

PredictionSet read_predictions(const std::filesystem::path& path, LabelFamily family,
                               std::string run_id = "");

}  // namespace clarity
