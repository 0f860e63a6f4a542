#include "clarity/predictions.hpp"

#include <fstream>

#include <json.hpp>

#include "clarity/text.hpp"

namespace clarity {

using nlohmann::json;

PredictionSet::PredictionSet(std::string run_id, LabelFamily family,
                             std::optional<std::uint64_t> seed)
    : run_id_(std::move(run_id)), family_(family), seed_(seed) {}

void PredictionSet::add(std::string id, std::size_t label_index) {
  if (label_index >= family_size(family_))
    throw std::out_of_range("label index outside the " + std::string(family_name(family_)) +
                            " vocabulary");
  if (!index_.emplace(id, ids_.size()).second)
    throw std::invalid_argument("duplicate prediction id: " + id);
  ids_.push_back(std::move(id));
  labels_.push_back(static_cast<std::uint8_t>(label_index));
}

void PredictionSet::add(std::string id, ClarityLabel label) {
  if (family_ != LabelFamily::Clarity)
    throw std::invalid_argument("clarity label added to an evasion prediction set");
  add(std::move(id), index_of(label));
}

void PredictionSet::add(std::string id, EvasionLabel label) {
  if (family_ != LabelFamily::Evasion)
    throw std::invalid_argument("evasion label added to a clarity prediction set");
  add(std::move(id), index_of(label));
}

void PredictionSet::add_scores(std::vector<double> scores) {
  scores_.resize(ids_.size());
  if (ids_.empty()) throw std::logic_error("no prediction to attach scores to");
  scores_.back() = std::move(scores);
}

std::string_view PredictionSet::display_at(std::size_t pos) const {
  return family_vocabulary(family_)[labels_[pos]];
}

std::size_t PredictionSet::label_index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("no prediction for id " + id);
  return labels_[it->second];
}

std::string_view PredictionSet::display_of(const std::string& id) const {
  return family_vocabulary(family_)[label_index_of(id)];
}

bool PredictionSet::same_predictions(const PredictionSet& other) const {
  return family_ == other.family_ && ids_ == other.ids_ && labels_ == other.labels_;
}

PredictionSet PredictionSet::derive_clarity() const {
  if (family_ != LabelFamily::Evasion)
    throw std::logic_error("derive_clarity requires evasion predictions");
  PredictionSet out(run_id_ + "+derived-clarity", LabelFamily::Clarity, seed_);
  for (std::size_t i = 0; i < ids_.size(); ++i)
    out.add(ids_[i], clarity_of(static_cast<EvasionLabel>(labels_[i])));
  return out;
}

PredictionFormat parse_prediction_format(std::string_view s) {
  if (s == "csv") return PredictionFormat::Csv;
  if (s == "jsonl") return PredictionFormat::Jsonl;
  throw std::invalid_argument("unknown prediction format: " + std::string(s));
}

void write_predictions(const PredictionSet& preds, PredictionFormat format,
                       const std::filesystem::path& path) {
  if (preds.empty()) throw std::invalid_argument("refusing to write an empty prediction set");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (format == PredictionFormat::Csv) {
    out << "id,label\n";
    for (std::size_t i = 0; i < preds.size(); ++i) {
      // Labels may carry punctuation ("Partial/half-answer") but no commas or
      // quotes; ids must stay comma-free for the plain CSV schema.
      if (preds.ids()[i].find(',') != std::string::npos)
        throw std::invalid_argument("id contains a comma: " + preds.ids()[i]);
      out << preds.ids()[i] << ',' << preds.display_at(i) << '\n';
    }
  } else {
    for (std::size_t i = 0; i < preds.size(); ++i) {
      json rec;
      rec["id"] = preds.ids()[i];
      rec["label"] = preds.display_at(i);
      out << rec.dump() << '\n';
    }
  }
}

PredictionSet read_predictions(const std::filesystem::path& path, LabelFamily family,
                               std::string run_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  PredictionSet out(std::move(run_id), family);
  std::string line;
  std::size_t line_no = 0;
  bool csv_mode = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t == "id,label") {
      csv_mode = true;
      continue;
    }
    if (csv_mode) {
      auto comma = t.find(',');
      if (comma == std::string_view::npos)
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": expected \"id,label\"");
      out.add(std::string(trim(t.substr(0, comma))),
              parse_label_index(t.substr(comma + 1), family));
    } else {
      json rec = json::parse(t);
      out.add(rec.at("id").get<std::string>(),
              parse_label_index(rec.at("label").get<std::string>(), family));
    }
  }
  return out;
}

}  // namespace clarity
