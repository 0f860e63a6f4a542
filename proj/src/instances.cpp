#include "clarity/instances.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "clarity/text.hpp"

namespace clarity {

using nlohmann::json;

ParseError::ParseError(std::size_t line, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}

DuplicateId::DuplicateId(const std::string& id)
    : std::runtime_error("duplicate instance id: " + id) {}

LabelInconsistency::LabelInconsistency(const std::vector<std::string>& ids)
    : std::runtime_error("clarity label disagrees with clarity_of(evasion) for " +
                         std::to_string(ids.size()) + " instance(s), first: " +
                         (ids.empty() ? std::string("?") : ids.front())),
      ids_(ids) {}

WrongAnnotatorCount::WrongAnnotatorCount(const std::string& id, std::size_t got)
    : std::runtime_error("instance " + id + ": expected 3 evasion annotations, got " +
                         std::to_string(got)) {}

EmptyDataset::EmptyDataset() : std::runtime_error("empty dataset") {}

namespace {

json parse_record(const std::string& line, std::size_t line_no) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, e.what());
  }
  if (!rec.is_object()) throw ParseError(line_no, "record is not a JSON object");
  return rec;
}

std::string require_text(const json& rec, const char* field, std::size_t line_no,
                         bool non_empty = true) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_string())
    throw ParseError(line_no, std::string("missing or non-string field \"") + field + "\"");
  std::string value = it->get<std::string>();
  if (non_empty && trim(value).empty())
    throw ParseError(line_no, std::string("field \"") + field + "\" is empty");
  return value;
}

template <typename T>
std::optional<T> optional_field(const json& rec, const char* field, std::size_t line_no) {
  auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(line_no, std::string("field \"") + field + "\": " + e.what());
  }
}

void check_unique(std::unordered_set<std::string>& seen, const std::string& id) {
  if (!seen.insert(id).second) throw DuplicateId(id);
}

}  // namespace

std::vector<TrainInstance> load_training(const std::filesystem::path& source,
                                         const LoadOptions& options,
                                         std::vector<std::string>* inconsistent_ids) {
  std::ifstream in(source);
  if (!in) throw std::runtime_error("cannot open " + source.string());

  std::vector<TrainInstance> out;
  std::vector<std::string> mismatched;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = parse_record(line, line_no);

    TrainInstance t;
    t.id = require_text(rec, "id", line_no);
    t.question = require_text(rec, "question", line_no);
    t.answer = require_text(rec, "answer", line_no);
    try {
      t.clarity = parse_clarity(require_text(rec, "clarity", line_no));
      t.evasion = parse_evasion(require_text(rec, "evasion", line_no));
    } catch (const UnknownLabel& e) {
      throw ParseError(line_no, e.what());
    }
    t.president = optional_field<std::string>(rec, "president", line_no);
    t.date = optional_field<std::string>(rec, "date", line_no);
    t.multiple_questions = optional_field<bool>(rec, "multiple_questions", line_no);
    t.affirmative_question = optional_field<bool>(rec, "affirmative_question", line_no);

    check_unique(seen, t.id);
    if (clarity_of(t.evasion) != t.clarity) mismatched.push_back(t.id);
    out.push_back(std::move(t));
  }

  if (!mismatched.empty()) {
    if (!options.keep_taxonomy_mismatches) throw LabelInconsistency(mismatched);
    if (inconsistent_ids) *inconsistent_ids = mismatched;
  } else if (inconsistent_ids) {
    inconsistent_ids->clear();
  }
  return out;
}

std::vector<TestInstance> load_test(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw std::runtime_error("cannot open " + source.string());

  std::vector<TestInstance> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = parse_record(line, line_no);

    TestInstance t;
    t.id = require_text(rec, "id", line_no);
    t.question = require_text(rec, "question", line_no);
    t.answer = require_text(rec, "answer", line_no);
    try {
      t.clarity = parse_clarity(require_text(rec, "clarity", line_no));
    } catch (const UnknownLabel& e) {
      throw ParseError(line_no, e.what());
    }

    auto it = rec.find("evasion_annotations");
    if (it == rec.end() || !it->is_array())
      throw ParseError(line_no, "missing \"evasion_annotations\" array");
    if (it->size() != 3) throw WrongAnnotatorCount(t.id, it->size());
    for (std::size_t k = 0; k < 3; ++k) {
      const json& a = (*it)[k];
      if (!a.is_string()) throw ParseError(line_no, "annotation is not a string");
      try {
        t.evasion_annotations[k] = parse_evasion(a.get<std::string>());
      } catch (const UnknownLabel& e) {
        throw ParseError(line_no, e.what());
      }
    }

    check_unique(seen, t.id);
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

json to_json(const TrainInstance& t) {
  json rec;
  rec["id"] = t.id;
  rec["question"] = t.question;
  rec["answer"] = t.answer;
  rec["clarity"] = display_string(t.clarity);
  rec["evasion"] = display_string(t.evasion);
  if (t.president) rec["president"] = *t.president;
  if (t.date) rec["date"] = *t.date;
  if (t.multiple_questions) rec["multiple_questions"] = *t.multiple_questions;
  if (t.affirmative_question) rec["affirmative_question"] = *t.affirmative_question;
  return rec;
}

json to_json(const TestInstance& t) {
  json rec;
  rec["id"] = t.id;
  rec["question"] = t.question;
  rec["answer"] = t.answer;
  rec["clarity"] = display_string(t.clarity);
  json anns = json::array();
  for (EvasionLabel e : t.evasion_annotations) anns.push_back(display_string(e));
  rec["evasion_annotations"] = std::move(anns);
  return rec;
}

template <typename T>
void write_jsonl(const std::vector<T>& instances, const std::filesystem::path& dest) {
  std::ofstream out(dest);
  if (!out) throw std::runtime_error("cannot write " + dest.string());
  for (const T& t : instances) out << to_json(t).dump() << '\n';
}

}  // namespace

void write_training(const std::vector<TrainInstance>& instances,
                    const std::filesystem::path& dest) {
  write_jsonl(instances, dest);
}

void write_test(const std::vector<TestInstance>& instances, const std::filesystem::path& dest) {
  write_jsonl(instances, dest);
}

std::size_t DatasetSummary::count_of(std::string_view label) const {
  return counts[parse_label_index(label, family)];
}

double DatasetSummary::fraction_of(std::string_view label) const {
  return fractions[parse_label_index(label, family)];
}

namespace {

DatasetSummary finalize_summary(LabelFamily family, std::vector<std::size_t> counts,
                                std::map<std::string, std::size_t> presidents,
                                std::size_t total) {
  DatasetSummary s;
  s.family = family;
  s.total = total;
  s.counts = std::move(counts);
  s.president_counts = std::move(presidents);
  s.fractions.resize(s.counts.size());
  for (std::size_t i = 0; i < s.counts.size(); ++i)
    s.fractions[i] = static_cast<double>(s.counts[i]) / static_cast<double>(total);
  return s;
}

}  // namespace

DatasetSummary class_distribution(const std::vector<TrainInstance>& instances,
                                  LabelFamily family) {
  if (instances.empty()) throw EmptyDataset();
  std::vector<std::size_t> counts(family_size(family), 0);
  std::map<std::string, std::size_t> presidents;
  for (const TrainInstance& t : instances) {
    std::size_t idx = family == LabelFamily::Clarity ? index_of(t.clarity) : index_of(t.evasion);
    ++counts[idx];
    if (t.president) ++presidents[*t.president];
  }
  return finalize_summary(family, std::move(counts), std::move(presidents), instances.size());
}

DatasetSummary class_distribution(const std::vector<TestInstance>& instances,
                                  LabelFamily family) {
  if (instances.empty()) throw EmptyDataset();
  if (family != LabelFamily::Clarity)
    throw std::invalid_argument(
        "evasion distribution is undefined for multi-annotator test instances");
  std::vector<std::size_t> counts(kClarityCount, 0);
  for (const TestInstance& t : instances) ++counts[index_of(t.clarity)];
  return finalize_summary(family, std::move(counts), {}, instances.size());
}

std::optional<EvasionLabel> majority_evasion(const TestInstance& t) {
  const auto& a = t.evasion_annotations;
  if (a[0] == a[1] || a[0] == a[2]) return a[0];
  if (a[1] == a[2]) return a[1];
  return std::nullopt;
}

}  // namespace clarity
