#include "clarity/import_adapter.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "clarity/text.hpp"

namespace clarity {

using nlohmann::json;

ImportMapping ImportMapping::defaults() {
  ImportMapping m;
  m.candidates = {
      {"id", {"id", "example_id", "instance_id", "idx"}},
      {"question", {"question", "interviewer_question", "query"}},
      {"answer", {"answer", "response", "reply", "interviewee_answer"}},
      {"clarity", {"clarity", "clarity_label", "label_clarity", "task1_label"}},
      {"evasion", {"evasion", "evasion_label", "label_evasion", "task2_label"}},
      {"president", {"president", "speaker"}},
      {"date", {"date", "interview_date"}},
      {"multiple_questions", {"multiple_questions", "multiple_q", "is_multiple_question"}},
      {"affirmative_question", {"affirmative_question", "affirmative_q", "is_affirmative"}},
      {"evasion_annotations",
       {"evasion_annotations", "annotations", "evasion_labels", "annotator_labels"}},
      {"evasion_a1", {"evasion_a1", "annotator_1", "a1"}},
      {"evasion_a2", {"evasion_a2", "annotator_2", "a2"}},
      {"evasion_a3", {"evasion_a3", "annotator_3", "a3"}},
  };
  return m;
}

ImportMapping ImportMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mapping " + path.string());
  json j = json::parse(in);
  ImportMapping m;
  for (const auto& [field, value] : j.at("fields").items()) {
    if (value.is_string())
      m.candidates[field] = {value.get<std::string>()};
    else
      m.candidates[field] = value.get<std::vector<std::string>>();
  }
  return m;
}

namespace {

// RFC-4180: quoted fields may contain commas, escaped quotes, and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  std::optional<std::vector<std::string>> next_row() {
    if (in_.peek() == EOF) return std::nullopt;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    int c;
    while ((c = in_.get()) != EOF) {
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field += '"';
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          field += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        row.push_back(std::move(field));
        field.clear();
      } else if (ch == '\n') {
        break;
      } else if (ch != '\r') {
        field += ch;
      }
    }
    row.push_back(std::move(field));
    if (row.size() == 1 && row[0].empty() && in_.peek() == EOF) return std::nullopt;
    return row;
  }

 private:
  std::istream& in_;
};

// Source records normalized to JSON objects, whatever the container format.
std::vector<json> read_records(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw std::runtime_error("cannot open " + source.string());
  std::vector<json> records;
  const std::string ext = source.extension().string();
  if (ext == ".csv") {
    CsvReader reader(in);
    auto header = reader.next_row();
    if (!header) throw std::runtime_error(source.string() + " is empty");
    while (auto row = reader.next_row()) {
      json rec;
      for (std::size_t i = 0; i < header->size() && i < row->size(); ++i)
        rec[(*header)[i]] = (*row)[i];
      records.push_back(std::move(rec));
    }
  } else {
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      records.push_back(json::parse(line));
    }
  }
  return records;
}

std::optional<json> pick(const json& rec, const ImportMapping& mapping,
                         const std::string& field) {
  auto it = mapping.candidates.find(field);
  if (it == mapping.candidates.end()) return std::nullopt;
  for (const std::string& name : it->second) {
    if (rec.contains(name) && !rec[name].is_null()) return rec[name];
  }
  return std::nullopt;
}

std::string as_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::optional<bool> as_bool(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0.0;
  const std::string s = to_lower(trim(as_text(v)));
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  if (s.empty()) return std::nullopt;
  throw std::runtime_error("cannot interpret \"" + s + "\" as a boolean");
}

std::string required_text(const json& rec, const ImportMapping& mapping,
                          const std::string& field, std::size_t record_no) {
  auto v = pick(rec, mapping, field);
  if (!v)
    throw std::runtime_error("record " + std::to_string(record_no) + ": no column for \"" +
                             field + "\"");
  return as_text(*v);
}

}  // namespace

std::size_t import_training(const std::filesystem::path& source, const ImportMapping& mapping,
                            const std::filesystem::path& dest) {
  const auto records = read_records(source);
  std::vector<TrainInstance> out;
  std::size_t n = 0;
  for (const json& rec : records) {
    ++n;
    TrainInstance t;
    t.id = required_text(rec, mapping, "id", n);
    t.question = required_text(rec, mapping, "question", n);
    t.answer = required_text(rec, mapping, "answer", n);
    t.clarity = parse_clarity(required_text(rec, mapping, "clarity", n));
    t.evasion = parse_evasion(required_text(rec, mapping, "evasion", n));
    if (auto v = pick(rec, mapping, "president"); v && !trim(as_text(*v)).empty())
      t.president = as_text(*v);
    if (auto v = pick(rec, mapping, "date"); v && !trim(as_text(*v)).empty())
      t.date = as_text(*v);
    if (auto v = pick(rec, mapping, "multiple_questions"); v)
      t.multiple_questions = as_bool(*v);
    if (auto v = pick(rec, mapping, "affirmative_question"); v)
      t.affirmative_question = as_bool(*v);
    out.push_back(std::move(t));
  }
  write_training(out, dest);
  return out.size();
}

std::size_t import_test(const std::filesystem::path& source, const ImportMapping& mapping,
                        const std::filesystem::path& dest) {
  const auto records = read_records(source);
  std::vector<TestInstance> out;
  std::size_t n = 0;
  for (const json& rec : records) {
    ++n;
    TestInstance t;
    t.id = required_text(rec, mapping, "id", n);
    t.question = required_text(rec, mapping, "question", n);
    t.answer = required_text(rec, mapping, "answer", n);
    t.clarity = parse_clarity(required_text(rec, mapping, "clarity", n));

    std::vector<std::string> annotations;
    if (auto v = pick(rec, mapping, "evasion_annotations")) {
      if (v->is_array()) {
        for (const json& a : *v) annotations.push_back(as_text(a));
      } else {
        // A stringified list is common in CSV exports.
        const json parsed = json::parse(as_text(*v), nullptr, false);
        if (parsed.is_array())
          for (const json& a : parsed) annotations.push_back(as_text(a));
      }
    }
    if (annotations.empty()) {
      for (const char* field : {"evasion_a1", "evasion_a2", "evasion_a3"}) {
        if (auto v = pick(rec, mapping, field)) annotations.push_back(as_text(*v));
      }
    }
    if (annotations.size() != 3) throw WrongAnnotatorCount(t.id, annotations.size());
    for (std::size_t k = 0; k < 3; ++k)
      t.evasion_annotations[k] = parse_evasion(annotations[k]);
    out.push_back(std::move(t));
  }
  write_test(out, dest);
  return out.size();
}

}  // namespace clarity
