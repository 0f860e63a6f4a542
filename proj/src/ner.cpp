#include "clarity/ner.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "clarity/text.hpp"

namespace clarity {

BackendUnavailable::BackendUnavailable(const std::string& what) : std::runtime_error(what) {}

namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'' || c == '-';
}

// Tokens with character offsets, split on non-word characters.
struct Token {
  std::size_t begin, end;
  std::string_view text;
};

std::vector<Token> tokenize_offsets(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !word_char(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && word_char(text[i])) ++i;
    if (i > start) out.push_back({start, i, text.substr(start, i - start)});
  }
  return out;
}

}  // namespace

LexiconNer::LexiconNer(std::vector<std::string> names) {
  for (const std::string& name : names) {
    auto toks = split_whitespace(name);
    if (!toks.empty()) name_tokens_.push_back(std::move(toks));
  }
  std::stable_sort(name_tokens_.begin(), name_tokens_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

LexiconNer LexiconNer::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendUnavailable("cannot open lexicon " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty() && t.front() != '#') names.emplace_back(t);
  }
  return LexiconNer(std::move(names));
}

std::vector<PersonSpan> LexiconNer::person_spans(std::string_view text) {
  const auto tokens = tokenize_offsets(text);
  std::vector<PersonSpan> spans;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (const auto& name : name_tokens_) {  // longest names first
      if (i + name.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; ok && k < name.size(); ++k) ok = tokens[i + k].text == name[k];
      if (!ok) continue;
      PersonSpan span;
      span.begin = tokens[i].begin;
      span.end = tokens[i + name.size() - 1].end;
      span.surface = std::string(text.substr(span.begin, span.end - span.begin));
      spans.push_back(std::move(span));
      i += name.size();
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return spans;
}

std::string LexiconNer::version() const {
  return "lexicon-v1/" + std::to_string(name_tokens_.size()) + "-names";
}

HttpNer::HttpNer(std::string host, int port, std::string path)
    : host_(std::move(host)), port_(port), path_(std::move(path)) {}

std::vector<PersonSpan> HttpNer::person_spans(std::string_view text) {
  httplib::Client client(host_, port_);
  nlohmann::json body;
  body["text"] = std::string(text);
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res || res->status != 200)
    throw BackendUnavailable("NER service " + host_ + ":" + std::to_string(port_) +
                             (res ? " returned status " + std::to_string(res->status)
                                  : " is unreachable"));
  std::vector<PersonSpan> spans;
  auto parsed = nlohmann::json::parse(res->body);
  for (const auto& s : parsed.at("spans")) {
    PersonSpan span;
    span.begin = s.at("begin").get<std::size_t>();
    span.end = s.at("end").get<std::size_t>();
    span.surface = std::string(text.substr(span.begin, span.end - span.begin));
    spans.push_back(std::move(span));
  }
  return spans;
}

std::string HttpNer::version() const {
  return "http/" + host_ + ":" + std::to_string(port_) + path_;
}

std::vector<PersonSpan> detect_persons(std::string_view text, NerBackend& backend) {
  auto spans = backend.person_spans(text);
  std::sort(spans.begin(), spans.end(),
            [](const PersonSpan& a, const PersonSpan& b) { return a.begin < b.begin; });
  std::size_t prev_end = 0;
  for (const PersonSpan& s : spans) {
    if (s.begin >= s.end || s.end > text.size() || s.begin < prev_end)
      throw std::runtime_error("NER backend " + backend.version() +
                               " returned invalid or overlapping spans");
    prev_end = s.end;
  }
  return spans;
}

}  // namespace clarity
