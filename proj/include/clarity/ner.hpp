#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clarity {

struct PersonSpan {
  std::size_t begin = 0;  // character offsets, begin < end <= text length
  std::size_t end = 0;
  std::string surface;
  std::optional<int> entity_id;

  bool operator==(const PersonSpan&) const = default;
};

class BackendUnavailable : public std::runtime_error {
 public:
  explicit BackendUnavailable(const std::string& what);
};

// Person-mention recognizer. Implementations must return non-overlapping
// spans and be deterministic for a fixed version(); masking placeholders
// ("[PERSON]", "[PERSON_i]") must never be reported as mentions.
class NerBackend {
 public:
  virtual ~NerBackend() = default;
  virtual std::vector<PersonSpan> person_spans(std::string_view text) = 0;
  virtual std::string version() const = 0;
  // Callers serialize access to backends that are not thread safe.
  virtual bool thread_safe() const { return false; }
};

// Longest-match lexicon recognizer over word boundaries. Deterministic,
// dependency-free; the test and fixture backend.
class LexiconNer final : public NerBackend {
 public:
  explicit LexiconNer(std::vector<std::string> names);
  static LexiconNer from_file(const std::filesystem::path& path);

  std::vector<PersonSpan> person_spans(std::string_view text) override;
  std::string version() const override;
  bool thread_safe() const override { return true; }

 private:
  std::vector<std::vector<std::string>> name_tokens_;  // longest first
};

// Adapter to an external recognizer service: POST {"text": ...} to
// `endpoint`, expect {"spans": [{"begin": n, "end": n}, ...]}.
class HttpNer final : public NerBackend {
 public:
  HttpNer(std::string host, int port, std::string path = "/ner");

  std::vector<PersonSpan> person_spans(std::string_view text) override;
  std::string version() const override;

 private:
  std::string host_;
  int port_;
  std::string path_;
};

// Validated detection: enforces the span invariants on whatever the backend
// returned before anyone consumes the result.
std::vector<PersonSpan> detect_persons(std::string_view text, NerBackend& backend);

}  // namespace clarity
