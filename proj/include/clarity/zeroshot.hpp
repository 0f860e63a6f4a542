#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clarity/instances.hpp"
#include "clarity/labels.hpp"
#include "clarity/predictions.hpp"

namespace clarity {

// SHA-256 of the pinned system prompt file (data/prompts/evasion_zero_shot.txt).
inline constexpr std::string_view kZeroShotPromptSha256 =
    "d7b3336b558b3b3b0a2b8b3a4cf6dedd854ee7383e7b5a1ae9e336f0ec40c1b8";

struct QaItem {
  std::string id;
  std::string question;
  std::string answer;
};

struct PromptTemplate {
  std::string system_text;
  std::size_t batch_size = 20;

  static PromptTemplate load(const std::filesystem::path& path, std::size_t batch_size = 20);
  std::string system_sha256() const;
};

class EmptyBatch : public std::runtime_error {
 public:
  EmptyBatch();
};

class MalformedJson : public std::runtime_error {
 public:
  explicit MalformedJson(const std::string& detail);
};

class LengthMismatch : public std::runtime_error {
 public:
  LengthMismatch(std::size_t expected, std::size_t got);
  std::size_t expected() const { return expected_; }
  std::size_t got() const { return got_; }

 private:
  std::size_t expected_, got_;
};

class ExhaustedRetries : public std::runtime_error {
 public:
  ExhaustedRetries(std::size_t batch_index, int attempts);
  std::size_t batch_index() const { return batch_index_; }

 private:
  std::size_t batch_index_;
};

class UnknownResponseLabel : public UnknownLabel {
 public:
  UnknownResponseLabel(std::size_t index, std::string offending);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// (system_text, user_text): items enumerated 1-based as
// "ITEM i:\nQUESTION: ...\nANSWER: ...".
std::pair<std::string, std::string> build_prompt(const PromptTemplate& tpl,
                                                 const std::vector<QaItem>& batch);

// Strict parse of {"labels": [...]} with exactly n entries, each a valid
// evasion label. Surrounding markdown code fences are stripped with a warning
// flag despite the prompt forbidding them.
std::vector<EvasionLabel> parse_response(std::string_view raw, std::size_t n,
                                         bool* stripped_fence = nullptr);

// Hosted-model adapter. Stateless between calls from the pipeline's view.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string send(const std::string& system_text, const std::string& user_text) = 0;
  virtual std::string provider() const = 0;
  virtual bool thread_safe() const { return false; }
};

// Deterministic in-process backend: labels each item by a pinned hash of its
// answer text, optionally failing the first `fail_first` calls. Exercises
// the full protocol without a network.
class MockChatBackend final : public ChatBackend {
 public:
  struct Options {
    int fail_first = 0;              // raw garbage for this many leading calls
    bool wrap_in_fence = false;      // emit ```json fences around the object
    std::optional<EvasionLabel> fixed_label;
  };
  MockChatBackend();
  explicit MockChatBackend(Options options);

  std::string send(const std::string& system_text, const std::string& user_text) override;
  std::string provider() const override { return "mock"; }
  bool thread_safe() const override { return true; }
  int calls() const { return calls_; }

 private:
  Options options_;
  std::atomic<int> calls_{0};
};

// OpenAI-compatible chat completions over HTTP. The API key is read from an
// environment variable, never from config files.
class HttpChatBackend final : public ChatBackend {
 public:
  struct Options {
    std::string base_host;       // e.g. "api.openai.com"
    int port = 443;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env = "CLARITY_API_KEY";
    double temperature = 0.0;
  };
  explicit HttpChatBackend(Options options);

  std::string send(const std::string& system_text, const std::string& user_text) override;
  std::string provider() const override;

 private:
  Options options_;
};

struct BatchLog {
  std::size_t batch_index = 0;
  std::size_t first_item = 0;  // offset into the instance list
  std::size_t size = 0;
  int attempts = 0;
  bool stripped_fence = false;
  std::string user_text;                   // the request, for the audit trail
  std::vector<std::string> raw_responses;  // one per attempt
};

struct ZeroShotOptions {
  std::size_t batch_size = 20;
  int max_attempts = 3;
  int parallelism = 1;
  int backoff_base_ms = 250;  // doubles per retry; 0 in tests
};

struct ZeroShotResult {
  PredictionSet evasion;
  PredictionSet derived_clarity;
  std::vector<BatchLog> batch_logs;
};

// Called with the evasion predictions of each completed batch, in input
// order, so partial progress can be persisted before a loud failure.
using BatchSink = std::function<void(const BatchLog&, const std::vector<QaItem>&,
                                     const std::vector<EvasionLabel>&)>;

// Partitions instances into order-preserving batches, retries each batch up
// to the limit on parse failure, and reassembles id-aligned predictions plus
// taxonomy-derived clarity. Throws ExhaustedRetries when a batch never parses.
ZeroShotResult classify_dataset(const std::vector<QaItem>& items, ChatBackend& backend,
                                const PromptTemplate& tpl, const ZeroShotOptions& options,
                                const std::string& run_id = "zeroshot",
                                const BatchSink& sink = nullptr);

std::vector<QaItem> qa_items(const std::vector<TestInstance>& instances);

}  // namespace clarity
