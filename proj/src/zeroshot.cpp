#include "clarity/zeroshot.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "clarity/hashing.hpp"
#include "clarity/text.hpp"

namespace clarity {

using nlohmann::json;

PromptTemplate PromptTemplate::load(const std::filesystem::path& path, std::size_t batch_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open prompt file " + path.string());
  PromptTemplate tpl;
  tpl.system_text.assign((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  tpl.batch_size = batch_size;
  if (tpl.system_text.empty()) throw std::runtime_error("prompt file is empty");
  return tpl;
}

std::string PromptTemplate::system_sha256() const { return sha256_hex(system_text); }

EmptyBatch::EmptyBatch() : std::runtime_error("prompt batch is empty") {}

MalformedJson::MalformedJson(const std::string& detail)
    : std::runtime_error("malformed model response: " + detail) {}

LengthMismatch::LengthMismatch(std::size_t expected, std::size_t got)
    : std::runtime_error("expected " + std::to_string(expected) + " labels, got " +
                         std::to_string(got)),
      expected_(expected),
      got_(got) {}

ExhaustedRetries::ExhaustedRetries(std::size_t batch_index, int attempts)
    : std::runtime_error("batch " + std::to_string(batch_index) + " failed after " +
                         std::to_string(attempts) + " attempts"),
      batch_index_(batch_index) {}

UnknownResponseLabel::UnknownResponseLabel(std::size_t index, std::string offending)
    : UnknownLabel(std::move(offending), LabelFamily::Evasion), index_(index) {}

std::pair<std::string, std::string> build_prompt(const PromptTemplate& tpl,
                                                 const std::vector<QaItem>& batch) {
  if (batch.empty()) throw EmptyBatch();
  if (tpl.batch_size > 0 && batch.size() > tpl.batch_size)
    throw std::invalid_argument("batch exceeds the configured maximum of " +
                                std::to_string(tpl.batch_size));
  std::string user;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (i > 0) user += "\n";
    user += "ITEM " + std::to_string(i + 1) + ":\n";
    user += "QUESTION: " + batch[i].question + "\n";
    user += "ANSWER: " + batch[i].answer + "\n";
  }
  return {tpl.system_text, user};
}

namespace {

std::string_view strip_fences(std::string_view raw, bool* stripped) {
  std::string_view s = trim(raw);
  if (s.size() >= 6 && s.substr(0, 3) == "```" && s.substr(s.size() - 3) == "```") {
    s.remove_prefix(3);
    // Drop a language tag like "json" on the opening fence line.
    const auto nl = s.find('\n');
    if (nl != std::string_view::npos && trim(s.substr(0, nl)).find_first_of(" \t{[") ==
                                            std::string_view::npos)
      s.remove_prefix(nl + 1);
    s.remove_suffix(3);
    if (stripped) *stripped = true;
    return trim(s);
  }
  return s;
}

}  // namespace

std::vector<EvasionLabel> parse_response(std::string_view raw, std::size_t n,
                                         bool* stripped_fence) {
  if (n < 1) throw std::invalid_argument("expected label count must be >= 1");
  if (stripped_fence) *stripped_fence = false;
  const std::string_view body = strip_fences(raw, stripped_fence);

  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedJson(e.what());
  }
  if (!parsed.is_object() || !parsed.contains("labels") || !parsed["labels"].is_array())
    throw MalformedJson("expected an object with a \"labels\" array");

  const json& arr = parsed["labels"];
  if (arr.size() != n) throw LengthMismatch(n, arr.size());

  std::vector<EvasionLabel> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!arr[i].is_string()) throw MalformedJson("label entry " + std::to_string(i) +
                                                 " is not a string");
    const std::string s = arr[i].get<std::string>();
    try {
      out.push_back(parse_evasion(s));
    } catch (const UnknownLabel&) {
      throw UnknownResponseLabel(i, s);
    }
  }
  return out;
}

MockChatBackend::MockChatBackend() : MockChatBackend(Options{}) {}

MockChatBackend::MockChatBackend(Options options) : options_(options) {}

namespace {

std::uint64_t fnv1a_text(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string MockChatBackend::send(const std::string&, const std::string& user_text) {
  const int call = ++calls_;
  if (call <= options_.fail_first) return "I cannot help with that.";

  // Recover the per-item answers from the user message.
  std::vector<std::string> answers;
  std::size_t pos = 0;
  while ((pos = user_text.find("ANSWER: ", pos)) != std::string::npos) {
    pos += 8;
    const auto end = user_text.find('\n', pos);
    answers.emplace_back(user_text.substr(pos, end == std::string::npos ? end : end - pos));
    if (end == std::string::npos) break;
    pos = end;
  }

  json labels = json::array();
  for (const std::string& a : answers) {
    const EvasionLabel label =
        options_.fixed_label ? *options_.fixed_label
                             : static_cast<EvasionLabel>(fnv1a_text(a) % kEvasionCount);
    labels.push_back(display_string(label));
  }
  json obj;
  obj["labels"] = std::move(labels);
  std::string body = obj.dump();
  if (options_.wrap_in_fence) body = "```json\n" + body + "\n```";
  return body;
}

HttpChatBackend::HttpChatBackend(Options options) : options_(std::move(options)) {
  if (options_.base_host.empty()) throw std::invalid_argument("chat backend host required");
}

std::string HttpChatBackend::provider() const {
  return "http/" + options_.base_host + "/" + options_.model;
}

std::string HttpChatBackend::send(const std::string& system_text,
                                  const std::string& user_text) {
  const char* key = std::getenv(options_.api_key_env.c_str());

  json body;
  body["model"] = options_.model;
  body["temperature"] = options_.temperature;
  body["messages"] = json::array({json{{"role", "system"}, {"content", system_text}},
                                  json{{"role", "user"}, {"content", user_text}}});

  httplib::Headers headers;
  if (key) headers.emplace("Authorization", std::string("Bearer ") + key);

  auto do_post = [&](auto& client) {
    client.set_read_timeout(120, 0);
    return client.Post(options_.path, headers, body.dump(), "application/json");
  };

  httplib::Result res;
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
  if (options_.port == 443) {
    httplib::SSLClient client(options_.base_host, options_.port);
    res = do_post(client);
  } else {
    httplib::Client client(options_.base_host, options_.port);
    res = do_post(client);
  }
#else
  httplib::Client client(options_.base_host, options_.port);
  res = do_post(client);
#endif
  if (!res)
    throw std::runtime_error("chat backend " + provider() + " unreachable");
  if (res->status != 200)
    throw std::runtime_error("chat backend " + provider() + " returned status " +
                             std::to_string(res->status) + ": " + res->body);
  json parsed = json::parse(res->body);
  return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
}

std::vector<QaItem> qa_items(const std::vector<TestInstance>& instances) {
  std::vector<QaItem> out;
  out.reserve(instances.size());
  for (const TestInstance& t : instances) out.push_back({t.id, t.question, t.answer});
  return out;
}

namespace {

struct BatchSlot {
  BatchLog log;
  std::vector<QaItem> items;
  std::vector<EvasionLabel> labels;
};

void run_batch(BatchSlot& slot, ChatBackend& backend, const PromptTemplate& tpl,
               const ZeroShotOptions& options) {
  const auto [system_text, user_text] = build_prompt(tpl, slot.items);
  slot.log.user_text = user_text;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    slot.log.attempts = attempt;
    if (attempt > 1 && options.backoff_base_ms > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options.backoff_base_ms << (attempt - 2)));
    std::string raw;
    try {
      raw = backend.send(system_text, user_text);
    } catch (const std::exception& e) {
      slot.log.raw_responses.emplace_back(std::string("<<send failed: ") + e.what() + ">>");
      continue;
    }
    slot.log.raw_responses.push_back(raw);
    try {
      bool fenced = false;
      slot.labels = parse_response(raw, slot.items.size(), &fenced);
      slot.log.stripped_fence = slot.log.stripped_fence || fenced;
      return;
    } catch (const std::exception&) {
      // Malformed, wrong length, or out-of-vocabulary: retry the whole batch.
    }
  }
  throw ExhaustedRetries(slot.log.batch_index, options.max_attempts);
}

}  // namespace

ZeroShotResult classify_dataset(const std::vector<QaItem>& items, ChatBackend& backend,
                                const PromptTemplate& tpl, const ZeroShotOptions& options,
                                const std::string& run_id, const BatchSink& sink) {
  if (items.empty()) throw EmptyBatch();
  if (options.batch_size < 1 || options.max_attempts < 1 || options.parallelism < 1)
    throw std::invalid_argument("invalid zero-shot options");

  PromptTemplate batch_tpl = tpl;
  batch_tpl.batch_size = options.batch_size;

  std::vector<BatchSlot> slots;
  for (std::size_t start = 0; start < items.size(); start += options.batch_size) {
    BatchSlot slot;
    slot.log.batch_index = slots.size();
    slot.log.first_item = start;
    slot.log.size = std::min(options.batch_size, items.size() - start);
    slot.items.assign(items.begin() + start, items.begin() + start + slot.log.size);
    slots.push_back(std::move(slot));
  }

  std::mutex sink_mutex;
  auto process = [&](BatchSlot& slot) {
    run_batch(slot, backend, batch_tpl, options);
    if (sink) {
      std::lock_guard<std::mutex> lock(sink_mutex);
      sink(slot.log, slot.items, slot.labels);
    }
  };

  const int workers = static_cast<int>(
      std::min<std::size_t>(options.parallelism, slots.size()));
  if (workers <= 1 || !backend.thread_safe()) {
    for (BatchSlot& slot : slots) process(slot);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!failed.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= slots.size()) return;
          try {
            process(slots[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            failed.store(true);
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // Reassembly preserves input order regardless of completion order.
  ZeroShotResult result{PredictionSet(run_id, LabelFamily::Evasion),
                        PredictionSet(run_id + "+derived-clarity", LabelFamily::Clarity),
                        {}};
  for (BatchSlot& slot : slots) {
    for (std::size_t i = 0; i < slot.items.size(); ++i)
      result.evasion.add(slot.items[i].id, slot.labels[i]);
    result.batch_logs.push_back(std::move(slot.log));
  }
  result.derived_clarity = result.evasion.derive_clarity();
  return result;
}

}  // namespace clarity
