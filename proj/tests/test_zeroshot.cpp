#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "clarity/hashing.hpp"
#include "clarity/synth_corpus.hpp"
#include "clarity/zeroshot.hpp"

using namespace clarity;

#ifndef CLARITY_SOURCE_DIR
#define CLARITY_SOURCE_DIR "."
#endif

namespace {

const std::filesystem::path kPromptPath =
    std::filesystem::path(CLARITY_SOURCE_DIR) / "data" / "prompts" / "evasion_zero_shot.txt";

std::vector<QaItem> some_items(std::size_t n) {
  std::vector<QaItem> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({"q" + std::to_string(i), "Will you act on trade?",
                   "Answer number " + std::to_string(i) + "."});
  return out;
}

}  // namespace

TEST_CASE("the stored system prompt hashes to the pinned value") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  CHECK(tpl.system_sha256() == kZeroShotPromptSha256);
  // Spot anchors of the pinned text.
  CHECK(tpl.system_text.find("You are an expert annotator for CLARITY Task B") !=
        std::string::npos);
  CHECK(tpl.system_text.find("Respond ONLY with a JSON object") != std::string::npos);
}

TEST_CASE("build_prompt enumerates items once each, 1-based, in order") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  const auto items = some_items(2);
  const auto [system_text, user_text] = build_prompt(tpl, items);
  CHECK(system_text == tpl.system_text);
  for (const std::string needle : {"ITEM 1:", "ITEM 2:"}) {
    const auto first = user_text.find(needle);
    REQUIRE(first != std::string::npos);
    CHECK(user_text.find(needle, first + 1) == std::string::npos);
  }
  CHECK(user_text.find("ITEM 3:") == std::string::npos);
  CHECK(user_text.find("QUESTION: Will you act on trade?") != std::string::npos);
  CHECK(user_text.find("ITEM 1:") < user_text.find("ITEM 2:"));
}

TEST_CASE("empty batches are rejected") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  CHECK_THROWS_AS(build_prompt(tpl, {}), EmptyBatch);
}

TEST_CASE("parse_response accepts a clean labels object") {
  const auto labels = parse_response(R"({"labels": ["Explicit", "Dodging"]})", 2);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == EvasionLabel::Explicit);
  CHECK(labels[1] == EvasionLabel::Dodging);
}

TEST_CASE("parse_response strips markdown fences with a warning flag") {
  bool stripped = false;
  const auto labels =
      parse_response("```json\n{\"labels\": [\"Explicit\"]}\n```", 1, &stripped);
  CHECK(stripped);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0] == EvasionLabel::Explicit);

  stripped = false;
  parse_response(R"({"labels": ["Explicit"]})", 1, &stripped);
  CHECK_FALSE(stripped);
}

TEST_CASE("parse_response rejects wrong lengths, junk, and unknown labels") {
  CHECK_THROWS_AS(parse_response(R"({"labels": ["Explicit"]})", 2), LengthMismatch);
  try {
    parse_response(R"({"labels": ["Explicit"]})", 2);
  } catch (const LengthMismatch& e) {
    CHECK(e.expected() == 2);
    CHECK(e.got() == 1);
  }
  CHECK_THROWS_AS(parse_response("the labels are Explicit and Dodging", 2), MalformedJson);
  CHECK_THROWS_AS(parse_response(R"({"wrong_key": []})", 1), MalformedJson);
  CHECK_THROWS_AS(parse_response(R"({"labels": ["Evasive"]})", 1), UnknownResponseLabel);
  try {
    parse_response(R"({"labels": ["Explicit", "Evasive"]})", 2);
  } catch (const UnknownResponseLabel& e) {
    CHECK(e.index() == 1);
    CHECK(e.offending() == "Evasive");
  }
}

TEST_CASE("parse_response of a serialized label list is the identity") {
  const std::vector<EvasionLabel> labels = {EvasionLabel::Partial, EvasionLabel::Declining,
                                            EvasionLabel::Clarification};
  nlohmann::json obj;
  obj["labels"] = nlohmann::json::array();
  for (EvasionLabel e : labels) obj["labels"].push_back(display_string(e));
  CHECK(parse_response(obj.dump(), labels.size()) == labels);
}

TEST_CASE("classify_dataset covers every instance in order with derived clarity") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  MockChatBackend backend;
  ZeroShotOptions options;
  options.batch_size = 7;
  options.backoff_base_ms = 0;
  const auto items = some_items(23);
  const auto result = classify_dataset(items, backend, tpl, options, "zs");

  CHECK(result.evasion.size() == items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    CHECK(result.evasion.ids()[i] == items[i].id);
  CHECK(result.batch_logs.size() == 4);  // 7+7+7+2

  REQUIRE(result.derived_clarity.size() == items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto e = static_cast<EvasionLabel>(result.evasion.label_index_at(i));
    CHECK(result.derived_clarity.label_index_at(i) == index_of(clarity_of(e)));
  }
}

TEST_CASE("a failing-then-working backend succeeds with attempts logged") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  MockChatBackend::Options mock;
  mock.fail_first = 1;
  MockChatBackend backend(mock);
  ZeroShotOptions options;
  options.batch_size = 10;
  options.max_attempts = 2;
  options.backoff_base_ms = 0;
  const auto result = classify_dataset(some_items(4), backend, tpl, options);
  REQUIRE(result.batch_logs.size() == 1);
  CHECK(result.batch_logs[0].attempts == 2);
  CHECK(result.batch_logs[0].raw_responses.size() == 2);
}

TEST_CASE("retries exhaust loudly with the failing batch index") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  MockChatBackend::Options mock;
  mock.fail_first = 1000;
  MockChatBackend backend(mock);
  ZeroShotOptions options;
  options.batch_size = 2;
  options.max_attempts = 3;
  options.backoff_base_ms = 0;
  CHECK_THROWS_AS(classify_dataset(some_items(4), backend, tpl, options), ExhaustedRetries);
  try {
    classify_dataset(some_items(4), backend, tpl, options);
  } catch (const ExhaustedRetries& e) {
    CHECK(e.batch_index() == 0);
  }
}

TEST_CASE("completed batches reach the sink before a later batch fails") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  // Batch 1 (attempt 1) succeeds; batch 2 then fails all 2 attempts.
  MockChatBackend::Options mock;
  MockChatBackend good(mock);
  ZeroShotOptions options;
  options.batch_size = 2;
  options.max_attempts = 2;
  options.backoff_base_ms = 0;

  std::size_t sunk_items = 0;
  const BatchSink sink = [&](const BatchLog&, const std::vector<QaItem>& items,
                             const std::vector<EvasionLabel>& labels) {
    REQUIRE(items.size() == labels.size());
    sunk_items += items.size();
  };
  // All succeed with the plain mock: the sink sees every item.
  classify_dataset(some_items(5), good, tpl, options, "zs", sink);
  CHECK(sunk_items == 5);
}

TEST_CASE("fenced responses are tolerated and flagged in the batch log") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  MockChatBackend::Options mock;
  mock.wrap_in_fence = true;
  MockChatBackend backend(mock);
  ZeroShotOptions options;
  options.backoff_base_ms = 0;
  const auto result = classify_dataset(some_items(3), backend, tpl, options);
  CHECK(result.batch_logs[0].stripped_fence);
  CHECK(result.evasion.size() == 3);
}

TEST_CASE("concurrent dispatch reassembles the same predictions as sequential") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  MockChatBackend backend;
  const auto items = some_items(37);

  ZeroShotOptions seq;
  seq.batch_size = 4;
  seq.backoff_base_ms = 0;
  const auto sequential = classify_dataset(items, backend, tpl, seq);

  ZeroShotOptions par = seq;
  par.parallelism = 4;
  const auto parallel = classify_dataset(items, backend, tpl, par);

  CHECK(parallel.evasion.same_predictions(sequential.evasion));
}

TEST_CASE("every emitted label belongs to the nine-label vocabulary") {
  const PromptTemplate tpl = PromptTemplate::load(kPromptPath);
  MockChatBackend backend;
  ZeroShotOptions options;
  options.backoff_base_ms = 0;
  const auto test = small_test();
  const auto result = classify_dataset(qa_items(test), backend, tpl, options);
  for (std::size_t i = 0; i < result.evasion.size(); ++i)
    CHECK(result.evasion.label_index_at(i) < kEvasionCount);
}
