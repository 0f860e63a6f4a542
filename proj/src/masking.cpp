#include "clarity/masking.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "clarity/text.hpp"

namespace clarity {

std::string_view masking_name(MaskingMode m) {
  switch (m) {
    case MaskingMode::None: return "none";
    case MaskingMode::Naive: return "naive";
    case MaskingMode::EntityAware: return "entity_aware";
  }
  return "none";
}

MaskingMode parse_masking(std::string_view s) {
  if (s == "none") return MaskingMode::None;
  if (s == "naive") return MaskingMode::Naive;
  if (s == "entity_aware") return MaskingMode::EntityAware;
  throw std::invalid_argument("unknown masking mode: " + std::string(s));
}

namespace {

// Right-to-left so earlier offsets stay valid.
std::string replace_spans(std::string_view text, const std::vector<PersonSpan>& spans,
                          const std::vector<std::string>& replacements) {
  std::string out(text);
  for (std::size_t i = spans.size(); i-- > 0;)
    out.replace(spans[i].begin, spans[i].end - spans[i].begin, replacements[i]);
  return out;
}

std::set<std::string> token_set(std::string_view surface) {
  std::set<std::string> out;
  for (const std::string& t : split_whitespace(to_lower(surface))) out.insert(t);
  return out;
}

bool contained(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Union-find over mention indices; mentions merge when one surface's token
// set contains the other's.
std::vector<int> cluster_by_containment(const std::vector<std::set<std::string>>& tokens) {
  std::vector<std::size_t> parent(tokens.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      if (contained(tokens[i], tokens[j]) || contained(tokens[j], tokens[i])) {
        std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  // Dense ids 1..k in first-appearance order.
  std::vector<int> cluster_id(tokens.size(), 0);
  int next = 1;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::size_t root = find(i);
    if (cluster_id[root] == 0) cluster_id[root] = next++;
    cluster_id[i] = cluster_id[root];
  }
  return cluster_id;
}

}  // namespace

MaskedPair mask_naive(std::string_view question, std::string_view answer,
                      NerBackend& backend) {
  auto q_spans = detect_persons(question, backend);
  auto a_spans = detect_persons(answer, backend);
  std::vector<std::string> q_repl(q_spans.size(), "[PERSON]");
  std::vector<std::string> a_repl(a_spans.size(), "[PERSON]");
  return {replace_spans(question, q_spans, q_repl), replace_spans(answer, a_spans, a_repl)};
}

MaskedPair mask_entity_aware(std::string_view question, std::string_view answer,
                             NerBackend& backend) {
  auto q_spans = detect_persons(question, backend);
  auto a_spans = detect_persons(answer, backend);

  // Reading order: all question mentions, then all answer mentions.
  std::vector<std::set<std::string>> tokens;
  tokens.reserve(q_spans.size() + a_spans.size());
  for (const auto& s : q_spans) tokens.push_back(token_set(s.surface));
  for (const auto& s : a_spans) tokens.push_back(token_set(s.surface));
  const auto ids = cluster_by_containment(tokens);

  auto placeholder = [](int id) { return "[PERSON_" + std::to_string(id) + "]"; };
  std::vector<std::string> q_repl, a_repl;
  for (std::size_t i = 0; i < q_spans.size(); ++i) {
    q_spans[i].entity_id = ids[i];
    q_repl.push_back(placeholder(ids[i]));
  }
  for (std::size_t i = 0; i < a_spans.size(); ++i) {
    a_spans[i].entity_id = ids[q_spans.size() + i];
    a_repl.push_back(placeholder(ids[q_spans.size() + i]));
  }
  return {replace_spans(question, q_spans, q_repl), replace_spans(answer, a_spans, a_repl)};
}

MaskedPair apply_masking(MaskingMode mode, std::string_view question,
                         std::string_view answer, NerBackend* backend) {
  if (mode == MaskingMode::None)
    return {std::string(question), std::string(answer)};
  if (!backend) throw BackendUnavailable("masking requested but no NER backend configured");
  return mode == MaskingMode::Naive ? mask_naive(question, answer, *backend)
                                    : mask_entity_aware(question, answer, *backend);
}

}  // namespace clarity
