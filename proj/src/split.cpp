#include "clarity/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "clarity/rng.hpp"

namespace clarity {

using nlohmann::json;

std::string_view regime_name(SplitRegime r) {
  return r == SplitRegime::Stratified ? "stratified" : "president_disjoint";
}

SplitRegime parse_regime(std::string_view s) {
  if (s == "stratified") return SplitRegime::Stratified;
  if (s == "president_disjoint") return SplitRegime::PresidentDisjoint;
  throw std::invalid_argument("unknown split regime: " + std::string(s));
}

TooFewInstances::TooFewInstances(const std::vector<std::string>& labels)
    : std::runtime_error("label(s) too small to appear in both splits: " +
                         std::accumulate(labels.begin(), labels.end(), std::string(),
                                         [](std::string acc, const std::string& l) {
                                           return acc.empty() ? l : acc + ", " + l;
                                         })),
      labels_(labels) {}

MissingPresident::MissingPresident(const std::string& id)
    : std::runtime_error("instance " + id + " has no president") {}

SinglePresident::SinglePresident()
    : std::runtime_error("president-disjoint split needs at least two presidents") {}

std::string SplitAssignment::to_json_string() const {
  json j;
  j["regime"] = regime_name(regime);
  j["seed"] = seed;
  j["ratio"] = ratio;
  j["shuffle"] = kShuffleAlgorithm;
  j["train_ids"] = train_ids;
  j["val_ids"] = val_ids;
  return j.dump(2) + "\n";
}

SplitAssignment SplitAssignment::from_json_string(const std::string& text) {
  json j = json::parse(text);
  SplitAssignment a;
  a.regime = parse_regime(j.at("regime").get<std::string>());
  a.seed = j.at("seed").get<std::uint64_t>();
  a.ratio = j.at("ratio").get<double>();
  a.train_ids = j.at("train_ids").get<std::vector<std::string>>();
  a.val_ids = j.at("val_ids").get<std::vector<std::string>>();
  return a;
}

void SplitAssignment::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json_string();
}

SplitAssignment SplitAssignment::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

namespace {

void validate_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("split ratio must lie in (0, 1)");
}

}  // namespace

SplitAssignment dual_stratified_split(const std::vector<TrainInstance>& instances,
                                      double ratio, std::uint64_t seed,
                                      const SplitOptions& options,
                                      std::vector<std::string>* underfilled_labels) {
  validate_ratio(ratio);
  if (instances.empty()) throw EmptyDataset();

  // Strata keyed by evasion label, ids in input order.
  std::array<std::vector<std::string>, kEvasionCount> strata;
  for (const TrainInstance& t : instances) strata[index_of(t.evasion)].push_back(t.id);

  const double val_share = 1.0 - ratio;
  const std::size_t total = instances.size();
  const auto val_total =
      static_cast<std::size_t>(std::llround(val_share * static_cast<double>(total)));

  // Largest-remainder apportionment of validation seats across strata.
  std::array<std::size_t, kEvasionCount> val_count{};
  std::vector<std::pair<double, std::size_t>> remainders;  // (remainder, stratum)
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < kEvasionCount; ++s) {
    const double exact = val_share * static_cast<double>(strata[s].size());
    val_count[s] = static_cast<std::size_t>(std::floor(exact));
    assigned += val_count[s];
    remainders.emplace_back(exact - std::floor(exact), s);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < val_total && k < remainders.size(); ++k) {
    std::size_t s = remainders[k].second;
    if (val_count[s] < strata[s].size()) {
      ++val_count[s];
      ++assigned;
    }
  }

  std::vector<std::string> underfilled;
  for (std::size_t s = 0; s < kEvasionCount; ++s) {
    if (strata[s].empty()) continue;
    if (val_count[s] == 0 || val_count[s] == strata[s].size())
      underfilled.emplace_back(display_string(static_cast<EvasionLabel>(s)));
  }
  if (!underfilled.empty()) {
    if (!options.allow_underfilled_strata) throw TooFewInstances(underfilled);
    if (underfilled_labels) *underfilled_labels = underfilled;
  } else if (underfilled_labels) {
    underfilled_labels->clear();
  }

  SplitAssignment out;
  out.regime = SplitRegime::Stratified;
  out.seed = seed;
  out.ratio = ratio;
  SeededRng rng(seed);
  for (std::size_t s = 0; s < kEvasionCount; ++s) {
    auto& ids = strata[s];
    fisher_yates_shuffle(ids, rng);
    for (std::size_t i = 0; i < ids.size(); ++i)
      (i < val_count[s] ? out.val_ids : out.train_ids).push_back(std::move(ids[i]));
  }
  std::sort(out.train_ids.begin(), out.train_ids.end());
  std::sort(out.val_ids.begin(), out.val_ids.end());
  return out;
}

SplitAssignment president_disjoint_split(const std::vector<TrainInstance>& instances,
                                         double target_ratio) {
  validate_ratio(target_ratio);
  if (instances.empty()) throw EmptyDataset();

  std::map<std::string, std::size_t> counts;  // ordered: subset bits follow sorted names
  for (const TrainInstance& t : instances) {
    if (!t.president) throw MissingPresident(t.id);
    ++counts[*t.president];
  }
  if (counts.size() < 2) throw SinglePresident();
  if (counts.size() > 20)
    throw std::invalid_argument(
        "president-disjoint subset enumeration supports at most 20 distinct presidents");

  std::vector<std::string> names;
  std::vector<std::size_t> sizes;
  for (const auto& [name, n] : counts) {
    names.push_back(name);
    sizes.push_back(n);
  }

  const double total = static_cast<double>(instances.size());
  const double want = 1.0 - target_ratio;
  const std::size_t k = names.size();

  std::uint64_t best_mask = 0;
  double best_err = 0.0;
  bool have_best = false;
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << k); ++mask) {
    std::size_t val_n = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) val_n += sizes[i];
    const double err = std::abs(static_cast<double>(val_n) / total - want);
    if (!have_best) {
      best_mask = mask;
      best_err = err;
      have_best = true;
      continue;
    }
    if (err < best_err - 1e-15) {
      best_mask = mask;
      best_err = err;
      continue;
    }
    if (std::abs(err - best_err) <= 1e-15) {
      const int cur = std::popcount(mask), best = std::popcount(best_mask);
      if (cur < best) {
        best_mask = mask;
      } else if (cur == best) {
        // Names are sorted, so the lexicographically smaller subset is the one
        // whose lowest differing member comes first.
        for (std::size_t i = 0; i < k; ++i) {
          const bool a = mask >> i & 1, b = best_mask >> i & 1;
          if (a != b) {
            if (a) best_mask = mask;
            break;
          }
        }
      }
    }
  }

  std::unordered_set<std::string> val_presidents;
  for (std::size_t i = 0; i < k; ++i)
    if (best_mask >> i & 1) val_presidents.insert(names[i]);

  SplitAssignment out;
  out.regime = SplitRegime::PresidentDisjoint;
  out.seed = 0;
  out.ratio = target_ratio;
  for (const TrainInstance& t : instances)
    (val_presidents.count(*t.president) ? out.val_ids : out.train_ids).push_back(t.id);
  std::sort(out.train_ids.begin(), out.train_ids.end());
  std::sort(out.val_ids.begin(), out.val_ids.end());
  return out;
}

SplitView apply_split(const std::vector<TrainInstance>& instances,
                      const SplitAssignment& assignment) {
  std::unordered_map<std::string, int> side;  // 0 train, 1 val
  for (const std::string& id : assignment.train_ids) side[id] = 0;
  for (const std::string& id : assignment.val_ids) {
    if (!side.emplace(id, 1).second)
      throw std::invalid_argument("split assignment places " + id + " on both sides");
  }
  SplitView view;
  for (const TrainInstance& t : instances) {
    auto it = side.find(t.id);
    if (it == side.end())
      throw std::invalid_argument("instance " + t.id + " missing from split assignment");
    (it->second == 0 ? view.train : view.val).push_back(t);
  }
  return view;
}

}  // namespace clarity
