#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace clarity {

// Pinned shuffle: mt19937_64 (output is fixed by the standard) driving a
// hand-rolled Fisher-Yates, so assignments are identical across platforms
// and toolchains for a given seed. Tagged "mt19937_64/fisher-yates v1" in
// split files; bump the tag if either half ever changes.
inline constexpr const char* kShuffleAlgorithm = "mt19937_64/fisher-yates-v1";

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void fisher_yates_shuffle(std::vector<T>& items, SeededRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace clarity
