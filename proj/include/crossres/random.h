#ifndef CROSSRES_RANDOM_H_
#define CROSSRES_RANDOM_H_

#include <cstdint>
#include <span>
#include <utility>

namespace crossres {

// SplitMix64. Used everywhere a seed is accepted so that results are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n must be positive.
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % n;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Derives an independent stream, e.g. one per tree or per fold.
  Rng fork(uint64_t stream) { return Rng(next() ^ (stream * 0xD1B54A32D192ED03ULL)); }

 private:
  uint64_t state_;
};

}  // namespace crossres

#endif  // CROSSRES_RANDOM_H_
