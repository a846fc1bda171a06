#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sinr {

/// Seeded generator with platform-independent derived distributions (the
/// standard distribution objects are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return p >= 1.0 || uniform() < p; }

  /// Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

  /// k distinct values from [lo, hi], in random order.
  std::vector<std::uint32_t> sample(std::uint32_t lo, std::uint32_t hi, std::size_t k) {
    std::vector<std::uint32_t> pool;
    pool.reserve(hi - lo + 1);
    for (std::uint64_t v = lo; v <= hi; ++v) pool.push_back(static_cast<std::uint32_t>(v));
    if (k > pool.size()) throw std::invalid_argument("sample larger than population");
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + static_cast<std::size_t>(below(pool.size() - i))]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sinr
