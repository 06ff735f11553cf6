#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace obp {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the n-th draw is mix64(key + n * golden), so a
// stream is fully described by (key, counter) and is bit-reproducible
// across platforms. Distributions are implemented here rather than taken
// from <random>, whose algorithms are implementation-defined.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed = 0) noexcept : key_(mix64(seed)) {}

  // Independent child stream, e.g. one per experiment component.
  CounterRng split(std::uint64_t stream) const noexcept {
    CounterRng r;
    r.key_ = mix64(key_ ^ mix64(stream + 0x632be59bd9b4e019ULL));
    return r;
  }

  std::uint64_t next_u64() noexcept {
    return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n > 0. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  double exponential() noexcept { return -std::log1p(-uniform()); }

  double normal() noexcept {
    // Box-Muller; one draw per call keeps the stream position simple.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Dirichlet(1, ..., 1) on k coordinates.
  std::vector<double> dirichlet_flat(std::size_t k) {
    std::vector<double> out(k);
    double total = 0.0;
    for (auto& v : out) {
      v = exponential();
      total += v;
    }
    for (auto& v : out)
      v /= total;
    return out;
  }

  // Index drawn with the given (nonnegative, not necessarily normalized) weights.
  std::size_t categorical(const std::vector<double>& weights) noexcept {
    double total = 0.0;
    for (double w : weights)
      total += w;
    double u = uniform() * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0)
        continue;
      last = i;
      if (u < weights[i])
        return i;
      u -= weights[i];
    }
    return last;
  }

  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

} // namespace obp
