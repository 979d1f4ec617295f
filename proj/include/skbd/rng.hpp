#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace skbd {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: draw k of stream (seed, id) is a pure function of (seed, id, k).
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t id)
      : key_(mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ (id * 0xd1b54a32d192ed03ULL + 1))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += bernoulli(p);
    return k;
  }
  std::uint64_t below(std::uint64_t n) {
    // Rejection keeps it unbiased.
    std::uint64_t lim = max() - max() % n;
    std::uint64_t v;
    do v = (*this)(); while (v >= lim);
    return v % n;
  }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace skbd
