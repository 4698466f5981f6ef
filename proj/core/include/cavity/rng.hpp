#pragma once

#include <cmath>
#include <cstdint>

namespace cavity {

// Counter-based generator built on the splitmix64 finalizer. Output depends
// only on (key, call index), so runs are reproducible across platforms and
// independent streams are cheap: derive a fresh key per stream and never
// share generator state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Mixes components into a stream key; used to carve independent
  // substreams out of one user-facing seed.
  static std::uint64_t derive(std::uint64_t a, std::uint64_t b) {
    return mix(a * 0x9E3779B97F4A7C15ull + mix(b) + 0x632BE59BD9B4E019ull);
  }
  static std::uint64_t derive(std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
    return derive(derive(a, b), c);
  }

  std::uint64_t next_u64() {
    return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Log-uniform on [lo, hi], 0 < lo <= hi.
  double log_uniform(double lo, double hi) {
    double u = uniform01();
    return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
  }

  // Uniform on {0, ..., n-1} without modulo bias. n must be positive.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t lim = (0 - n) % n;  // values < lim would bias the modulus
    std::uint64_t v = next_u64();
    while (v < lim) v = next_u64();
    return v % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}
