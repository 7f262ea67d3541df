#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace penh {

/// Deterministic random source. Wraps mt19937_64 but derives uniform and
/// normal variates itself so the draw sequence is fixed by this code, not by
/// the standard library's unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [lo, hi). Degenerate interval returns lo.
  double uniform(double lo, double hi) {
    double u = (engine_() >> 11) * 0x1.0p-53;  // [0,1) with 53 random bits
    return lo + u * (hi - lo);
  }

  /// Gaussian via Box-Muller; the spare variate is cached, so consecutive
  /// calls consume engine output in a reproducible pattern.
  double normal(double mean, double stddev);

  std::string state() const;
  void set_state(const std::string& text);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// FNV-1a over bytes; used to derive per-file seeds from names.
std::uint64_t fnv1a64(std::string_view text);

/// Mixes two seeds into one (splitmix64 finalizer over the xor).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace penh
