#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace starsense {

// ---------------------------------------------------------------------------
// Deterministic counter-based randomness. Each (seed, stream) pair yields an
// independent substream, so per-trial / per-shot sampling is reproducible
// regardless of evaluation order or thread count.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  // Substream keyed on (seed, stream): decorrelates consecutive stream ids.
  SplitMix64(std::uint64_t seed, std::uint64_t stream)
      : state_(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t x = (state_ += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Standard-normal draws via Box-Muller; fixed arithmetic keeps sampled
// sequences identical across standard libraries.
class GaussianSampler {
 public:
  explicit GaussianSampler(SplitMix64 engine) : engine_(engine) {}
  GaussianSampler(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - engine_.uniform();  // (0, 1]
    const double u2 = engine_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  SplitMix64 engine_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace starsense
