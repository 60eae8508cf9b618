#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace adactrl {

// splitmix64 finalizer (Steele/Lea/Flood). Used both as the generator step and
// as the mixing function when deriving substreams.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Small counter-based generator. Every consumer owns its own stream, derived
// deterministically from (seed, indices...), so results do not depend on the
// order in which streams are consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Inverse-CDF draw from an explicit probability vector. Probabilities are
  // assumed nonnegative; any mass deficit from rounding falls into the last bin.
  int categorical(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("categorical: empty distribution");
    const double u = uniform01();
    double cum = 0.0;
    for (int k = 0; k < static_cast<int>(probs.size()); ++k) {
      cum += probs[k];
      if (u < cum) return k;
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream id from a seed and up to three indices.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a = 0,
                                   std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64_mix(seed);
  h = splitmix64_mix(h ^ splitmix64_mix(a ^ 0x517cc1b727220a95ULL));
  h = splitmix64_mix(h ^ splitmix64_mix(b ^ 0x2545f4914f6cdd1dULL));
  h = splitmix64_mix(h ^ splitmix64_mix(c ^ 0x9e3779b97f4a7c15ULL));
  return h;
}

}  // namespace adactrl
