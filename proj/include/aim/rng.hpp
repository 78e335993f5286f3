#pragma once

#include <cstdint>

namespace aim {

// SplitMix64 generator. Chosen over <random> engines because estimates must be
// bit-reproducible across platforms and because Monte Carlo samplers need
// cheap counter-derived streams: sample i draws from derive(master, i) without
// generating samples 0..i-1 first.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static Rng derive(std::uint64_t master, std::uint64_t stream) {
    return Rng(mix(master + 0x632be59bd9b4e019ULL) ^ mix(stream * 0x9e3779b97f4a7c15ULL + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace aim
