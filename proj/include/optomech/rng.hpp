#pragma once

// Deterministic random number generation.
//
// The standard library's normal_distribution is implementation-defined, so
// seeded streams would differ between toolchains. Reproducibility (identical
// seed -> byte-identical output files) is part of this library's contract,
// so the generator (xoshiro256++), the seeding expansion (splitmix64) and
// the Gaussian transform (Box-Muller) are fixed algorithms spelled out here.

#include <cmath>
#include <cstdint>

namespace optomech {

// splitmix64: used to expand a user seed into generator state and to derive
// independent per-trajectory / per-setting stream seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive the seed for substream `index` of a parent seed. Substreams of
// distinct indices are statistically independent for practical purposes.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (index + 1));
  return splitmix64_next(s);
}

// xoshiro256++ (Blackman & Vigna), period 2^256 - 1.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
    have_cached_ = false;
    cached_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1]: 53-bit mantissa, never exactly zero (safe for log).
  double next_open_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; generates in pairs and caches the second.
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_open_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = two_pi_ * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr double two_pi_ = 6.283185307179586476925286766559;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  bool have_cached_;
  double cached_;
};

}  // namespace optomech
