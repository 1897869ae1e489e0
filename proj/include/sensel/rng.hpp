#pragma once

#include <cmath>
#include <cstdint>

namespace sensel {

// splitmix64: documented generator identity so runs are reproducible
// across platforms and so other implementations can match the streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b,
                              std::uint64_t c = 0) {
  std::uint64_t s = a;
  splitmix64(s);
  s ^= b + 0x9E3779B97F4A7C15ULL;
  splitmix64(s);
  s ^= c + 0xD1B54A32D192ED03ULL;
  return splitmix64(s);
}

// Counter-free stream: splitmix64 core, uniforms in (0,1), Box-Muller
// normals. Entirely self-contained so aggregates are bit-identical for a
// given seed regardless of standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  double uniform() {
    // 53-bit mantissa, open interval
    return (double)((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0;
  bool have_cached_ = false;
};

}  // namespace sensel
