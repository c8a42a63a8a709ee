#ifndef BDMM_RNG_HPP
#define BDMM_RNG_HPP

#include <cstdint>

namespace bdmm {

// Generator identifier recorded in simulation metadata so sequences can be
// reproduced by other implementations.
inline constexpr const char* kRngId = "splitmix64";

// SplitMix64 (Steele, Lea, Flood 2014). Small state, full 64-bit output,
// deterministic across platforms.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

}  // namespace bdmm

#endif  // BDMM_RNG_HPP
