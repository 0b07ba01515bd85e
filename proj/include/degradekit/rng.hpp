#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace degradekit {

// Seeded stream used for every random draw in the library. mt19937_64 is
// bit-specified by the standard, and the uniform/gaussian mappings below are
// spelled out explicitly, so a given seed yields the same stream on every
// platform this builds on.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal, Box-Muller; generates a pair and caches the second.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// 64-bit FNV-1a, used for record keys, split assignment and manifest hashes.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis);

}  // namespace degradekit
