#pragma once

#include <cstdint>
#include <random>

namespace tow {

using Rng = std::mt19937_64;

// Independent sub-streams of one realization seed. Each consumer draws
// from its own generator so that, e.g., changing the noise model never
// perturbs the sampled instance or targets.
enum class Stream : std::uint32_t {
  kInstance = 1,
  kTargets = 2,
  kNoise = 3,
  kSwitching = 4,
  kInitialGames = 5,
  kValidation = 6,
};

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x746f77u};
  return Rng(seq);
}

}  // namespace tow
