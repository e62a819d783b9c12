#pragma once

#include <cstdint>
#include <random>

namespace mktlab {

/// Independent generator for sub-stream `stream` of a master `seed`. The same
/// (seed, stream) pair always yields the same sequence.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace mktlab
