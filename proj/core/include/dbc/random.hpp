#pragma once

#include <cstdint>
#include <random>

namespace dbc::random {

using Engine = std::mt19937_64;

/// Independent stream tags so that e.g. weight init never shares draws with shuffling.
enum class Stream : std::uint32_t {
  blobs = 1,
  pairs = 2,
  init = 3,
  shuffle = 4,
  dropout = 5,
};

/// Engine seeded from (master seed, stream, index). Streams for distinct indices are
/// independent of each other and of evaluation order, which is what makes parallel
/// scoring reproduce serial output.
inline Engine stream(std::uint64_t seed, Stream tag, std::uint64_t index = 0) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), static_cast<std::uint32_t>(tag), lo(index), hi(index)};
  return Engine(seq);
}

}  // namespace dbc::random
