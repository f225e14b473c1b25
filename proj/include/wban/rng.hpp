// Deterministic per-subsystem random streams. Each subsystem derives its own
// engine from (user seed, stream id) so enabling or reordering one consumer
// never shifts the draws seen by another.
#pragma once

#include <cstdint>
#include <random>

namespace wban {

enum class Stream : std::uint64_t {
  mobility = 1,
  onbody_fading = 2,
  interlink_fading = 3,
  backoff_draws = 4,
  payload_rotation = 5,
  delivery_draws = 6,
  instance_gen = 7,
  search_starts = 8,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream,
                                std::uint64_t index = 0) {
  // seed_seq holds 32-bit words; split the wide inputs so no bits are lost.
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

} // namespace wban
