#pragma once

#include <cstdint>
#include <vector>

#include "choicealloc/model.hpp"

namespace choicealloc {

struct ChoiceSample {
  std::vector<std::uint64_t> location_counts;  // scenario order
  std::uint64_t opt_out = 0;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
};

/// Draws handled by one RNG stream. Partition p of a run uses a
/// std::mt19937_64 seeded with splitmix64(seed + p * golden gamma), so the
/// counts depend only on (scenario, allocation, draws, seed), never on the
/// number of worker threads.
inline constexpr std::uint64_t kDrawsPerPartition = 1u << 16;

/// Thief choices under iid standard Gumbel noise (the opt-out alternative has
/// utility 0). Within a draw, noise is sampled for the opt-out first, then for
/// locations in scenario order. `threads == 0` uses default_thread_count().
ChoiceSample sample_choices(const Scenario& scenario, const Allocation& allocation,
                            std::uint64_t draws, std::uint64_t seed, unsigned threads = 0);

/// CHOICEALLOC_THREADS if set to a positive integer, else hardware concurrency.
unsigned default_thread_count();

std::uint64_t splitmix64(std::uint64_t state);

}  // namespace choicealloc
