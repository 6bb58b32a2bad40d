#include "choicealloc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>

#include "parallel.hpp"

namespace choicealloc {

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("CHOICEALLOC_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Uniform on the open interval (0, 1): midpoints of a 2^-53 grid.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_gumbel(std::mt19937_64& rng) { return -std::log(-std::log(open_uniform(rng))); }

struct Tally {
  std::vector<std::uint64_t> locations;
  std::uint64_t opt_out = 0;
};

void run_partition(const std::vector<double>& utilities, std::uint64_t seed, std::uint64_t partition,
                   std::uint64_t draws, Tally& tally) {
  std::mt19937_64 rng(splitmix64(seed + partition * 0x9e3779b97f4a7c15ULL));
  for (std::uint64_t d = 0; d < draws; ++d) {
    double best = standard_gumbel(rng);  // opt-out, utility 0
    std::size_t choice = utilities.size();
    for (std::size_t i = 0; i < utilities.size(); ++i) {
      const double u = utilities[i] + standard_gumbel(rng);
      if (u > best) {
        best = u;
        choice = i;
      }
    }
    if (choice == utilities.size()) {
      ++tally.opt_out;
    } else {
      ++tally.locations[choice];
    }
  }
}

}  // namespace

ChoiceSample sample_choices(const Scenario& scenario, const Allocation& allocation, std::uint64_t draws,
                            std::uint64_t seed, unsigned threads) {
  if (draws == 0) throw InvalidInput("draws: must be at least 1");
  const auto x = flatten(scenario, allocation);
  check_feasible(scenario, x);
  const auto v = utilities(scenario, x);

  const std::uint64_t partitions = (draws + kDrawsPerPartition - 1) / kDrawsPerPartition;
  std::vector<Tally> tallies(partitions, Tally{std::vector<std::uint64_t>(v.size(), 0), 0});
  auto draws_in = [&](std::uint64_t p) {
    return std::min(kDrawsPerPartition, draws - p * kDrawsPerPartition);
  };

  if (threads == 0) threads = default_thread_count();
  detail::parallel_for(static_cast<std::size_t>(partitions), threads,
                       [&](std::size_t p) { run_partition(v, seed, p, draws_in(p), tallies[p]); });

  ChoiceSample sample;
  sample.location_counts.assign(v.size(), 0);
  sample.draws = draws;
  sample.seed = seed;
  for (const auto& t : tallies) {
    for (std::size_t i = 0; i < v.size(); ++i) sample.location_counts[i] += t.locations[i];
    sample.opt_out += t.opt_out;
  }
  return sample;
}

}  // namespace choicealloc
