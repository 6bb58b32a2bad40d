#include <doctest.h>

#include <cmath>
#include <numeric>

#include "choicealloc/experiments.hpp"
#include "choicealloc/simulate.hpp"

using namespace choicealloc;

namespace {

double frequency(std::uint64_t count, std::uint64_t draws) {
  return static_cast<double>(count) / static_cast<double>(draws);
}

double three_sigma(double p, std::uint64_t draws) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
}

}  // namespace

TEST_CASE("splitmix64 reference output") {
  // First output of the reference generator started from state 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("even split of the symmetric pair: every alternative near 1/3") {
  const auto s = symmetric_pair_scenario();
  const auto a = unflatten(s, std::vector<double>{1.0, 1.0});
  const std::uint64_t draws = 1'000'000;
  const auto sample = sample_choices(s, a, draws, 42);
  CHECK(sample.draws == draws);
  CHECK(sample.seed == 42);
  REQUIRE(sample.location_counts.size() == 2);
  CHECK(sample.location_counts[0] + sample.location_counts[1] + sample.opt_out == draws);
  const double tol = three_sigma(1.0 / 3, draws);
  CHECK(std::abs(frequency(sample.location_counts[0], draws) - 1.0 / 3) <= tol);
  CHECK(std::abs(frequency(sample.location_counts[1], draws) - 1.0 / 3) <= tol);
  CHECK(std::abs(frequency(sample.opt_out, draws) - 1.0 / 3) <= tol);
}

TEST_CASE("skewed split of the symmetric pair") {
  const auto s = symmetric_pair_scenario();
  const auto a = unflatten(s, std::vector<double>{2.0, 1.0});
  const std::uint64_t draws = 1'000'000;
  const auto sample = sample_choices(s, a, draws, 7);
  CHECK(std::abs(frequency(sample.location_counts[0], draws) - 1.0 / 33) <= three_sigma(1.0 / 33, draws));
  CHECK(std::abs(frequency(sample.location_counts[1], draws) - 16.0 / 33) <= three_sigma(16.0 / 33, draws));
}

TEST_CASE("optimal allocation of the two-site city: overall frequency near 1/109") {
  const auto s = paris_scenario();
  const auto a = solve_closed_form(s).allocation;
  const std::uint64_t draws = 1'000'000;
  const auto sample = sample_choices(s, a, draws, 2024);
  const std::uint64_t crimes = std::accumulate(sample.location_counts.begin(), sample.location_counts.end(),
                                               std::uint64_t{0});
  CHECK(std::abs(frequency(crimes, draws) - 1.0 / 109) <= three_sigma(1.0 / 109, draws));

  const auto e = evaluate(s, a);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(frequency(sample.location_counts[i], draws) - e.per_location[i]) <=
          three_sigma(e.per_location[i], draws));
  }
}

TEST_CASE("counts depend on the seed only, not on the thread count") {
  const auto s = paris_scenario();
  const auto a = solve_closed_form(s).allocation;
  const std::uint64_t draws = 3 * kDrawsPerPartition + 12345;
  const auto one = sample_choices(s, a, draws, 99, 1);
  const auto four = sample_choices(s, a, draws, 99, 4);
  const auto again = sample_choices(s, a, draws, 99, 3);
  CHECK(one.location_counts == four.location_counts);
  CHECK(one.opt_out == four.opt_out);
  CHECK(one.location_counts == again.location_counts);

  const auto other = sample_choices(s, a, draws, 100, 4);
  CHECK(other.location_counts != one.location_counts);
}

TEST_CASE("a dominant location takes almost every draw") {
  const Scenario s({{"hot", 40.0}, {"cold", 0.0}}, {{"l", 1.0}}, {}, 2.0);
  const auto a = unflatten(s, std::vector<double>{1.0, 1.0});
  const auto sample = sample_choices(s, a, 100'000, 3);
  CHECK(sample.location_counts[0] == 100'000);
  CHECK(sample.location_counts[1] == 0);
  CHECK(sample.opt_out == 0);
}

TEST_CASE("invalid requests") {
  const auto s = symmetric_pair_scenario();
  const auto a = unflatten(s, std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(sample_choices(s, a, 0, 1), InvalidInput);
  auto over = a;
  over.local[{"1", "patrol"}] = 5.0;
  CHECK_THROWS_AS(sample_choices(s, over, 10, 1), InvalidInput);
}
