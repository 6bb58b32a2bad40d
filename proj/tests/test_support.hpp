#pragma once

// Shared generators and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "choicealloc/model.hpp"

namespace choicealloc::testing {

struct RandomScenarioLimits {
  std::size_t max_locations = 5;
  std::size_t max_local = 3;
  std::size_t max_central = 2;
  double alpha_lo = 0.0, alpha_hi = 8.0;
  double beta_lo = 0.5, beta_hi = 4.0;
  double budget_lo = 1.0, budget_hi = 100.0;
};

inline Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioLimits& lim = {}) {
  std::uniform_int_distribution<std::size_t> n_loc(1, lim.max_locations);
  std::uniform_int_distribution<std::size_t> n_local(0, lim.max_local);
  std::uniform_int_distribution<std::size_t> n_central(0, lim.max_central);
  std::uniform_real_distribution<double> alpha(lim.alpha_lo, lim.alpha_hi);
  std::uniform_real_distribution<double> beta(lim.beta_lo, lim.beta_hi);
  std::uniform_real_distribution<double> budget(lim.budget_lo, lim.budget_hi);

  std::size_t locals = n_local(rng);
  std::size_t centrals = n_central(rng);
  if (locals + centrals == 0) (rng() % 2 ? locals : centrals) = 1;

  std::vector<Location> locations;
  for (std::size_t i = 0, n = n_loc(rng); i < n; ++i) locations.push_back({"n" + std::to_string(i), alpha(rng)});
  std::vector<Resource> local, central;
  for (std::size_t j = 0; j < locals; ++j) local.push_back({"l" + std::to_string(j), beta(rng)});
  for (std::size_t j = 0; j < centrals; ++j) central.push_back({"c" + std::to_string(j), beta(rng)});
  return Scenario(std::move(locations), std::move(local), std::move(central), budget(rng));
}

/// Strictly positive allocation spending `fraction` of the budget.
inline std::vector<double> random_allocation(std::mt19937_64& rng, const Scenario& s, double fraction = 1.0) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<double> x(s.num_entries());
  double total = 0.0;
  for (double& v : x) total += (v = weight(rng));
  for (double& v : x) v *= fraction * s.budget() / total;
  return x;
}

/// B evaluated straight from its definition in extended precision, with its
/// own loops over keys.
inline long double reference_B_ld(const Scenario& s, const Allocation& a) {
  long double total = 0.0L;
  for (const auto& loc : s.locations()) {
    long double denominator = 1.0L;
    for (const auto& r : s.central_resources()) {
      denominator *= std::pow(static_cast<long double>(a.central.at(r.id)), static_cast<long double>(r.beta));
    }
    for (const auto& r : s.local_resources()) {
      denominator *= std::pow(static_cast<long double>(a.local.at({loc.id, r.id})), static_cast<long double>(r.beta));
    }
    total += std::exp(static_cast<long double>(loc.alpha)) / denominator;
  }
  return total;
}

inline double reference_B(const Scenario& s, const Allocation& a) {
  return static_cast<double>(reference_B_ld(s, a));
}

inline double reference_B(const Scenario& s, const std::vector<double>& x) {
  return reference_B(s, unflatten(s, x));
}

/// Central finite-difference gradient of reference_B with step h_k = rel * x_k.
inline std::vector<double> finite_difference_gradient(const Scenario& s, const std::vector<double>& x,
                                                      double rel = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double h = rel * x[k];
    auto up = x, down = x;
    up[k] += h;
    down[k] -= h;
    const long double diff = reference_B_ld(s, unflatten(s, up)) - reference_B_ld(s, unflatten(s, down));
    g[k] = static_cast<double>(diff / static_cast<long double>(up[k] - down[k]));
  }
  return g;
}

/// Reference values checked into tests/golden: '#' lines are comments, the
/// first remaining line is the header, empty cells read as NaN.
struct Golden {
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<double>>> rows;

  double at(const std::string& label, const std::string& column) const {
    const auto c = std::find(columns.begin(), columns.end(), column);
    if (c == columns.end()) throw std::out_of_range("golden column " + column);
    for (const auto& [l, values] : rows) {
      if (l == label) return values.at(static_cast<std::size_t>(c - columns.begin()));
    }
    throw std::out_of_range("golden row " + label);
  }
};

inline Golden read_golden(const std::string& name) {
  std::ifstream in(std::string(CHOICEALLOC_GOLDEN_DIR) + "/" + name);
  if (!in) throw std::runtime_error("cannot open golden file " + name);
  Golden golden;
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (header) {
      golden.columns.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    std::vector<double> values;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      values.push_back(cells[c].empty() ? std::nan("") : std::stod(cells[c]));
    }
    values.resize(golden.columns.size(), std::nan(""));
    golden.rows.emplace_back(cells.front(), std::move(values));
  }
  return golden;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace choicealloc::testing
