#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "choicealloc/errors.hpp"

namespace choicealloc {

/// Entries smaller than this are treated as nonpositive.
inline constexpr double kPositivityFloor = 1e-12;
/// Relative slack on the budget constraint `sum(x) <= R`.
inline constexpr double kBudgetSlack = 1e-9;

struct Location {
  std::string id;
  double alpha = 0.0;  // initial attractiveness, >= 0
};

struct Resource {
  std::string id;
  double beta = 1.0;  // sensitivity, > 0
};

/// Locations, local and central protective resources, and a total budget.
///
/// Construction validates every invariant; an existing Scenario is always
/// well formed. Allocations over a scenario are flattened location-major
/// over local resources first, then central resources:
///
///   [x(0,0) .. x(0,|L|-1), x(1,0) .. x(|N|-1,|L|-1), x_c(0) .. x_c(|C|-1)]
class Scenario {
 public:
  Scenario(std::vector<Location> locations, std::vector<Resource> local_resources,
           std::vector<Resource> central_resources, double budget);

  const std::vector<Location>& locations() const { return locations_; }
  const std::vector<Resource>& local_resources() const { return local_; }
  const std::vector<Resource>& central_resources() const { return central_; }
  double budget() const { return budget_; }

  std::size_t num_locations() const { return locations_.size(); }
  std::size_t num_local() const { return local_.size(); }
  std::size_t num_central() const { return central_.size(); }
  std::size_t num_entries() const { return locations_.size() * local_.size() + central_.size(); }

  std::size_t local_index(std::size_t location, std::size_t resource) const {
    return location * local_.size() + resource;
  }
  std::size_t central_index(std::size_t resource) const {
    return locations_.size() * local_.size() + resource;
  }

  /// Sensitivity of the resource behind flat entry k.
  double entry_beta(std::size_t k) const;
  /// "loc/res" for local entries, the resource id for central ones.
  std::string entry_label(std::size_t k) const;

  double local_beta_sum() const;
  double central_beta_sum() const;
  double beta_sum() const { return local_beta_sum() + central_beta_sum(); }

  std::optional<std::size_t> find_location(std::string_view id) const;

  /// Same structure with a different budget / attractiveness vector.
  Scenario with_budget(double budget) const;
  Scenario with_alphas(std::span<const double> alphas) const;

 private:
  std::vector<Location> locations_;
  std::vector<Resource> local_;
  std::vector<Resource> central_;
  double budget_;
};

struct LocalKey {
  std::string location;
  std::string resource;
  auto operator<=>(const LocalKey&) const = default;
};

/// A budget allocation keyed by resource ids.
struct Allocation {
  std::map<LocalKey, double> local;
  std::map<std::string, double> central;

  bool operator==(const Allocation&) const = default;
};

/// Flattens `allocation` into scenario order. Throws InvalidInput on a key
/// mismatch or an entry below kPositivityFloor.
std::vector<double> flatten(const Scenario& scenario, const Allocation& allocation);
Allocation unflatten(const Scenario& scenario, std::span<const double> x);

/// Throws InvalidInput unless x has the right size and every entry is positive.
void check_positive(const Scenario& scenario, std::span<const double> x);
/// check_positive plus sum(x) <= R (with kBudgetSlack).
void check_feasible(const Scenario& scenario, std::span<const double> x);

struct Evaluation {
  std::vector<double> per_location;  // scenario order
  std::vector<double> utilities;     // V_i(x), scenario order
  double opt_out = 0.0;
  double overall = 0.0;
  double surrogate = 0.0;      // B(x)
  double log_surrogate = 0.0;  // ln B(x), finite even where B over/underflows
};

double deterministic_utility(const Scenario& scenario, std::span<const double> x,
                             std::size_t location);
double deterministic_utility(const Scenario& scenario, const Allocation& allocation,
                             std::string_view location);

/// All utilities V_i(x) in scenario order (these are also ln of B's summands).
std::vector<double> utilities(const Scenario& scenario, std::span<const double> x);

/// Choice probabilities through the logit route, cross-checked against the
/// product-form surrogate. Throws NumericalFailure if the two routes disagree
/// by more than 1e-12 relative.
Evaluation evaluate(const Scenario& scenario, std::span<const double> x);
Evaluation evaluate(const Scenario& scenario, const Allocation& allocation);

double surrogate_B(const Scenario& scenario, std::span<const double> x);
double surrogate_B(const Scenario& scenario, const Allocation& allocation);
double log_surrogate_B(const Scenario& scenario, std::span<const double> x);

/// Gradient of B in flat order.
std::vector<double> gradient_B(const Scenario& scenario, std::span<const double> x);
std::vector<double> gradient_B(const Scenario& scenario, const Allocation& allocation);

/// ln(sum(exp(v))) without overflow. Empty input yields -infinity.
double log_sum_exp(std::span<const double> values);

}  // namespace choicealloc
