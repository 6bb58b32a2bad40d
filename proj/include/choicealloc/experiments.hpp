#pragma once

#include <string>
#include <utility>
#include <vector>

#include "choicealloc/allocator.hpp"
#include "choicealloc/model.hpp"
#include "choicealloc/table.hpp"

namespace choicealloc {

/// The two-site city: locations louvre/eiffel (alpha 6 ln 3, 6 ln 2), central
/// resource "campaign" (beta 1), local resources "cameras" (beta 3) and
/// "billboards" (beta 2), budget 30.
Scenario paris_scenario();
Scenario paris_scenario(double alpha_louvre, double alpha_eiffel);

/// Two locations with alpha 0, a single local resource with beta 4, budget 3.
Scenario symmetric_pair_scenario();

/// Either a list of (a1, a2) attractiveness pairs with a1 + a2 = 10, or a
/// list of factors k that scale every alpha of a base scenario.
struct SweepSpec {
  std::vector<std::pair<double, double>> alpha_pairs;
  std::vector<double> scale_factors;

  /// a1 in {1, 2, ..., 9} plus the extra abscissae 1.5, 1.75, 4.5,
  /// 5.5, 8.25 and 8.5, in ascending order.
  static SweepSpec attractiveness_default();
  static SweepSpec from_alpha1(const std::vector<double>& alpha1);
  /// k in {1, 1.1, 1.2, 1.3, 1.4}
  static SweepSpec scaling_default();
};

/// One row per allocation: every flat entry (columns named by entry label),
/// p_<location> for each location, p_opt_out and p_overall.
ExperimentTable allocation_table(std::string name, const Scenario& scenario,
                                 const std::vector<std::pair<std::string, Allocation>>& rows);

/// Example with x = (1,1) and (2,1) on symmetric_pair_scenario().
ExperimentTable reproduce_table1();

/// OPTIMAL and CLE/CELP at gamma 0.25, 0.5, 0.75 on paris_scenario().
ExperimentTable reproduce_table2();

/// Rows labeled "CLE(0.25)" style for each rule x gamma.
std::vector<std::pair<std::string, Allocation>> heuristic_rows(const Scenario& scenario,
                                                               const std::vector<Rule>& rules,
                                                               const std::vector<double>& gammas);

/// Per (a1, a2) pair: optimal overall probability and the best-gamma CLE and
/// CELP overall probabilities (with the chosen gammas). Base defaults to
/// paris_scenario() and must have exactly two locations.
ExperimentTable attractiveness_sweep(const SweepSpec& spec);
ExperimentTable attractiveness_sweep(const SweepSpec& spec, const Scenario& base,
                                     const std::vector<double>& grid, unsigned threads = 0);

/// Per k: closed-form allocation with alpha scaled by k, overall probability,
/// central/local block totals and per-local-resource totals.
ExperimentTable scaling_table(const SweepSpec& spec);
ExperimentTable scaling_table(const SweepSpec& spec, const Scenario& base);

/// Budget R' at which the closed-form optimum reaches `target_overall`.
/// Uses B(x*(R')) = B(x*(R)) * (R / R')^(sum beta) and then re-solves at R' to
/// confirm the target within 1e-9 (NumericalFailure otherwise).
double budget_for_target(const Scenario& scenario, double target_overall);

/// Per k: budget_for_target on the k-scaled base, and the overall
/// probability re-evaluated there.
ExperimentTable budget_table(const SweepSpec& spec, const Scenario& base, double target_overall);

}  // namespace choicealloc
