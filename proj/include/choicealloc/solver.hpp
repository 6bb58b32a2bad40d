#pragma once

#include <functional>
#include <optional>
#include <span>

#include "choicealloc/allocator.hpp"
#include "choicealloc/model.hpp"

namespace choicealloc {

struct IterateInfo {
  int iteration = 0;
  std::span<const double> x;
  double surrogate = 0.0;
  double step = 0.0;
};

struct OracleConfig {
  int max_iterations = 100000;
  /// Relative B decrease below which an accepted step counts as stalled.
  double objective_tolerance = 1e-14;
  /// Stop once (max g - min g) / |mean g| falls below this.
  double stationarity_tolerance = 1e-9;
  /// Uniform split of the budget when empty. A custom start is rescaled onto sum(x) = R.
  std::optional<Allocation> initial_point;
  /// Called with every accepted iterate, including the starting point.
  std::function<void(const IterateInfo&)> observer;
};

/// Thrown by solve_numerical when the stopping rule is not met. Carries the
/// last iterate.
class NonConvergence : public NumericalFailure {
 public:
  NonConvergence(const std::string& what, SolveReport report)
      : NumericalFailure(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Numerical minimizer of B over {x > 0, sum(x) = R}.
///
/// Works in u = ln x. Each iteration takes a Newton direction for B on the
/// surface sum(exp(u)) = R, then maps back with x <- R * normalize(x * exp(step * d)),
/// so every iterate is strictly positive and spends the whole budget. The step
/// starts at 1 and halves until B decreases by a sufficient amount; the change
/// in B is evaluated exactly (expm1 of the change in each summand's log) so the
/// test stays reliable at the 1e-16 level near the optimum.
SolveReport solve_numerical(const Scenario& scenario, const OracleConfig& config = {});

/// max_k |g_k - mean(g)| / |mean(g)| for g = grad B at a full-budget allocation.
double kkt_residual(const Scenario& scenario, std::span<const double> x);
double kkt_residual(const Scenario& scenario, const Allocation& allocation);

}  // namespace choicealloc
