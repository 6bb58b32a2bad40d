#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "choicealloc/model.hpp"

namespace choicealloc {

/// Result of an optimal-allocation solve (closed form or numerical).
struct SolveReport {
  Allocation allocation;
  std::vector<double> x;  // same allocation, flat scenario order
  Evaluation evaluation;
  double multiplier = 0.0;             // KKT multiplier; every dB/dx_k equals it at the optimum
  double stationarity_residual = 0.0;  // max_k |dB/dx_k - multiplier|
  int iterations = 0;                  // 0 for the closed form
  bool converged = true;
};

/// Fraction of the budget that goes to central resources, strictly inside (0, 1).
class HeuristicParams {
 public:
  explicit HeuristicParams(double gamma);
  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

enum class Rule { kCle, kCelp };

std::string_view rule_name(Rule rule);
/// Accepts "cle" / "celp" (case-insensitive).
Rule parse_rule(std::string_view name);

/// Exact minimizer of B (and hence of the overall probability).
///
/// Every resource receives a share of R proportional to its beta. Each local
/// resource's share is then split over locations by a softmax of
/// alpha_i / (1 + sum of local betas). Either resource block may be empty.
SolveReport solve_closed_form(const Scenario& scenario);

/// ln|multiplier| of the closed-form optimum, computed without forming it.
double log_abs_closed_form_multiplier(const Scenario& scenario);

/// Central budget gamma*R split equally over central resources, the rest
/// split equally over every (location, local resource) pair.
Allocation cle_rule(const Scenario& scenario, HeuristicParams params);

/// As cle_rule, but each local resource's share is split over locations in
/// proportion to alpha.
Allocation celp_rule(const Scenario& scenario, HeuristicParams params);

Allocation apply_rule(const Scenario& scenario, Rule rule, HeuristicParams params);

/// {0.01, 0.02, ..., 0.99}
std::vector<double> default_gamma_grid();

struct GammaChoice {
  double gamma = 0.0;
  Allocation allocation;
  Evaluation evaluation;
};

/// Grid point with the lowest overall probability; ties go to the smaller gamma.
GammaChoice best_gamma(const Scenario& scenario, Rule rule, std::span<const double> grid);

}  // namespace choicealloc
