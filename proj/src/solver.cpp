#include "choicealloc/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace choicealloc {

namespace {

constexpr double kMinStep = 1e-30;
constexpr int kStallLimit = 50;
constexpr double kArmijo = 1e-4;

void check_full_budget(const Scenario& scenario, std::span<const double> x) {
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (std::abs(total - scenario.budget()) > kBudgetSlack * scenario.budget()) {
    throw InvalidInput("allocation: total " + std::to_string(total) +
                       " does not use the full budget " + std::to_string(scenario.budget()));
  }
}

void rescale_to_budget(std::vector<double>& x, double budget) {
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v *= budget / total;
}

double relative_spread(std::span<const double> g) {
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
  return (*hi - *lo) / std::abs(mean);
}

// Summands of B scaled by exp(-max V), so nothing overflows. Every quantity the
// iteration compares is homogeneous in this common factor.
std::vector<double> scaled_terms(const Scenario& scenario, std::span<const double> x) {
  auto v = utilities(scenario, x);
  const double peak = *std::max_element(v.begin(), v.end());
  for (double& t : v) t = std::exp(t - peak);
  return v;
}

// Entries of x whose log appears in summand i, each with its beta.
std::vector<std::vector<std::pair<std::size_t, double>>> summand_support(const Scenario& scenario) {
  std::vector<std::vector<std::pair<std::size_t, double>>> support(scenario.num_locations());
  for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
    for (std::size_t j = 0; j < scenario.num_local(); ++j) {
      support[i].emplace_back(scenario.local_index(i, j), scenario.local_resources()[j].beta);
    }
    for (std::size_t j = 0; j < scenario.num_central(); ++j) {
      support[i].emplace_back(scenario.central_index(j), scenario.central_resources()[j].beta);
    }
  }
  return support;
}

SolveReport make_report(const Scenario& scenario, std::vector<double> x, int iterations, bool converged) {
  SolveReport report;
  report.evaluation = evaluate(scenario, x);
  const auto g = gradient_B(scenario, x);
  report.multiplier = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
  for (double gk : g) {
    report.stationarity_residual = std::max(report.stationarity_residual, std::abs(gk - report.multiplier));
  }
  report.allocation = unflatten(scenario, x);
  report.x = std::move(x);
  report.iterations = iterations;
  report.converged = converged;
  return report;
}

}  // namespace

SolveReport solve_numerical(const Scenario& scenario, const OracleConfig& config) {
  if (config.max_iterations <= 0) throw InvalidInput("max_iterations: must be positive");
  if (!(config.objective_tolerance > 0.0) || !(config.stationarity_tolerance > 0.0)) {
    throw InvalidInput("oracle tolerances: must be positive");
  }

  const double budget = scenario.budget();
  const std::size_t n = scenario.num_entries();
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<double> x;
  if (config.initial_point) {
    x = flatten(scenario, *config.initial_point);
    rescale_to_budget(x, budget);
  } else {
    x.assign(n, budget / static_cast<double>(n));
  }

  const auto support = summand_support(scenario);
  std::vector<double> step_log(n);  // ln x_new - ln x
  std::vector<double> candidate(n);
  int stalled = 0;
  double best_spread = std::numeric_limits<double>::infinity();
  if (config.observer) config.observer({0, x, surrogate_B(scenario, x), 1.0});

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    const auto terms = scaled_terms(scenario, x);
    const double total_terms = std::accumulate(terms.begin(), terms.end(), 0.0);

    // Gradient and Hessian of B in u = ln x:
    //   dB/du_k = -sum_i t_i a_ik,  d2B/du_k du_l = sum_i t_i a_ik a_il.
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 0; i < support.size(); ++i) {
      for (const auto& [k, bk] : support[i]) {
        grad(static_cast<Eigen::Index>(k)) -= terms[i] * bk;
        for (const auto& [l, bl] : support[i]) {
          hess(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) += terms[i] * bk * bl;
        }
      }
    }

    std::vector<double> g(n);  // dB/dx in the same scaled units
    for (std::size_t k = 0; k < n; ++k) g[k] = grad(static_cast<Eigen::Index>(k)) / x[k];
    const double spread = n == 1 ? 0.0 : relative_spread(g);
    if (spread <= config.stationarity_tolerance) {
      return make_report(scenario, std::move(x), iteration - 1, true);
    }
    // Near the optimum B flattens quadratically, so a tiny decrease only counts
    // as a stall when the gradient spread stopped shrinking too.
    const bool spread_improved = spread < best_spread;
    best_spread = std::min(best_spread, spread);

    // Newton direction on the budget surface sum(exp(u)) = R. The Lagrangian
    // Hessian adds |lambda| diag(x), which makes it positive definite.
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim);
    const double lambda = std::abs(grad.sum()) / budget;
    hess.diagonal() += lambda * xv;
    const Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) {
      throw NonConvergence("numerical oracle: singular Newton system at iteration " + std::to_string(iteration),
                           make_report(scenario, std::move(x), iteration, false));
    }
    const Eigen::VectorXd h_grad = llt.solve(grad);
    const Eigen::VectorXd h_x = llt.solve(xv);
    const double nu = -xv.dot(h_grad) / xv.dot(h_x);
    const Eigen::VectorXd direction = -(h_grad + nu * h_x);
    // -grad . direction written as a squared norm, so its sign survives rounding.
    const double decrement = llt.matrixL().solve(grad + nu * xv).squaredNorm();

    double step = 1.0;
    bool accepted = false;
    while (!accepted && step >= kMinStep) {
      // log of the renormalizer: ln(sum_k (x_k / R) exp(step * d_k))
      double shift_arg = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        shift_arg += x[k] / budget * std::expm1(step * direction(static_cast<Eigen::Index>(k)));
      }
      const double shift = std::log1p(shift_arg);
      for (std::size_t k = 0; k < n; ++k) step_log[k] = step * direction(static_cast<Eigen::Index>(k)) - shift;

      // Change of B, summand by summand: t_i * expm1(-sum_k a_ik * step_log_k).
      double delta = 0.0;
      for (std::size_t i = 0; i < support.size(); ++i) {
        double change = 0.0;
        for (const auto& [k, bk] : support[i]) change -= bk * step_log[k];
        delta += terms[i] * std::expm1(change);
      }

      for (std::size_t k = 0; k < n; ++k) candidate[k] = x[k] * std::exp(step_log[k]);
      const bool positive = std::all_of(candidate.begin(), candidate.end(),
                                        [](double v) { return v >= kPositivityFloor && std::isfinite(v); });
      if (positive && std::isfinite(delta) && delta <= 0.0 && delta <= -kArmijo * step * decrement) {
        accepted = true;
        stalled = (-delta / total_terms < config.objective_tolerance && !spread_improved) ? stalled + 1 : 0;
        rescale_to_budget(candidate, budget);
        x.swap(candidate);
        if (config.observer) config.observer({iteration, x, surrogate_B(scenario, x), step});
      } else {
        step *= 0.5;
      }
    }

    if (!accepted || stalled >= kStallLimit) {
      auto report = make_report(scenario, std::move(x), iteration, false);
      const auto final_spread = relative_spread(gradient_B(scenario, report.x));
      if (final_spread <= config.stationarity_tolerance) {
        report.converged = true;
        return report;
      }
      throw NonConvergence("numerical oracle stalled at iteration " + std::to_string(iteration) +
                               " with relative gradient spread " + std::to_string(final_spread),
                           std::move(report));
    }
  }

  const auto g = gradient_B(scenario, x);
  if (relative_spread(g) <= config.stationarity_tolerance) {
    return make_report(scenario, std::move(x), config.max_iterations, true);
  }
  throw NonConvergence("numerical oracle did not converge within " +
                           std::to_string(config.max_iterations) + " iterations",
                       make_report(scenario, std::move(x), config.max_iterations, false));
}

double kkt_residual(const Scenario& scenario, std::span<const double> x) {
  check_positive(scenario, x);
  check_full_budget(scenario, x);
  const auto g = gradient_B(scenario, x);
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
  double worst = 0.0;
  for (double gk : g) worst = std::max(worst, std::abs(gk - mean));
  return worst / std::abs(mean);
}

double kkt_residual(const Scenario& scenario, const Allocation& allocation) {
  return kkt_residual(scenario, flatten(scenario, allocation));
}

}  // namespace choicealloc
