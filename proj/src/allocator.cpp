#include "choicealloc/allocator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace choicealloc {

HeuristicParams::HeuristicParams(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidInput("gamma: must lie strictly between 0 and 1, got " + std::to_string(gamma));
  }
}

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::kCle:
      return "CLE";
    case Rule::kCelp:
      return "CELP";
  }
  return "?";
}

Rule parse_rule(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cle") return Rule::kCle;
  if (lower == "celp") return Rule::kCelp;
  throw InvalidInput("unknown rule '" + std::string(name) + "' (expected cle or celp)");
}

namespace {

// Location shares exp(alpha_i / (1 + sum local beta)) normalized, via max-subtraction.
std::vector<double> location_shares(const Scenario& scenario) {
  const double temperature = 1.0 + scenario.local_beta_sum();
  std::vector<double> scaled(scenario.num_locations());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] = scenario.locations()[i].alpha / temperature;
  }
  const double log_normalizer = log_sum_exp(scaled);
  for (double& s : scaled) s = std::exp(s - log_normalizer);
  return scaled;
}

}  // namespace

double log_abs_closed_form_multiplier(const Scenario& scenario) {
  const double local_sum = scenario.local_beta_sum();
  const double total = scenario.beta_sum();
  std::vector<double> scaled(scenario.num_locations());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] = scenario.locations()[i].alpha / (1.0 + local_sum);
  }
  double beta_log_beta = 0.0;
  for (const auto& r : scenario.local_resources()) beta_log_beta += r.beta * std::log(r.beta);
  for (const auto& r : scenario.central_resources()) beta_log_beta += r.beta * std::log(r.beta);
  return (1.0 + local_sum) * log_sum_exp(scaled) + (1.0 + total) * std::log(total) -
         (1.0 + total) * std::log(scenario.budget()) - beta_log_beta;
}

SolveReport solve_closed_form(const Scenario& scenario) {
  const double total = scenario.beta_sum();
  const double budget = scenario.budget();
  std::vector<double> x(scenario.num_entries());
  for (std::size_t j = 0; j < scenario.num_central(); ++j) {
    x[scenario.central_index(j)] = scenario.central_resources()[j].beta / total * budget;
  }
  if (scenario.num_local() > 0) {
    const auto shares = location_shares(scenario);
    for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
      for (std::size_t j = 0; j < scenario.num_local(); ++j) {
        x[scenario.local_index(i, j)] =
            scenario.local_resources()[j].beta / total * budget * shares[i];
      }
    }
  }

  SolveReport report;
  report.evaluation = evaluate(scenario, x);
  report.multiplier = -std::exp(log_abs_closed_form_multiplier(scenario));
  const auto g = gradient_B(scenario, x);
  for (double gk : g) {
    report.stationarity_residual = std::max(report.stationarity_residual, std::abs(gk - report.multiplier));
  }
  report.allocation = unflatten(scenario, x);
  report.x = std::move(x);
  return report;
}

namespace {

void require_both_blocks(const Scenario& scenario, Rule rule) {
  if (scenario.num_central() == 0 || scenario.num_local() == 0) {
    throw InvalidInput(std::string(rule_name(rule)) +
                       " rule needs at least one central and one local resource");
  }
}

}  // namespace

Allocation cle_rule(const Scenario& scenario, HeuristicParams params) {
  require_both_blocks(scenario, Rule::kCle);
  const double budget = scenario.budget();
  const double central_each = params.gamma() * budget / static_cast<double>(scenario.num_central());
  const double local_each = (1.0 - params.gamma()) * budget /
                            static_cast<double>(scenario.num_local() * scenario.num_locations());
  std::vector<double> x(scenario.num_entries(), local_each);
  for (std::size_t j = 0; j < scenario.num_central(); ++j) x[scenario.central_index(j)] = central_each;
  return unflatten(scenario, x);
}

Allocation celp_rule(const Scenario& scenario, HeuristicParams params) {
  require_both_blocks(scenario, Rule::kCelp);
  double alpha_total = 0.0;
  for (const auto& loc : scenario.locations()) alpha_total += loc.alpha;
  if (!(alpha_total > 0.0)) {
    throw InvalidInput("CELP rule needs at least one location with alpha > 0");
  }
  const double budget = scenario.budget();
  const double central_each = params.gamma() * budget / static_cast<double>(scenario.num_central());
  const double per_resource = (1.0 - params.gamma()) * budget / static_cast<double>(scenario.num_local());
  std::vector<double> x(scenario.num_entries());
  for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
    const double share = scenario.locations()[i].alpha / alpha_total;
    for (std::size_t j = 0; j < scenario.num_local(); ++j) {
      x[scenario.local_index(i, j)] = per_resource * share;
    }
  }
  for (std::size_t j = 0; j < scenario.num_central(); ++j) x[scenario.central_index(j)] = central_each;
  // A location with alpha = 0 gets a zero share, which is outside the open domain.
  check_positive(scenario, x);
  return unflatten(scenario, x);
}

Allocation apply_rule(const Scenario& scenario, Rule rule, HeuristicParams params) {
  return rule == Rule::kCle ? cle_rule(scenario, params) : celp_rule(scenario, params);
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid;
  grid.reserve(99);
  for (int k = 1; k <= 99; ++k) grid.push_back(k / 100.0);
  return grid;
}

GammaChoice best_gamma(const Scenario& scenario, Rule rule, std::span<const double> grid) {
  if (grid.empty()) throw InvalidInput("gamma grid: must be nonempty");
  std::optional<GammaChoice> best;
  for (double gamma : grid) {
    auto allocation = apply_rule(scenario, rule, HeuristicParams(gamma));
    auto evaluation = evaluate(scenario, allocation);
    const bool better =
        !best || evaluation.overall < best->evaluation.overall ||
        (evaluation.overall == best->evaluation.overall && gamma < best->gamma);
    if (better) best = GammaChoice{gamma, std::move(allocation), std::move(evaluation)};
  }
  return *best;
}

}  // namespace choicealloc
