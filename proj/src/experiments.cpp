#include "choicealloc/experiments.hpp"

#include <cmath>

#include "choicealloc/simulate.hpp"
#include "parallel.hpp"

namespace choicealloc {

namespace {

constexpr double kPairTotal = 10.0;
constexpr double kTargetCheck = 1e-9;

std::vector<double> scaled_alphas(const Scenario& base, double k) {
  std::vector<double> alphas;
  alphas.reserve(base.num_locations());
  for (const auto& loc : base.locations()) alphas.push_back(k * loc.alpha);
  return alphas;
}

}  // namespace

Scenario paris_scenario() { return paris_scenario(6.0 * std::log(3.0), 6.0 * std::log(2.0)); }

Scenario paris_scenario(double alpha_louvre, double alpha_eiffel) {
  return Scenario({{"louvre", alpha_louvre}, {"eiffel", alpha_eiffel}},
                  {{"cameras", 3.0}, {"billboards", 2.0}}, {{"campaign", 1.0}}, 30.0);
}

Scenario symmetric_pair_scenario() {
  return Scenario({{"1", 0.0}, {"2", 0.0}}, {{"patrol", 4.0}}, {}, 3.0);
}

SweepSpec SweepSpec::attractiveness_default() {
  return from_alpha1({1, 1.5, 1.75, 2, 3, 4, 4.5, 5, 5.5, 6, 7, 8, 8.25, 8.5, 9});
}

SweepSpec SweepSpec::from_alpha1(const std::vector<double>& alpha1) {
  SweepSpec spec;
  for (double a1 : alpha1) spec.alpha_pairs.emplace_back(a1, kPairTotal - a1);
  return spec;
}

SweepSpec SweepSpec::scaling_default() { return SweepSpec{{}, {1.0, 1.1, 1.2, 1.3, 1.4}}; }

ExperimentTable allocation_table(std::string name, const Scenario& scenario,
                                 const std::vector<std::pair<std::string, Allocation>>& rows) {
  std::vector<std::string> columns;
  for (std::size_t k = 0; k < scenario.num_entries(); ++k) columns.push_back(scenario.entry_label(k));
  for (const auto& loc : scenario.locations()) columns.push_back("p_" + loc.id);
  columns.push_back("p_opt_out");
  columns.push_back("p_overall");

  ExperimentTable table(std::move(name), std::move(columns));
  for (const auto& [label, allocation] : rows) {
    auto values = flatten(scenario, allocation);
    const auto e = evaluate(scenario, values);
    values.insert(values.end(), e.per_location.begin(), e.per_location.end());
    values.push_back(e.opt_out);
    values.push_back(e.overall);
    table.add_row(label, std::move(values));
  }
  return table;
}

ExperimentTable reproduce_table1() {
  const auto scenario = symmetric_pair_scenario();
  const std::vector<double> even{1.0, 1.0};
  const std::vector<double> skewed{2.0, 1.0};
  return allocation_table("table1", scenario,
                          {{"(1,1)", unflatten(scenario, even)}, {"(2,1)", unflatten(scenario, skewed)}});
}

std::vector<std::pair<std::string, Allocation>> heuristic_rows(const Scenario& scenario,
                                                               const std::vector<Rule>& rules,
                                                               const std::vector<double>& gammas) {
  std::vector<std::pair<std::string, Allocation>> rows;
  for (Rule rule : rules) {
    for (double gamma : gammas) {
      rows.emplace_back(std::string(rule_name(rule)) + "(" + format_double(gamma) + ")",
                        apply_rule(scenario, rule, HeuristicParams(gamma)));
    }
  }
  return rows;
}

ExperimentTable reproduce_table2() {
  const auto scenario = paris_scenario();
  std::vector<std::pair<std::string, Allocation>> rows{{"OPTIMAL", solve_closed_form(scenario).allocation}};
  for (auto& row : heuristic_rows(scenario, {Rule::kCle, Rule::kCelp}, {0.25, 0.5, 0.75})) {
    rows.push_back(std::move(row));
  }
  return allocation_table("table2", scenario, rows);
}

ExperimentTable attractiveness_sweep(const SweepSpec& spec) {
  return attractiveness_sweep(spec, paris_scenario(), default_gamma_grid());
}

ExperimentTable attractiveness_sweep(const SweepSpec& spec, const Scenario& base,
                                     const std::vector<double>& grid, unsigned threads) {
  if (spec.alpha_pairs.empty()) throw InvalidInput("sweep: alpha_pairs must be nonempty");
  if (base.num_locations() != 2) throw InvalidInput("sweep: base scenario must have exactly two locations");
  for (const auto& [a1, a2] : spec.alpha_pairs) {
    if (std::abs(a1 + a2 - kPairTotal) > 1e-12 * kPairTotal) {
      throw InvalidInput("sweep: pair (" + format_double(a1) + ", " + format_double(a2) +
                         ") does not sum to 10");
    }
  }

  const std::size_t n = spec.alpha_pairs.size();
  std::vector<std::vector<double>> results(n);
  detail::parallel_for(n, threads == 0 ? default_thread_count() : threads, [&](std::size_t r) {
    const auto [a1, a2] = spec.alpha_pairs[r];
    const std::vector<double> alphas{a1, a2};
    const auto scenario = base.with_alphas(alphas);
    const auto optimal = solve_closed_form(scenario);
    const auto cle = best_gamma(scenario, Rule::kCle, grid);
    const auto celp = best_gamma(scenario, Rule::kCelp, grid);
    results[r] = {a1, a2, optimal.evaluation.overall, cle.evaluation.overall, cle.gamma,
                  celp.evaluation.overall, celp.gamma};
  });

  ExperimentTable table("attractiveness_sweep",
                        {"a1", "a2", "optimal", "cle", "cle_gamma", "celp", "celp_gamma"});
  for (std::size_t r = 0; r < n; ++r) table.add_row(format_double(spec.alpha_pairs[r].first), results[r]);
  return table;
}

ExperimentTable scaling_table(const SweepSpec& spec) { return scaling_table(spec, paris_scenario()); }

ExperimentTable scaling_table(const SweepSpec& spec, const Scenario& base) {
  if (spec.scale_factors.empty()) throw InvalidInput("scale: scale_factors must be nonempty");
  std::vector<std::string> columns{"k"};
  for (std::size_t k = 0; k < base.num_entries(); ++k) columns.push_back(base.entry_label(k));
  columns.insert(columns.end(), {"p_overall", "central_total", "local_total"});
  for (const auto& r : base.local_resources()) columns.push_back("total_" + r.id);

  ExperimentTable table("scaling", std::move(columns));
  for (double k : spec.scale_factors) {
    if (!(k >= 0.0)) throw InvalidInput("scale: factor " + format_double(k) + " must be >= 0");
    const auto scenario = base.with_alphas(scaled_alphas(base, k));
    const auto report = solve_closed_form(scenario);
    std::vector<double> values{k};
    values.insert(values.end(), report.x.begin(), report.x.end());
    values.push_back(report.evaluation.overall);

    double central_total = 0.0;
    for (std::size_t j = 0; j < scenario.num_central(); ++j) central_total += report.x[scenario.central_index(j)];
    std::vector<double> per_resource(scenario.num_local(), 0.0);
    for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
      for (std::size_t j = 0; j < scenario.num_local(); ++j) per_resource[j] += report.x[scenario.local_index(i, j)];
    }
    double local_total = 0.0;
    for (double t : per_resource) local_total += t;
    values.push_back(central_total);
    values.push_back(local_total);
    values.insert(values.end(), per_resource.begin(), per_resource.end());
    table.add_row(format_double(k), std::move(values));
  }
  return table;
}

double budget_for_target(const Scenario& scenario, double target_overall) {
  if (!(target_overall > 0.0 && target_overall < 1.0)) {
    throw InvalidInput("target: overall probability must lie strictly between 0 and 1");
  }
  const auto current = solve_closed_form(scenario);
  // ln B_target = ln(p / (1 - p))
  const double log_b_target = std::log(target_overall) - std::log1p(-target_overall);
  const double budget =
      scenario.budget() * std::exp((current.evaluation.log_surrogate - log_b_target) / scenario.beta_sum());

  const auto check = solve_closed_form(scenario.with_budget(budget));
  if (std::abs(check.evaluation.overall - target_overall) > kTargetCheck) {
    throw NumericalFailure("budget_for_target: re-solve at R' = " + format_double(budget) +
                           " gives " + format_double(check.evaluation.overall));
  }
  return budget;
}

ExperimentTable budget_table(const SweepSpec& spec, const Scenario& base, double target_overall) {
  if (spec.scale_factors.empty()) throw InvalidInput("budget-for: scale_factors must be nonempty");
  ExperimentTable table("budget_for_target", {"k", "budget", "p_overall"});
  for (double k : spec.scale_factors) {
    const auto scenario = base.with_alphas(scaled_alphas(base, k));
    const double budget = budget_for_target(scenario, target_overall);
    const auto check = solve_closed_form(scenario.with_budget(budget));
    table.add_row(format_double(k), {k, budget, check.evaluation.overall});
  }
  return table;
}

}  // namespace choicealloc
