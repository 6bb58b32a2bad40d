#include "choicealloc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <CLI11.hpp>

#include "choicealloc/allocator.hpp"
#include "choicealloc/experiments.hpp"
#include "choicealloc/scenario_file.hpp"
#include "choicealloc/simulate.hpp"
#include "choicealloc/solver.hpp"
#include "choicealloc/table.hpp"

namespace choicealloc::cli {

namespace {

struct Options {
  std::string output = "csv";
  double tolerance = 1e-6;
  std::string file;
  std::string allocation;
  std::vector<std::string> rules{"cle", "celp"};
  std::string gamma = "grid";
  std::vector<double> alpha1;
  std::vector<double> k;
  double target = 0.0;
  std::uint64_t draws = 1000000;
  std::uint64_t seed = 0;
};

void emit(const ExperimentTable& table, const Options& opts, std::ostream& out,
          const nlohmann::json& extra = nlohmann::json::object()) {
  if (opts.output == "json") {
    auto doc = table.to_json();
    for (const auto& [key, value] : extra.items()) doc[key] = value;
    out << doc.dump(2) << "\n";
  } else {
    out << table.to_csv();
  }
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw InvalidInput(std::string(what) + ": list is empty");
  return values;
}

Allocation named_allocation(const ScenarioFile& file, const std::string& name) {
  if (name == "optimal") return solve_closed_form(file.scenario).allocation;
  const auto it = file.allocations.find(name);
  if (it == file.allocations.end()) {
    throw InvalidInput("allocation '" + name + "' not found in scenario file (use 'optimal' or one of its allocations)");
  }
  return it->second;
}

int cmd_solve(const Options& opts, std::ostream& out) {
  const auto file = load_scenario(opts.file);
  const auto report = solve_closed_form(file.scenario);
  emit(allocation_table("solve", file.scenario, {{"OPTIMAL", report.allocation}}), opts, out,
       {{"multiplier", report.multiplier}, {"stationarity_residual", report.stationarity_residual}});
  return kOk;
}

int cmd_evaluate(const Options& opts, std::ostream& out) {
  const auto file = load_scenario(opts.file);
  const auto allocation = named_allocation(file, opts.allocation);
  emit(allocation_table("evaluate", file.scenario, {{opts.allocation, allocation}}), opts, out,
       {{"surrogate", surrogate_B(file.scenario, allocation)}});
  return kOk;
}

int cmd_compare(const Options& opts, std::ostream& out) {
  const auto file = load_scenario(opts.file);
  std::vector<Rule> rules;
  for (const auto& r : opts.rules) rules.push_back(parse_rule(r));
  if (opts.gamma == "grid") {
    const auto grid = default_gamma_grid();
    std::vector<std::pair<std::string, Allocation>> rows;
    for (Rule rule : rules) {
      auto best = best_gamma(file.scenario, rule, grid);
      rows.emplace_back(std::string(rule_name(rule)) + "(" + format_double(best.gamma) + ")",
                        std::move(best.allocation));
    }
    emit(allocation_table("compare", file.scenario, rows), opts, out);
  } else {
    const auto gammas = parse_number_list(opts.gamma, "--gamma");
    emit(allocation_table("compare", file.scenario, heuristic_rows(file.scenario, rules, gammas)), opts, out);
  }
  return kOk;
}

int cmd_sweep(const Options& opts, std::ostream& out) {
  const auto file = load_scenario(opts.file);
  const auto spec = opts.alpha1.empty() ? SweepSpec::attractiveness_default() : SweepSpec::from_alpha1(opts.alpha1);
  emit(attractiveness_sweep(spec, file.scenario, default_gamma_grid()), opts, out);
  return kOk;
}

int cmd_scale(const Options& opts, std::ostream& out) {
  const auto file = load_scenario(opts.file);
  SweepSpec spec = opts.k.empty() ? SweepSpec::scaling_default() : SweepSpec{{}, opts.k};
  emit(scaling_table(spec, file.scenario), opts, out);
  return kOk;
}

int cmd_budget_for(const Options& opts, std::ostream& out) {
  const auto file = load_scenario(opts.file);
  SweepSpec spec{{}, opts.k.empty() ? std::vector<double>{1.0} : opts.k};
  emit(budget_table(spec, file.scenario, opts.target), opts, out);
  return kOk;
}

int cmd_simulate(const Options& opts, std::ostream& out) {
  const auto file = load_scenario(opts.file);
  const auto allocation = named_allocation(file, opts.allocation);
  const auto sample = sample_choices(file.scenario, allocation, opts.draws, opts.seed);
  const auto analytic = evaluate(file.scenario, allocation);

  std::vector<std::string> columns;
  for (const auto& loc : file.scenario.locations()) columns.push_back(loc.id);
  columns.push_back("opt_out");
  ExperimentTable table("simulate", columns);
  std::vector<double> counts(sample.location_counts.begin(), sample.location_counts.end());
  counts.push_back(static_cast<double>(sample.opt_out));
  std::vector<double> frequencies;
  for (double c : counts) frequencies.push_back(c / static_cast<double>(sample.draws));
  std::vector<double> probabilities = analytic.per_location;
  probabilities.push_back(analytic.opt_out);
  table.add_row("count", std::move(counts));
  table.add_row("frequency", std::move(frequencies));
  table.add_row("probability", std::move(probabilities));
  emit(table, opts, out, {{"draws", sample.draws}, {"seed", sample.seed}});
  return kOk;
}

int cmd_verify(const Options& opts, std::ostream& out, std::ostream& err) {
  const auto file = load_scenario(opts.file);
  const auto closed = solve_closed_form(file.scenario);
  const auto numerical = solve_numerical(file.scenario);

  ExperimentTable table("verify", {"closed_form", "numerical", "relative_difference"});
  double worst = 0.0;
  for (std::size_t k = 0; k < closed.x.size(); ++k) {
    const double diff = std::abs(closed.x[k] - numerical.x[k]) / std::abs(closed.x[k]);
    worst = std::max(worst, diff);
    table.add_row(file.scenario.entry_label(k), {closed.x[k], numerical.x[k], diff});
  }
  const double b_closed = closed.evaluation.surrogate;
  const double b_numerical = numerical.evaluation.surrogate;
  const double b_diff = (b_numerical - b_closed) / b_closed;
  table.add_row("B", {b_closed, b_numerical, b_diff});
  table.add_row("kkt_residual", {kkt_residual(file.scenario, closed.x), kkt_residual(file.scenario, numerical.x), 0.0});
  const bool agree = worst <= opts.tolerance && b_diff >= -1e-9;
  emit(table, opts, out, {{"agree", agree}, {"iterations", numerical.iterations}});
  if (!agree) {
    err << "verify: closed form and numerical oracle differ (max relative entry difference "
        << format_double(worst) << ", tolerance " << format_double(opts.tolerance) << ")\n";
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budget allocation under a multinomial-logit location choice model", "choicealloc"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--output", opts.output, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tolerance", opts.tolerance, "Relative agreement tolerance for verify")
      ->check(CLI::PositiveNumber);

  auto file_arg = [&](CLI::App* sub) {
    sub->add_option("file", opts.file, "Scenario JSON file")->required();
  };

  auto* solve = app.add_subcommand("solve", "Closed-form optimal allocation");
  file_arg(solve);
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Probabilities of a named allocation");
  file_arg(evaluate_cmd);
  evaluate_cmd->add_option("--allocation", opts.allocation, "Allocation name or 'optimal'")->required();
  auto* compare = app.add_subcommand("compare", "CLE/CELP heuristic allocations");
  file_arg(compare);
  compare->add_option("--rules", opts.rules, "Comma-separated rules (cle,celp)")->delimiter(',');
  compare->add_option("--gamma", opts.gamma, "Comma-separated gammas, or 'grid' for the best of 0.01..0.99");
  auto* sweep = app.add_subcommand("sweep", "Optimal vs best-gamma heuristics over (a1, 10 - a1)");
  file_arg(sweep);
  sweep->add_option("--alpha1", opts.alpha1, "Comma-separated a1 values")->delimiter(',');
  auto* scale = app.add_subcommand("scale", "Optimal allocation with every alpha scaled by k");
  file_arg(scale);
  scale->add_option("--k", opts.k, "Comma-separated scale factors")->delimiter(',');
  auto* budget_for = app.add_subcommand("budget-for", "Budget needed to reach a target overall probability");
  file_arg(budget_for);
  budget_for->add_option("--target", opts.target, "Target overall probability in (0,1)")->required();
  budget_for->add_option("--k", opts.k, "Comma-separated alpha scale factors (default 1)")->delimiter(',');
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo thief choices");
  file_arg(simulate);
  simulate->add_option("--allocation", opts.allocation, "Allocation name or 'optimal'")->required();
  simulate->add_option("--draws", opts.draws, "Number of draws")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", opts.seed, "RNG seed");
  auto* verify = app.add_subcommand("verify", "Closed form vs numerical oracle");
  file_arg(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(opts, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(opts, out);
    if (compare->parsed()) return cmd_compare(opts, out);
    if (sweep->parsed()) return cmd_sweep(opts, out);
    if (scale->parsed()) return cmd_scale(opts, out);
    if (budget_for->parsed()) return cmd_budget_for(opts, out);
    if (simulate->parsed()) return cmd_simulate(opts, out);
    if (verify->parsed()) return cmd_verify(opts, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kSchemaError;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kUsage;
}

}  // namespace choicealloc::cli
