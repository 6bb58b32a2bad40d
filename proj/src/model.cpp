#include "choicealloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace choicealloc {

namespace {

// exp() of anything above this is not trusted in the linear-domain route.
constexpr double kLinearLogLimit = 300.0;
constexpr double kRouteTolerance = 1e-12;

std::string indexed(std::string_view field, std::size_t i) {
  return std::string(field) + "[" + std::to_string(i) + "]";
}

void check_resources(const std::vector<Resource>& resources, std::string_view field) {
  for (std::size_t j = 0; j < resources.size(); ++j) {
    const double beta = resources[j].beta;
    if (!std::isfinite(beta) || !(beta > 0.0)) {
      throw InvalidInput(indexed(field, j) + ".beta: sensitivity must be a finite value > 0");
    }
  }
}

}  // namespace

Scenario::Scenario(std::vector<Location> locations, std::vector<Resource> local_resources,
                   std::vector<Resource> central_resources, double budget)
    : locations_(std::move(locations)),
      local_(std::move(local_resources)),
      central_(std::move(central_resources)),
      budget_(budget) {
  if (locations_.empty()) {
    throw InvalidInput("locations: at least one location is required");
  }
  if (local_.empty() && central_.empty()) {
    throw InvalidInput("local_resources/central_resources: at least one resource is required");
  }
  if (!std::isfinite(budget_) || !(budget_ > 0.0)) {
    throw InvalidInput("budget: must be a finite value > 0");
  }
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    const double alpha = locations_[i].alpha;
    if (!std::isfinite(alpha) || alpha < 0.0) {
      throw InvalidInput(indexed("locations", i) + ".alpha: attractiveness must be finite and >= 0");
    }
  }
  check_resources(local_, "local_resources");
  check_resources(central_, "central_resources");

  std::set<std::string, std::less<>> seen;
  auto claim = [&seen](const std::string& id, const std::string& where) {
    if (id.empty()) throw InvalidInput(where + ".id: must be nonempty");
    if (id.find('/') != std::string::npos) {
      throw InvalidInput(where + ".id: '/' is reserved as the location/resource separator");
    }
    if (!seen.insert(id).second) {
      throw InvalidInput(where + ".id: '" + id + "' is not unique across locations and resources");
    }
  };
  for (std::size_t i = 0; i < locations_.size(); ++i) claim(locations_[i].id, indexed("locations", i));
  for (std::size_t j = 0; j < local_.size(); ++j) claim(local_[j].id, indexed("local_resources", j));
  for (std::size_t j = 0; j < central_.size(); ++j) claim(central_[j].id, indexed("central_resources", j));
}

double Scenario::entry_beta(std::size_t k) const {
  const std::size_t n_local = locations_.size() * local_.size();
  if (k < n_local) return local_[k % local_.size()].beta;
  return central_.at(k - n_local).beta;
}

std::string Scenario::entry_label(std::size_t k) const {
  const std::size_t n_local = locations_.size() * local_.size();
  if (k < n_local) {
    return locations_[k / local_.size()].id + "/" + local_[k % local_.size()].id;
  }
  return central_.at(k - n_local).id;
}

double Scenario::local_beta_sum() const {
  return std::accumulate(local_.begin(), local_.end(), 0.0,
                         [](double acc, const Resource& r) { return acc + r.beta; });
}

double Scenario::central_beta_sum() const {
  return std::accumulate(central_.begin(), central_.end(), 0.0,
                         [](double acc, const Resource& r) { return acc + r.beta; });
}

std::optional<std::size_t> Scenario::find_location(std::string_view id) const {
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    if (locations_[i].id == id) return i;
  }
  return std::nullopt;
}

Scenario Scenario::with_budget(double budget) const {
  return Scenario(locations_, local_, central_, budget);
}

Scenario Scenario::with_alphas(std::span<const double> alphas) const {
  if (alphas.size() != locations_.size()) {
    throw InvalidInput("alphas: expected " + std::to_string(locations_.size()) + " values");
  }
  auto locations = locations_;
  for (std::size_t i = 0; i < locations.size(); ++i) locations[i].alpha = alphas[i];
  return Scenario(std::move(locations), local_, central_, budget_);
}

std::vector<double> flatten(const Scenario& scenario, const Allocation& allocation) {
  if (allocation.local.size() != scenario.num_locations() * scenario.num_local()) {
    throw InvalidInput("allocation.local: expected " +
                       std::to_string(scenario.num_locations() * scenario.num_local()) +
                       " entries, got " + std::to_string(allocation.local.size()));
  }
  if (allocation.central.size() != scenario.num_central()) {
    throw InvalidInput("allocation.central: expected " + std::to_string(scenario.num_central()) +
                       " entries, got " + std::to_string(allocation.central.size()));
  }
  std::vector<double> x(scenario.num_entries());
  for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
    for (std::size_t j = 0; j < scenario.num_local(); ++j) {
      const LocalKey key{scenario.locations()[i].id, scenario.local_resources()[j].id};
      const auto it = allocation.local.find(key);
      if (it == allocation.local.end()) {
        throw InvalidInput("allocation.local: missing entry '" + key.location + "/" + key.resource + "'");
      }
      x[scenario.local_index(i, j)] = it->second;
    }
  }
  for (std::size_t j = 0; j < scenario.num_central(); ++j) {
    const auto& id = scenario.central_resources()[j].id;
    const auto it = allocation.central.find(id);
    if (it == allocation.central.end()) {
      throw InvalidInput("allocation.central: missing entry '" + id + "'");
    }
    x[scenario.central_index(j)] = it->second;
  }
  check_positive(scenario, x);
  return x;
}

Allocation unflatten(const Scenario& scenario, std::span<const double> x) {
  if (x.size() != scenario.num_entries()) {
    throw InvalidInput("allocation: expected " + std::to_string(scenario.num_entries()) + " entries");
  }
  Allocation allocation;
  for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
    for (std::size_t j = 0; j < scenario.num_local(); ++j) {
      allocation.local.emplace(
          LocalKey{scenario.locations()[i].id, scenario.local_resources()[j].id},
          x[scenario.local_index(i, j)]);
    }
  }
  for (std::size_t j = 0; j < scenario.num_central(); ++j) {
    allocation.central.emplace(scenario.central_resources()[j].id, x[scenario.central_index(j)]);
  }
  return allocation;
}

void check_positive(const Scenario& scenario, std::span<const double> x) {
  if (x.size() != scenario.num_entries()) {
    throw InvalidInput("allocation: expected " + std::to_string(scenario.num_entries()) +
                       " entries, got " + std::to_string(x.size()));
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x[k]) || !(x[k] >= kPositivityFloor)) {
      throw InvalidInput("allocation '" + scenario.entry_label(k) + "': entry must be strictly positive");
    }
  }
}

void check_feasible(const Scenario& scenario, std::span<const double> x) {
  check_positive(scenario, x);
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (total > scenario.budget() * (1.0 + kBudgetSlack)) {
    throw InvalidInput("allocation: total " + std::to_string(total) + " exceeds budget " +
                       std::to_string(scenario.budget()));
  }
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

namespace {

// Sum over central resources of beta_j ln x_j; shared by every location.
double central_log_weight(const Scenario& scenario, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < scenario.num_central(); ++j) {
    acc += scenario.central_resources()[j].beta * std::log(x[scenario.central_index(j)]);
  }
  return acc;
}

double utility_unchecked(const Scenario& scenario, std::span<const double> x, std::size_t i,
                         double central_weight) {
  double v = scenario.locations()[i].alpha - central_weight;
  for (std::size_t j = 0; j < scenario.num_local(); ++j) {
    v -= scenario.local_resources()[j].beta * std::log(x[scenario.local_index(i, j)]);
  }
  return v;
}

// B's summands exp(alpha_i) / (prod x_j^beta_j * prod x_ij^beta_j) evaluated
// in the linear domain. Empty when that route is not numerically safe.
std::optional<std::vector<double>> product_terms(const Scenario& scenario, std::span<const double> x,
                                                 std::span<const double> utilities) {
  if (*std::max_element(utilities.begin(), utilities.end()) >= kLinearLogLimit) return std::nullopt;
  double central_product = 1.0;
  for (std::size_t j = 0; j < scenario.num_central(); ++j) {
    central_product *= std::pow(x[scenario.central_index(j)], scenario.central_resources()[j].beta);
  }
  std::vector<double> terms(scenario.num_locations());
  for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
    double denominator = central_product;
    for (std::size_t j = 0; j < scenario.num_local(); ++j) {
      denominator *= std::pow(x[scenario.local_index(i, j)], scenario.local_resources()[j].beta);
    }
    terms[i] = std::exp(scenario.locations()[i].alpha) / denominator;
    if (!std::isfinite(terms[i]) || !std::isnormal(denominator) || !(terms[i] > 0.0)) {
      return std::nullopt;
    }
  }
  return terms;
}

bool relatively_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

double deterministic_utility(const Scenario& scenario, std::span<const double> x, std::size_t location) {
  check_positive(scenario, x);
  if (location >= scenario.num_locations()) {
    throw InvalidInput("location index " + std::to_string(location) + " out of range");
  }
  return utility_unchecked(scenario, x, location, central_log_weight(scenario, x));
}

double deterministic_utility(const Scenario& scenario, const Allocation& allocation,
                             std::string_view location) {
  const auto index = scenario.find_location(location);
  if (!index) throw InvalidInput("unknown location '" + std::string(location) + "'");
  const auto x = flatten(scenario, allocation);
  return deterministic_utility(scenario, x, *index);
}

std::vector<double> utilities(const Scenario& scenario, std::span<const double> x) {
  check_positive(scenario, x);
  const double central_weight = central_log_weight(scenario, x);
  std::vector<double> v(scenario.num_locations());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = utility_unchecked(scenario, x, i, central_weight);
  return v;
}

Evaluation evaluate(const Scenario& scenario, std::span<const double> x) {
  check_feasible(scenario, x);
  Evaluation e;
  e.utilities = utilities(scenario, x);

  // Logit route: the opt-out alternative has utility 0.
  std::vector<double> with_opt_out(e.utilities);
  with_opt_out.push_back(0.0);
  const double log_denominator = log_sum_exp(with_opt_out);
  e.per_location.resize(e.utilities.size());
  double summed = 0.0;
  for (std::size_t i = 0; i < e.utilities.size(); ++i) {
    e.per_location[i] = std::exp(e.utilities[i] - log_denominator);
    summed += e.per_location[i];
  }
  e.opt_out = std::exp(-log_denominator);

  // Product route.
  const double log_b_logit = log_sum_exp(e.utilities);
  if (auto terms = product_terms(scenario, x, e.utilities)) {
    e.surrogate = std::accumulate(terms->begin(), terms->end(), 0.0);
    e.log_surrogate = std::log(e.surrogate);
  } else {
    e.log_surrogate = log_b_logit;
    e.surrogate = std::exp(log_b_logit);
  }

  if (std::abs(e.log_surrogate - log_b_logit) > kRouteTolerance) {
    throw NumericalFailure("evaluate: logit and product routes disagree on B (ln B " +
                           std::to_string(log_b_logit) + " vs " + std::to_string(e.log_surrogate) + ")");
  }
  // B / (1 + B) as a logistic in ln B, so P is exactly monotone in B.
  e.overall = 1.0 / (1.0 + std::exp(-e.log_surrogate));
  if (!relatively_close(summed, e.overall, kRouteTolerance)) {
    throw NumericalFailure("evaluate: overall probability differs between routes");
  }
  return e;
}

Evaluation evaluate(const Scenario& scenario, const Allocation& allocation) {
  return evaluate(scenario, flatten(scenario, allocation));
}

double log_surrogate_B(const Scenario& scenario, std::span<const double> x) {
  return log_sum_exp(utilities(scenario, x));
}

double surrogate_B(const Scenario& scenario, std::span<const double> x) {
  const auto v = utilities(scenario, x);
  if (auto terms = product_terms(scenario, x, v)) {
    return std::accumulate(terms->begin(), terms->end(), 0.0);
  }
  return std::exp(log_sum_exp(v));
}

double surrogate_B(const Scenario& scenario, const Allocation& allocation) {
  return surrogate_B(scenario, flatten(scenario, allocation));
}

std::vector<double> gradient_B(const Scenario& scenario, std::span<const double> x) {
  const auto v = utilities(scenario, x);
  std::vector<double> terms(v.size());
  std::transform(v.begin(), v.end(), terms.begin(), [](double u) { return std::exp(u); });
  const double total = std::accumulate(terms.begin(), terms.end(), 0.0);

  std::vector<double> g(scenario.num_entries());
  for (std::size_t i = 0; i < scenario.num_locations(); ++i) {
    for (std::size_t j = 0; j < scenario.num_local(); ++j) {
      const std::size_t k = scenario.local_index(i, j);
      g[k] = -scenario.local_resources()[j].beta * terms[i] / x[k];
    }
  }
  for (std::size_t j = 0; j < scenario.num_central(); ++j) {
    const std::size_t k = scenario.central_index(j);
    g[k] = -scenario.central_resources()[j].beta * total / x[k];
  }
  return g;
}

std::vector<double> gradient_B(const Scenario& scenario, const Allocation& allocation) {
  return gradient_B(scenario, flatten(scenario, allocation));
}

}  // namespace choicealloc
