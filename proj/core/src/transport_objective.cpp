#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "musob/errors.hpp"
#include "musob/format.hpp"
#include "musob/transport.hpp"

namespace musob {

void CostConfig::validate() const {
  if (transport == Transport::power && !(power >= 1.0)) {
    throw DomainError("cost: power must be >= 1, got " + format_double(power));
  }
  if (!(gradient_weight >= 0.0) || !std::isfinite(gradient_weight)) {
    throw DomainError("cost: gradient weight must be finite and >= 0, got " + format_double(gradient_weight));
  }
}

double CostConfig::transport_cost(double distance) const {
  const double d = std::abs(distance);
  if (transport == Transport::quadratic) return d * d;
  return std::pow(d, power);
}

TransportInstance::TransportInstance(QuantizedMeasure source, QuantizedMeasure target, CostConfig cost)
    : source_(std::move(source)), target_(std::move(target)), cost_(cost) {
  cost_.validate();
  const std::size_t n = source_.size();
  if (n == 0) throw ConsistencyError("transport instance: no quanta");
  if (target_.size() != n) {
    throw ConsistencyError("transport instance: source has " + std::to_string(n) + " quanta, target has " +
                           std::to_string(target_.size()));
  }
  if (!source_.labelled() || source_.components.size() != n) {
    throw ConsistencyError("transport instance: source quanta are not labelled");
  }
  const double unit = source_.masses.front();
  for (std::size_t i = 0; i < n; ++i) {
    for (double m : {source_.masses[i], target_.masses[i]}) {
      if (std::abs(m - unit) > 1e-12 * std::max(1.0, std::abs(unit))) {
        throw ConsistencyError("transport instance: per-quantum masses differ (" + format_double(m) + " vs " +
                               format_double(unit) + ")");
      }
    }
  }
  pair_weight_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const bool active = source_.region_labels[i - 1] == RegionLabel::V &&
                        source_.region_labels[i] == RegionLabel::V &&
                        source_.components[i - 1] == source_.components[i] &&
                        source_.points[i] > source_.points[i - 1];
    if (active) {
      pair_weight_[i] = cost_.gradient_weight * 0.5 * (source_.masses[i - 1] + source_.masses[i]);
    }
  }
}

double TransportInstance::transport(std::size_t i, std::size_t j) const {
  return source_.masses[i] * cost_.transport_cost(target_.points[j] - source_.points[i]);
}

double TransportInstance::pair_cost(std::size_t i, std::size_t a, std::size_t b) const {
  const double w = pair_weight_[i];
  if (w == 0.0) return 0.0;
  const double slope = (target_.points[b] - target_.points[a]) / (source_.points[i] - source_.points[i - 1]);
  const double d = slope - cost_.shift();
  return w * d * d;
}

const char* to_string(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::dp:
      return "dp";
    case SolverKind::brute:
      return "brute";
    case SolverKind::local:
      return "local";
    case SolverKind::monotone:
      return "monotone";
  }
  return "?";
}

SolverKind solver_from_string(const std::string& name) {
  if (name == "dp") return SolverKind::dp;
  if (name == "brute") return SolverKind::brute;
  if (name == "local") return SolverKind::local;
  if (name == "monotone") return SolverKind::monotone;
  throw DomainError("unknown method '" + name + "' (expected brute, dp, local or monotone)");
}

ObjectiveValue objective(const TransportInstance& instance, const Permutation& sigma) {
  const std::size_t n = instance.size();
  if (sigma.size() != n) {
    throw DomainError("objective: assignment has " + std::to_string(sigma.size()) + " entries, expected " +
                      std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (auto j : sigma) {
    if (j >= n || seen[j]) throw DomainError("objective: assignment is not a bijection");
    seen[j] = true;
  }
  ObjectiveValue v;
  for (std::size_t i = 0; i < n; ++i) v.transport_term += instance.transport(i, sigma[i]);
  for (std::size_t i = 1; i < n; ++i) v.gradient_term += instance.pair_cost(i, sigma[i - 1], sigma[i]);
  v.total = v.transport_term + v.gradient_term;
  return v;
}

Permutation canonicalize(const TransportInstance& instance, Permutation sigma) {
  const auto& y = instance.target().points;
  std::map<double, std::vector<std::size_t>> slots;  // target value -> source indices holding it
  for (std::size_t i = 0; i < sigma.size(); ++i) slots[y[sigma[i]]].push_back(i);
  for (auto& [value, sources] : slots) {
    if (sources.size() < 2) continue;
    std::vector<std::size_t> targets;
    for (auto i : sources) targets.push_back(sigma[i]);
    std::sort(targets.begin(), targets.end());
    for (std::size_t k = 0; k < sources.size(); ++k) sigma[sources[k]] = targets[k];
  }
  return sigma;
}

Permutation monotone_repair(const TransportInstance& instance, Permutation sigma) {
  (void)objective(instance, sigma);  // bijection check
  const auto& labels = instance.source().region_labels;
  const auto& y = instance.target().points;
  std::vector<std::size_t> held;
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (labels[i] == RegionLabel::M || labels[i] == RegionLabel::A) {
      held.push_back(i);
      targets.push_back(sigma[i]);
    }
  }
  std::sort(targets.begin(), targets.end(), [&](std::size_t a, std::size_t b) {
    if (y[a] != y[b]) return y[a] < y[b];
    return a < b;
  });
  for (std::size_t k = 0; k < held.size(); ++k) sigma[held[k]] = targets[k];
  return sigma;
}

}  // namespace musob
