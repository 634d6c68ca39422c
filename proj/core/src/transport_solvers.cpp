#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "musob/errors.hpp"
#include "musob/random.hpp"
#include "musob/transport.hpp"

namespace musob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Near-ties within this margin go to the lexicographically smaller assignment.
double tie_margin(double value) { return 1e-12 * std::max(1.0, std::abs(value)); }

Permutation identity(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

TransportSolution finish(const TransportInstance& instance, Permutation sigma, SolverKind kind) {
  TransportSolution s;
  s.assignment = canonicalize(instance, std::move(sigma));
  s.objective = objective(instance, s.assignment);
  s.solver = kind;
  return s;
}

}  // namespace

TransportSolution solve_brute(const TransportInstance& instance) {
  const std::size_t n = instance.size();
  if (n > 8) {
    throw SizeError("solve_brute: N = " + std::to_string(n) + " exceeds the brute-force limit of 8");
  }
  Permutation sigma = identity(n);
  Permutation best = sigma;
  double best_value = objective(instance, sigma).total;
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    const double v = objective(instance, sigma).total;
    if (v < best_value - tie_margin(best_value)) {
      best_value = v;
      best = sigma;
    }
  }
  return finish(instance, std::move(best), SolverKind::brute);
}

TransportSolution solve_dp(const TransportInstance& instance) {
  const std::size_t n = instance.size();
  if (n > 20) {
    throw SizeError("solve_dp: N = " + std::to_string(n) +
                    " exceeds the bitmask limit of 20; use solve_local (--method local)");
  }
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = instance.transport(i, j);
  }
  // Step cost of giving source k (>= 1) target j after source k - 1 took last.
  auto step = [&](std::size_t k, std::size_t last, std::size_t j) {
    return cost[k * n + j] + instance.pair_cost(k, last, j);
  };

  // suffix[mask * n + last]: cheapest completion once the targets in mask
  // are used and source popcount(mask) - 1 holds `last`.
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> suffix((full + 1) * n, kInf);
  for (std::size_t last = 0; last < n; ++last) suffix[full * n + last] = 0.0;
  for (std::size_t mask = full; mask-- > 1;) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t last = 0; last < n; ++last) {
      if (!(mask >> last & 1U)) continue;
      double v = kInf;
      for (std::size_t j = 0; j < n; ++j) {
        if (mask >> j & 1U) continue;
        v = std::min(v, step(k, last, j) + suffix[(mask | std::size_t{1} << j) * n + j]);
      }
      suffix[mask * n + last] = v;
    }
  }

  double root = kInf;
  for (std::size_t j = 0; j < n; ++j) root = std::min(root, cost[j] + suffix[(std::size_t{1} << j) * n + j]);
  Permutation sigma;
  sigma.reserve(n);
  std::size_t mask = 0;
  double remaining = root;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1U) continue;
      const std::size_t next = mask | std::size_t{1} << j;
      const double c = (k == 0 ? cost[j] : step(k, sigma.back(), j)) + suffix[next * n + j];
      if (c <= remaining + tie_margin(remaining)) {
        sigma.push_back(j);
        mask = next;
        remaining = suffix[next * n + j];
        break;
      }
    }
  }
  return finish(instance, std::move(sigma), SolverKind::dp);
}

namespace {

class LocalSearch {
 public:
  explicit LocalSearch(const TransportInstance& instance) : instance_(instance), n_(instance.size()) {}

  // Objective change of swapping sigma[i] and sigma[j], i < j.
  double delta(Permutation& sigma, std::size_t i, std::size_t j) const {
    const double before = local(sigma, i, j);
    std::swap(sigma[i], sigma[j]);
    const double after = local(sigma, i, j);
    std::swap(sigma[i], sigma[j]);
    return after - before;
  }

  void run(Permutation& sigma, std::size_t restart, std::size_t iters, std::vector<TraceEntry>& trace) const {
    double value = objective(instance_, sigma).total;
    trace.push_back({restart, 0, value});
    const std::size_t pairs = n_ * (n_ - 1) / 2;
    std::size_t i = 0, j = 1;
    std::size_t quiet = 0;
    for (std::size_t it = 1; it <= iters && quiet < pairs; ++it) {
      const double d = delta(sigma, i, j);
      if (d < -1e-14 * (1.0 + std::abs(value))) {
        std::swap(sigma[i], sigma[j]);
        value = objective(instance_, sigma).total;
        trace.push_back({restart, it, value});
        quiet = 0;
      } else {
        ++quiet;
      }
      if (++j == n_) {
        if (++i == n_ - 1) i = 0;
        j = i + 1;
      }
    }
  }

 private:
  double local(const Permutation& sigma, std::size_t i, std::size_t j) const {
    double s = instance_.transport(i, sigma[i]) + instance_.transport(j, sigma[j]);
    std::size_t pairs[4] = {i, i + 1, j, j + 1};
    std::sort(std::begin(pairs), std::end(pairs));
    const auto end = std::unique(std::begin(pairs), std::end(pairs));
    for (auto it = std::begin(pairs); it != end; ++it) {
      const std::size_t p = *it;
      if (p >= 1 && p < n_) s += instance_.pair_cost(p, sigma[p - 1], sigma[p]);
    }
    return s;
  }

  const TransportInstance& instance_;
  std::size_t n_;
};

}  // namespace

TransportSolution solve_local(const TransportInstance& instance, const LocalSearchOptions& options) {
  const std::size_t n = instance.size();
  if (n < 2) throw DomainError("solve_local: N must be >= 2");
  const LocalSearch search(instance);
  Rng rng(options.seed);
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);

  std::vector<TraceEntry> trace;
  Permutation best;
  double best_value = kInf;
  for (std::size_t r = 0; r < restarts; ++r) {
    Permutation sigma = identity(n);
    if (r > 0) {
      for (std::size_t k = n - 1; k > 0; --k) std::swap(sigma[k], sigma[rng.below(k + 1)]);
    }
    search.run(sigma, r, options.iters, trace);
    sigma = canonicalize(instance, std::move(sigma));
    const double v = objective(instance, sigma).total;
    if (best.empty() || v < best_value - tie_margin(best_value) ||
        (std::abs(v - best_value) <= tie_margin(best_value) && sigma < best)) {
      best_value = std::min(v, best_value);
      best = std::move(sigma);
    }
  }
  TransportSolution s = finish(instance, std::move(best), SolverKind::local);
  s.seed = options.seed;
  s.trace = std::move(trace);
  return s;
}

TransportSolution solve_monotone(const TransportInstance& instance) {
  return finish(instance, identity(instance.size()), SolverKind::monotone);
}

}  // namespace musob
