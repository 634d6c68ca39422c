#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "corpus.hpp"
#include "musob/random.hpp"
#include "musob/tangent.hpp"
#include "musob/transport.hpp"

using namespace musob;

namespace {

std::vector<MeasureSpec> specs_under_test() {
  std::vector<MeasureSpec> out;
  for (const auto& e : fixtures::corpus()) out.push_back(e.spec);
  Rng rng(2024);
  for (int k = 0; k < 10; ++k) out.push_back(fixtures::random_spec(rng));
  return out;
}

bool nondecreasing(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }

}  // namespace

TEST(Properties, CdfAndGalois) {
  Rng rng(1);
  for (const auto& spec : specs_under_test()) {
    const Measure m(spec);
    const double lo = spec.interval.lo, hi = spec.interval.hi;
    EXPECT_NEAR(m.cdf(hi), m.total_mass(), 1e-12 * m.total_mass());
    double previous = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double x = lo + (hi - lo) * k / 200.0;
      EXPECT_GE(m.cdf(x), previous);
      previous = m.cdf(x);
    }
    for (int k = 0; k < 1000; ++k) {
      const double p = rng.uniform(0.0, m.total_mass());
      const double x = rng.uniform(lo, hi);
      EXPECT_EQ(m.quantile(p) <= x, p <= m.cdf(x)) << p << " " << x;
    }
  }
}

TEST(Properties, QuantizeAndLabel) {
  for (const auto& spec : specs_under_test()) {
    auto mu = make_measure(spec);
    for (std::size_t n : {1u, 7u, 64u}) {
      const auto q = quantize(mu, n);
      double sum = 0.0;
      for (double m : q.masses) sum += m;
      EXPECT_NEAR(sum, mu->total_mass(), 1e-12 * mu->total_mass());
      EXPECT_TRUE(nondecreasing(q.points));
      const auto labelled = label_quantized(*tangent_field(mu), q);
      EXPECT_EQ(labelled.points, q.points);
      EXPECT_EQ(labelled.masses, q.masses);
      EXPECT_TRUE(labelled.labelled());
    }
  }
}

TEST(Properties, TangentDimensionMatchesRegions) {
  Rng rng(3);
  for (const auto& spec : specs_under_test()) {
    const auto field = tangent_field(make_measure(spec));
    const auto m = critical_set(spec);
    const auto a = singular_support(spec);
    for (int k = 0; k < 1000; ++k) {
      const double x = rng.uniform(spec.interval.lo, spec.interval.hi);
      EXPECT_EQ(tangent_dim(*field, x) == 0, m.contains(x) || a.contains(x)) << x;
    }
    for (const auto& s : spec.segments) {
      if (s.critical || !(s.coeff > 0.0) || s.center < s.lo || s.center > s.hi) continue;
      if (s.power >= 1.0) {
        EXPECT_TRUE(m.contains(s.center));
      } else if (s.lo < s.center && s.center < s.hi) {
        EXPECT_FALSE(m.contains(s.center));
      }
    }
  }
}

TEST(Properties, RepairNeverIncreasesObjective) {
  Rng targets(11);
  for (const auto& entry : fixtures::corpus()) {
    auto mu = make_measure(entry.spec);
    const auto source = label_quantized(*tangent_field(mu), quantize(mu, 10));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      QuantizedMeasure target = quantize(make_measure(fixtures::random_spec(targets)), 10);
      target.masses = source.masses;
      const TransportInstance inst(source, target, seed % 2 ? CostConfig{} : CostConfig{
          CostConfig::Transport::quadratic, 2.0, CostConfig::Gradient::squared_minus_identity, 1.0});
      Rng rng(seed);
      Permutation sigma(10);
      for (std::size_t i = 0; i < 10; ++i) sigma[i] = i;
      for (std::size_t k = 9; k > 0; --k) std::swap(sigma[k], sigma[rng.below(k + 1)]);
      const auto repaired = monotone_repair(inst, sigma);
      EXPECT_LE(objective(inst, repaired).total, objective(inst, sigma).total + 1e-12) << entry.name;
      double last = -1e300;
      for (std::size_t i = 0; i < 10; ++i) {
        if (source.region_labels[i] == RegionLabel::V) continue;
        EXPECT_GE(target.points[repaired[i]], last);
        last = target.points[repaired[i]];
      }
    }
  }
}

TEST(Properties, DpNeverWorseThanMonotone) {
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    const auto target = fixtures::random_spec(rng);
    for (const auto& entry : fixtures::corpus()) {
      const auto dp = solve_problem(entry.spec, target, 8, CostConfig{}, SolverKind::dp);
      const auto mono = solve_problem(entry.spec, target, 8, CostConfig{}, SolverKind::monotone);
      EXPECT_LE(dp.solution.objective.total, mono.solution.objective.total + 1e-12) << entry.name;
      EXPECT_EQ(dp.pushforward_discrepancy, 0.0);
      EXPECT_EQ(mono.pushforward_discrepancy, 0.0);
    }
  }
}

TEST(Properties, LebesgueSourceIsMonotone) {
  Rng rng(8);
  for (int k = 0; k < 5; ++k) {
    const auto target = fixtures::random_spec(rng);
    const auto dp = solve_problem(fixtures::uniform_spec(), target, 10, CostConfig{}, SolverKind::dp);
    const auto mono = solve_problem(fixtures::uniform_spec(), target, 10, CostConfig{}, SolverKind::monotone);
    EXPECT_NEAR(dp.solution.objective.total, mono.solution.objective.total,
                1e-9 * std::max(1.0, mono.solution.objective.total));
  }
}

TEST(Properties, MonotoneMapPushforward) {
  const std::size_t n = 2000;
  for (const auto& source : {fixtures::uniform_spec(), fixtures::power_spec(0.5, 2.0, 12.0)}) {
    for (const auto& entry : fixtures::corpus()) {
      auto mu = make_measure(source);
      auto nu = make_measure(entry.spec);
      if (std::abs(mu->total_mass() - nu->total_mass()) > 1e-9) continue;
      const auto t = monotone_map(mu, nu);
      EXPECT_LE(pushforward_discrepancy(t, *mu, *nu, n), 2.0 / n) << entry.name;
    }
  }
}
