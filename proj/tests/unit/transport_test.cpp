#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "corpus.hpp"
#include "musob/errors.hpp"
#include "musob/transport.hpp"

using namespace musob;

namespace {

QuantizedMeasure points(std::vector<double> x, RegionLabel label = RegionLabel::V) {
  QuantizedMeasure q;
  const double m = 1.0 / static_cast<double>(x.size());
  q.masses.assign(x.size(), m);
  q.region_labels.assign(x.size(), label);
  q.components.assign(x.size(), label == RegionLabel::V ? 0 : -1);
  q.points = std::move(x);
  return q;
}

CostConfig squared_minus_identity() {
  CostConfig c;
  c.gradient = CostConfig::Gradient::squared_minus_identity;
  return c;
}

Permutation identity(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

}  // namespace

TEST(Objective, HandExamples) {
  const TransportInstance two(points({0.25, 0.75}), points({0.0, 1.0}), CostConfig{});
  const auto v = objective(two, {0, 1});
  EXPECT_DOUBLE_EQ(v.transport_term, 0.0625);
  EXPECT_DOUBLE_EQ(v.gradient_term, 2.0);
  EXPECT_DOUBLE_EQ(v.total, 2.0625);

  QuantizedMeasure atom = points({0.0}, RegionLabel::A);
  atom.masses = {1.0};
  QuantizedMeasure target = points({1.0});
  target.masses = {1.0};
  EXPECT_EQ(objective(TransportInstance(atom, target, CostConfig{}), {0}).total, 1.0);

  const auto same = solve_problem(fixtures::uniform_spec(), fixtures::uniform_spec(), 8, squared_minus_identity(),
                                  SolverKind::dp);
  EXPECT_EQ(same.solution.assignment, identity(8));
  EXPECT_NEAR(same.solution.objective.total, 0.0, 1e-24);
  EXPECT_EQ(same.pushforward_discrepancy, 0.0);
}

TEST(Objective, InactivePairs) {
  // Different components, M labels and repeated points all drop the pair.
  auto q = points({0.1, 0.2, 0.3, 0.3});
  q.components = {0, 1, 1, 1};
  const TransportInstance split(q, points({0.0, 1.0, 2.0, 3.0}), CostConfig{});
  EXPECT_EQ(split.pair_weight(1), 0.0);
  EXPECT_GT(split.pair_weight(2), 0.0);
  EXPECT_EQ(split.pair_weight(3), 0.0);

  auto m = points({0.1, 0.2});
  m.region_labels[1] = RegionLabel::M;
  EXPECT_EQ(TransportInstance(m, points({0.0, 1.0}), CostConfig{}).pair_weight(1), 0.0);
}

TEST(Objective, Validation) {
  EXPECT_THROW(TransportInstance(points({0.0}), points({0.0, 1.0}), CostConfig{}), ConsistencyError);
  QuantizedMeasure unlabelled = points({0.0, 1.0});
  unlabelled.region_labels.assign(2, RegionLabel::unset);
  EXPECT_THROW(TransportInstance(unlabelled, points({0.0, 1.0}), CostConfig{}), ConsistencyError);
  CostConfig bad;
  bad.transport = CostConfig::Transport::power;
  bad.power = 0.5;
  EXPECT_THROW(TransportInstance(points({0.0}), points({0.0}), bad), DomainError);
  const TransportInstance ok(points({0.0, 1.0}), points({0.0, 1.0}), CostConfig{});
  EXPECT_THROW((void)objective(ok, {0, 0}), DomainError);
  EXPECT_THROW((void)objective(ok, {0}), DomainError);
}

TEST(Objective, PowerCost) {
  CostConfig c;
  c.transport = CostConfig::Transport::power;
  c.power = 1.0;
  c.gradient_weight = 0.0;
  const TransportInstance inst(points({0.0, 1.0}), points({2.0, 4.0}), c);
  EXPECT_DOUBLE_EQ(objective(inst, {0, 1}).total, 0.5 * (2.0 + 3.0));
}

TEST(Solvers, DpMatchesBrute) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::size_t n : {1u, 2u, 5u, 8u}) {
      CostConfig c = seed % 2 ? squared_minus_identity() : CostConfig{};
      if (seed % 3 == 0) {
        c.transport = CostConfig::Transport::power;
        c.power = 1.5;
      }
      const auto inst = random_instance(n, seed, c);
      const auto b = solve_brute(inst);
      const auto d = solve_dp(inst);
      EXPECT_NEAR(b.objective.total, d.objective.total, 1e-12 * std::max(1.0, b.objective.total));
      EXPECT_EQ(b.assignment, d.assignment) << seed << " " << n;
    }
  }
}

TEST(Solvers, ShiftMapObjectiveNearOne) {
  const auto r = solve_problem(fixtures::uniform_spec(), fixtures::uniform_spec(1.0, 2.0), 16,
                               squared_minus_identity(), SolverKind::dp);
  EXPECT_EQ(r.solution.assignment, identity(16));
  EXPECT_NEAR(r.solution.objective.transport_term, 1.0, 1e-12);
  EXPECT_NEAR(r.solution.objective.gradient_term, 0.0, 1e-12);
}

TEST(Solvers, ReflectionIsNotOptimal) {
  const TransportInstance inst(points({0.125, 0.375, 0.625, 0.875}), points({0.125, 0.375, 0.625, 0.875}),
                               CostConfig{});
  const auto d = solve_dp(inst);
  EXPECT_EQ(d.assignment, identity(4));
  EXPECT_LT(d.objective.total, objective(inst, {3, 2, 1, 0}).total);
}

TEST(Solvers, SizeGuards) {
  const auto nine = random_instance(9, 1, CostConfig{});
  EXPECT_THROW((void)solve_brute(nine), SizeError);
  const auto big = random_instance(21, 1, CostConfig{});
  EXPECT_THROW((void)solve_dp(big), SizeError);
  EXPECT_NO_THROW((void)solve_local(big));
  EXPECT_THROW((void)solve_local(random_instance(1, 1, CostConfig{})), DomainError);
}

TEST(Solvers, LocalSearch) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = random_instance(8, seed, squared_minus_identity());
    const auto exact = solve_dp(inst).objective.total;
    LocalSearchOptions opt;
    opt.seed = seed;
    const auto l = solve_local(inst, opt);
    EXPECT_GE(l.objective.total, exact - 1e-12);
    EXPECT_LE(l.objective.total, solve_monotone(inst).objective.total + 1e-12);
    EXPECT_EQ(l.seed, seed);
    ASSERT_FALSE(l.trace.empty());
    EXPECT_EQ(l.trace.front().iteration, 0u);
    // Same seed, same answer.
    EXPECT_EQ(solve_local(inst, opt).assignment, l.assignment);
  }
  LocalSearchOptions none;
  none.iters = 0;
  none.restarts = 1;
  const auto inst = random_instance(12, 3, CostConfig{});
  EXPECT_EQ(solve_local(inst, none).objective.total, solve_monotone(inst).objective.total);
}

TEST(Canonicalize, DuplicateTargets) {
  const TransportInstance inst(points({0.0, 0.5, 1.0}), points({0.2, 0.2, 0.9}), CostConfig{});
  EXPECT_EQ(canonicalize(inst, {1, 2, 0}), (Permutation{0, 2, 1}));
  const auto before = objective(inst, {1, 2, 0}).total;
  EXPECT_EQ(objective(inst, canonicalize(inst, {1, 2, 0})).total, before);
}

TEST(MonotoneRepair, AtomsSorted) {
  auto atoms = points({0.0, 1.0}, RegionLabel::A);
  CostConfig c;
  c.gradient_weight = 0.0;
  const TransportInstance inst(atoms, points({5.0, 3.0}), c);
  EXPECT_DOUBLE_EQ(objective(inst, {0, 1}).transport_term, 14.5);
  const auto repaired = monotone_repair(inst, {0, 1});
  EXPECT_EQ(repaired, (Permutation{1, 0}));
  EXPECT_DOUBLE_EQ(objective(inst, repaired).transport_term, 12.5);
}

TEST(MonotoneRepair, VQuantaUntouched) {
  auto q = points({0.0, 0.5, 1.0});
  q.region_labels = {RegionLabel::M, RegionLabel::V, RegionLabel::A};
  q.components = {-1, 0, -1};
  const TransportInstance inst(q, points({1.0, 2.0, 3.0}), CostConfig{});
  EXPECT_EQ(monotone_repair(inst, {2, 1, 0}), (Permutation{0, 1, 2}));
  EXPECT_EQ(monotone_repair(inst, {1, 2, 0}), (Permutation{0, 2, 1}));
}

TEST(MonotoneMap, Examples) {
  const auto u = make_measure(fixtures::uniform_spec());
  const auto shifted = make_measure(fixtures::uniform_spec(1.0, 2.0));
  const auto t = monotone_map(u, shifted);
  for (double x : {0.1, 0.5, 0.9}) EXPECT_NEAR(t(x), x + 1.0, 1e-12);

  MeasureSpec d1;
  d1.interval = {0.0, 1.0};
  d1.atoms = {{1.0, 1.0}};
  const auto to_atom = monotone_map(u, make_measure(d1));
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(to_atom(x), 1.0);

  const auto quad = monotone_map(u, make_measure(fixtures::power_spec(0.0, 1.0, 2.0)));
  EXPECT_NEAR(quad(0.25), 0.5, 1e-12);  // x^2 = 0.25
}

TEST(SolveProblem, Json) {
  const auto r = solve_problem(fixtures::uniform_spec(), fixtures::uniform_spec(1.0, 2.0), 2, CostConfig{},
                               SolverKind::brute);
  const auto json = solution_json(r);
  EXPECT_NE(json.find("\"N\": 2"), std::string::npos);
  EXPECT_NE(json.find("\"method\": \"brute\""), std::string::npos);
  EXPECT_NE(json.find("\"assignment\": [0, 1]"), std::string::npos);
  EXPECT_EQ(local_trace_csv(r.solution), "restart,iteration,objective\n");
}

TEST(SolveProblem, RescalesTarget) {
  const auto fat = fat_cantor_density({0.0, 1.0}, 1.0, 2, 0.5);
  const auto r = solve_problem(fixtures::uniform_spec(), fat, 8, CostConfig{}, SolverKind::dp);
  EXPECT_EQ(r.solution.assignment.size(), 8u);
  EXPECT_LE(r.pushforward_discrepancy, 1e-12);
}
