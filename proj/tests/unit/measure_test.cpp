#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "musob/errors.hpp"
#include "musob/measure.hpp"

using namespace musob;
using musob::fixtures::uniform_spec;

namespace {

MeasureSpec half_lebesgue_half_atom(double at) {
  MeasureSpec s = uniform_spec(0.0, 1.0, 0.5);
  s.atoms.push_back({at, 0.5});
  return s;
}

MeasureSpec linear_density() {
  MeasureSpec s;
  s.interval = {0.0, 1.0};
  s.segments.push_back({0.0, 1.0, 2.0, 0.0, 1.0, false});
  return s;
}

}  // namespace

TEST(TotalMass, Examples) {
  EXPECT_DOUBLE_EQ(total_mass(uniform_spec()), 1.0);
  MeasureSpec atom;
  atom.atoms.push_back({0.3, 0.5});
  EXPECT_DOUBLE_EQ(total_mass(atom), 0.5);
  EXPECT_NEAR(total_mass(fixtures::power_spec(0.5, 0.5)), 2.0 * (2.0 / 3.0) * std::pow(0.5, 1.5), 1e-15);
}

TEST(Validate, NamesTheField) {
  MeasureSpec s = uniform_spec();
  s.segments[0].coeff = -1.0;
  try {
    validate(s);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "$.segments[0].coeff");
  }
  MeasureSpec dup;
  dup.atoms = {{0.2, 0.1}, {0.2, 0.3}};
  EXPECT_THROW(validate(dup), ValidationError);
  MeasureSpec outside = uniform_spec();
  outside.atoms.push_back({2.0, 1.0});
  try {
    validate(outside);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "$.atoms[0].position");
  }
  MeasureSpec empty;
  EXPECT_THROW(validate(empty), ValidationError);
}

TEST(Cdf, Examples) {
  EXPECT_DOUBLE_EQ(Measure(uniform_spec()).cdf(0.5), 0.5);
  EXPECT_DOUBLE_EQ(Measure(half_lebesgue_half_atom(0.5)).cdf(0.5), 0.75);
  MeasureSpec cantor;
  cantor.cantor_parts.push_back({0.0, 1.0, 1.0, 3});
  EXPECT_DOUBLE_EQ(Measure(cantor).cdf(1.0 / 3.0), 0.5);
  EXPECT_THROW((void)Measure(uniform_spec()).cdf(1.5), DomainError);
}

TEST(Quantile, Examples) {
  EXPECT_DOUBLE_EQ(Measure(uniform_spec()).quantile(0.25), 0.25);
  EXPECT_NEAR(Measure(linear_density()).quantile(0.25), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(Measure(half_lebesgue_half_atom(0.5)).quantile(0.6), 0.5);
  EXPECT_THROW((void)Measure(uniform_spec()).quantile(0.0), DomainError);
  EXPECT_THROW((void)Measure(uniform_spec()).quantile(1.5), DomainError);
}

TEST(Quantile, AtomInsideSegment) {
  const Measure m(half_lebesgue_half_atom(0.5));
  EXPECT_NEAR(m.quantile(0.2), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(m.quantile(0.75), 0.5);
  EXPECT_NEAR(m.quantile(0.8), 0.6, 1e-15);
}

TEST(Quantize, Examples) {
  const auto q = quantize(make_measure(uniform_spec()), 4);
  EXPECT_EQ(q.points, (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
  for (double m : q.masses) EXPECT_DOUBLE_EQ(m, 0.25);
  EXPECT_FALSE(q.labelled());

  MeasureSpec atom;
  atom.atoms.push_back({0.3, 1.0});
  for (double p : quantize(make_measure(atom), 3).points) EXPECT_EQ(p, 0.3);

  const auto lin = quantize(make_measure(linear_density()), 2);
  EXPECT_NEAR(lin.points[0], 0.5, 1e-15);
  EXPECT_NEAR(lin.points[1], std::sqrt(0.75), 1e-15);
  EXPECT_THROW((void)quantize(make_measure(uniform_spec()), 0), DomainError);
}

TEST(Integrate, Examples) {
  auto id = [](double x) { return x; };
  EXPECT_NEAR(integrate(id, Measure(uniform_spec())), 0.5, 1e-14);
  EXPECT_NEAR(integrate(id, Measure(half_lebesgue_half_atom(0.5))), 0.5, 1e-14);
  EXPECT_NEAR(integrate([](double) { return 1.0; }, Measure(fixtures::power_spec(0.5, 0.5))),
              0.47140452079103168, 1e-12);
}

TEST(Integrate, NonFiniteSampleReportsLocation) {
  try {
    (void)integrate([](double x) { return x > 0.5 ? NAN : 1.0; }, Measure(uniform_spec()));
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_GT(e.location(), 0.5);
  }
}

TEST(Integrate, SingularDensityNearCenter) {
  // ∫ x^2 · |x|^-0.5 on [0, 1] = 1 / 2.5
  MeasureSpec s;
  s.segments.push_back({0.0, 1.0, 1.0, 0.0, -0.5, false});
  EXPECT_NEAR(integrate([](double x) { return x * x; }, Measure(s)), 0.4, 1e-12);
}

TEST(Integrate, Region) {
  const Measure m(half_lebesgue_half_atom(0.5));
  const RegionSet left({{0.0, 0.5}}, {});
  EXPECT_NEAR(integrate([](double) { return 1.0; }, m, left), 0.75, 1e-14);
  const RegionSet point({}, {0.5});
  EXPECT_DOUBLE_EQ(integrate([](double) { return 1.0; }, m, point), 0.5);
}

TEST(PushforwardDiscrepancy, Examples) {
  const Measure u(uniform_spec());
  EXPECT_NEAR(pushforward_discrepancy([](double x) { return x; }, u, u, 100), 0.0, 1e-12);
  EXPECT_NEAR(pushforward_discrepancy([](double x) { return 1.0 - x; }, u, u, 100), 0.0, 1e-12);
  EXPECT_NEAR(pushforward_discrepancy([](double x) { return x * x; }, u, u, 100), 0.25, 1e-9);
}
