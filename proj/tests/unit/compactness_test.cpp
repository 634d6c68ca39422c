#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "musob/errors.hpp"
#include "musob/sobolev.hpp"

using namespace musob;

namespace {

TangentFieldPtr uniform_field() { return tangent_field(make_measure(fixtures::uniform_spec())); }

MuSobolevFunction constant(const TangentFieldPtr& f, double c) {
  return make_function(f, [c](double) { return c; }, [](double) { return 0.0; }, 32);
}

}  // namespace

TEST(Compactness, ConstantFamily) {
  const auto f = uniform_field();
  const auto u = make_function(f, [](double x) { return x * x; }, [](double x) { return 2 * x; }, 64);
  const std::vector<MuSobolevFunction> family{u, u, u};
  const std::vector<double> probes{0.75, 0.25};
  const auto r = compactness_extract(family, probes, 10.0);
  EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(r.probes, (std::vector<double>{0.25, 0.75}));
  EXPECT_NEAR(r.limits[0], u.value_at(0.25), 1e-15);
  EXPECT_NEAR(r.limits[1], u.value_at(0.75), 1e-15);
  EXPECT_NEAR(r.limits[0], 0.0625, 1e-4);
  EXPECT_TRUE(r.complete);
}

TEST(Compactness, AlternatingFamilyKeepsEvenIndices) {
  const auto f = uniform_field();
  std::vector<MuSobolevFunction> family;
  for (int k = 0; k < 14; ++k) family.push_back(constant(f, k % 2 == 0 ? 1.0 : -1.0));
  const std::vector<double> probes{0.5};
  const auto r = compactness_extract(family, probes, 2.0);
  EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 2, 4, 6, 8, 10, 12}));
  EXPECT_EQ(r.limits[0], 1.0);
}

TEST(Compactness, PowerFamilyTendsToZero) {
  const auto f = uniform_field();
  std::vector<MuSobolevFunction> family;
  for (int k = 1; k <= 40; ++k) {
    family.push_back(make_function(
        f, [k](double x) { return std::pow(x, k) / k; }, [k](double x) { return std::pow(x, k - 1); }, 256));
  }
  std::vector<double> probes;
  for (int i = 1; i <= 99; ++i) probes.push_back(i / 100.0);
  const auto r = compactness_extract(family, probes, 2.0);
  for (double l : r.limits) EXPECT_LE(std::abs(l), 1e-3);
}

TEST(Compactness, Preconditions) {
  const auto f = uniform_field();
  const std::vector<double> probes{0.5};
  EXPECT_THROW((void)compactness_extract({}, probes, 1.0), DomainError);
  const std::vector<MuSobolevFunction> big{constant(f, 5.0)};
  EXPECT_THROW((void)compactness_extract(big, probes, 1.0), PreconditionError);

  const auto af = tangent_field(make_measure(fixtures::corpus_entry("lebesgue_atom").spec));
  const std::vector<MuSobolevFunction> fam{make_function(af, [](double) { return 0.0; }, [](double) { return 0.0; }, 32)};
  const std::vector<double> atom_probe{0.3};
  EXPECT_THROW((void)compactness_extract(fam, atom_probe, 1.0), PreconditionError);
}
