#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "musob/errors.hpp"
#include "musob/sobolev.hpp"

using namespace musob;

TEST(EmbeddingTest, Examples) {
  EXPECT_TRUE(embedding_test(fixtures::uniform_spec()).embedded);
  EXPECT_TRUE(embedding_test(fixtures::power_spec(0.5, 0.5)).embedded);
  MeasureSpec fx = fixtures::power_spec(0.0, 1.0);
  const auto r = embedding_test(fx, 1000);
  EXPECT_FALSE(r.embedded);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->index.size(), 1000u);
  // l_n = 1/n - 1/(n+1) for f(x) = x.
  EXPECT_NEAR(r.witness->lengths[0], 0.5, 1e-15);
  EXPECT_NEAR(r.witness->lengths[9], 1.0 / 10 - 1.0 / 11, 1e-15);
}

TEST(EmbeddingTest, NoDensity) {
  const auto r = embedding_test(fixtures::corpus_entry("cantor_2").spec);
  EXPECT_FALSE(r.embedded);
  EXPECT_FALSE(r.witness.has_value());
  EXPECT_TRUE(std::isinf(r.inverse_density_integral));
}

TEST(EmbeddingTest, SkipsEmptyLevels) {
  // f = 0.3 + x on [0, 1]: only the levels n = 1, 2, 3 are met.
  MeasureSpec s;
  s.segments = {{0.0, 0.7, 1.0, -0.3, 1.0, false}};
  s.interval = {0.0, 0.7};
  const auto r = embedding_test(s, 50);
  EXPECT_TRUE(r.embedded);
  MeasureSpec g = fixtures::power_spec(0.0, 2.0, 4.0);
  const auto w = embedding_test(g, 20);
  ASSERT_TRUE(w.witness.has_value());
  // 4x^2 < 1/n starts below x = 1/2, so n = 1, 2, ... all appear.
  EXPECT_EQ(w.witness->index.front(), 1u);
}

TEST(CounterexampleSeries, Formulas) {
  const std::vector<double> l = {0.5, 0.25, 0.125};
  const auto s = counterexample_series(l, 3);
  EXPECT_EQ(s.partial_b, (std::vector<double>{0.5, 1.0, 1.375}));
  EXPECT_DOUBLE_EQ(s.coefficients[1], 2.0 / 1.0);
  EXPECT_DOUBLE_EQ(s.l2mu_partial[0], 0.5 / 0.25);
  EXPECT_DOUBLE_EQ(s.l1_partial[2], 1.0 + 0.5 + 0.375 / 1.375);
}

TEST(CounterexampleSeries, Errors) {
  const std::vector<double> bad = {0.5, 0.0};
  EXPECT_THROW((void)counterexample_series(bad, 2), DomainError);
  EXPECT_THROW((void)counterexample_series(bad, 3), DomainError);
}

TEST(CounterexampleSeries, GeometricLengthsConverge) {
  std::vector<double> l;
  // The last decade (n > 50) adds about 2^-50 relative: below 1e-12.
  for (int n = 1; n <= 500; ++n) l.push_back(std::pow(2.0, -n));
  EXPECT_TRUE(counterexample_series(l, 500).embedding_holds);
  // With 200 terms the last decade still adds 2^-20.
  EXPECT_FALSE(counterexample_series(l, 200).embedding_holds);
}

TEST(CounterexampleSeries, DivergentCases) {
  std::vector<double> harmonic;
  std::vector<double> square;
  for (std::size_t n = 1; n <= 100000; ++n) {
    const double x = static_cast<double>(n);
    harmonic.push_back(1.0 / (x * (x + 1.0)));
    square.push_back(1.0 / (x * x));
  }
  for (const auto* l : {&harmonic, &square}) {
    const auto s = counterexample_series(*l, l->size());
    EXPECT_FALSE(s.embedding_holds);
    // l2 partial sums increase and stay below 1/b_1 + 1/S_1 (telescoping).
    for (std::size_t k = 1; k < s.l2mu_partial.size(); ++k) {
      EXPECT_GE(s.l2mu_partial[k], s.l2mu_partial[k - 1]);
    }
    EXPECT_LE(s.l2mu_partial.back(), 1.0 / s.partial_b[0] + 1.0 / s.partial_b[0]);
    // l1 partial sums keep growing across doubling prefixes.
    for (std::size_t n = 1000; n * 2 <= s.l1_partial.size(); n *= 2) {
      EXPECT_GT(s.l1_partial[2 * n - 1] - s.l1_partial[n - 1], 0.0);
    }
  }
  // l_n = 1/n^2: b_n = 1/n, S_n = H_n and Σ b_n / S_n grows like
  // log H_N, so the last decade adds about log(H_{10^5} / H_{10^4}).
  const auto s = counterexample_series(square, square.size());
  auto harmonic_number = [](double n) { return std::log(n) + 0.5772156649015329 + 0.5 / n; };
  EXPECT_NEAR(s.l1_partial.back() - s.l1_partial[9999], std::log(harmonic_number(1e5) / harmonic_number(1e4)),
              2e-3);
}

TEST(CounterexampleCsv, Thinned) {
  std::vector<double> l;
  for (std::size_t n = 1; n <= 5000; ++n) l.push_back(1.0 / (n * (n + 1.0)));
  const auto csv = counterexample_csv(counterexample_series(l, l.size()));
  std::size_t rows = 0;
  for (char c : csv) rows += c == '\n';
  EXPECT_LT(rows, 100 + 40 + 3);
  EXPECT_EQ(csv.rfind("5000,", std::string::npos) != std::string::npos, true);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,length,partial_b,coefficient,l2mu_partial,l1_partial");
}
