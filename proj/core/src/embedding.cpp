#include <cmath>
#include <limits>
#include <sstream>

#include "musob/errors.hpp"
#include "musob/format.hpp"
#include "musob/sobolev.hpp"

namespace musob {

CounterexampleSeries counterexample_series(std::span<const double> lengths, std::size_t n_max) {
  if (n_max == 0) throw DomainError("counterexample_series: n_max must be >= 1");
  if (lengths.size() < n_max) {
    throw DomainError("counterexample_series: " + std::to_string(lengths.size()) +
                      " lengths given, n_max is " + std::to_string(n_max));
  }
  CounterexampleSeries s;
  s.index.reserve(n_max);
  s.lengths.reserve(n_max);
  s.partial_b.reserve(n_max);
  s.coefficients.reserve(n_max);
  s.l2mu_partial.reserve(n_max);
  s.l1_partial.reserve(n_max);

  // Kahan sums; the tails are long and the terms tiny.
  double sum_b = 0.0, c_b = 0.0;
  double l2 = 0.0, c_l2 = 0.0;
  double l1 = 0.0, c_l1 = 0.0;
  auto add = [](double& sum, double& comp, double term) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  for (std::size_t k = 0; k < n_max; ++k) {
    const double l = lengths[k];
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw DomainError("counterexample_series: length l_" + std::to_string(k + 1) + " = " +
                        format_double(l) + " is not positive");
    }
    const double n = static_cast<double>(k + 1);
    const double b = n * l;
    add(sum_b, c_b, b);
    const double u = n / sum_b;
    add(l2, c_l2, b / (sum_b * sum_b));
    add(l1, c_l1, b / sum_b);
    s.index.push_back(k + 1);
    s.lengths.push_back(l);
    s.partial_b.push_back(sum_b);
    s.coefficients.push_back(u);
    s.l2mu_partial.push_back(l2);
    s.l1_partial.push_back(l1);
  }
  const std::size_t decade = n_max / 10;
  const double last = s.partial_b.back();
  const double earlier = decade == 0 ? 0.0 : s.partial_b[decade - 1];
  s.embedding_holds = n_max >= 10 && last - earlier <= 1e-12 * last;
  return s;
}

EmbeddingResult embedding_test(const Measure& measure, std::size_t n_max) {
  const auto segs = measure.segments();
  EmbeddingResult r;
  if (segs.empty()) {
    // f = 0 everywhere: 1/f is nowhere integrable and every level set is empty.
    r.inverse_density_integral = std::numeric_limits<double>::infinity();
    return r;
  }
  for (const auto& s : segs) r.inverse_density_integral += s.inverse_density_integral(s.lo, s.hi);
  r.embedded = std::isfinite(r.inverse_density_integral);
  if (r.embedded) return r;

  // l_n = |{1/(n+1) <= f < 1/n}|, empty levels skipped.
  auto sublevel = [&](double level) {
    double total = 0.0;
    for (const auto& s : segs) total += s.sublevel_length(level);
    return total;
  };
  std::vector<double> lengths;
  std::vector<std::size_t> levels;
  double upper = sublevel(1.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double lower = sublevel(1.0 / static_cast<double>(n + 1));
    const double l = upper - lower;
    upper = lower;
    if (l > 0.0) {
      lengths.push_back(l);
      levels.push_back(n);
    }
  }
  if (lengths.empty()) return r;
  CounterexampleSeries series = counterexample_series(lengths, lengths.size());
  // Level indices, and the coefficients and weights that go with them.
  double sum_b = 0.0, l2 = 0.0, l1 = 0.0;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const double n = static_cast<double>(levels[k]);
    const double b = n * lengths[k];
    sum_b += b;
    series.index[k] = levels[k];
    series.partial_b[k] = sum_b;
    series.coefficients[k] = n / sum_b;
    l2 += b / (sum_b * sum_b);
    l1 += b / sum_b;
    series.l2mu_partial[k] = l2;
    series.l1_partial[k] = l1;
  }
  series.embedding_holds = false;
  r.witness = std::move(series);
  return r;
}

EmbeddingResult embedding_test(const MeasureSpec& spec, std::size_t n_max) {
  return embedding_test(Measure(spec), n_max);
}

std::string counterexample_csv(const CounterexampleSeries& series) {
  std::ostringstream out;
  out << "n,length,partial_b,coefficient,l2mu_partial,l1_partial\n";
  const std::size_t count = series.index.size();
  std::size_t next = 1;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = series.index[k];
    const bool last = k + 1 == count;
    if (n < next && !last) continue;
    if (n <= 100) {
      next = n + 1;
    } else {
      next = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * std::pow(10.0, 1.0 / 20.0)));
    }
    const double row[] = {series.lengths[k], series.partial_b[k], series.coefficients[k],
                          series.l2mu_partial[k], series.l1_partial[k]};
    out << n << ',' << format_row(row) << '\n';
  }
  return out.str();
}

}  // namespace musob
