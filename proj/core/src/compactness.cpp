#include <algorithm>
#include <cmath>

#include "musob/errors.hpp"
#include "musob/format.hpp"
#include "musob/sobolev.hpp"

namespace musob {

namespace {

bool monotone(const std::vector<double>& v) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) up = false;
    if (v[i] > v[i - 1]) down = false;
  }
  return up || down;
}

// Last even-column entry of Wynn's epsilon table over the final values.
double wynn_epsilon(std::span<const double> s) {
  constexpr std::size_t kWindow = 15;
  if (s.size() > kWindow) s = s.subspan(s.size() - kWindow);
  std::vector<double> prev(s.size() + 1, 0.0);  // column j - 1
  std::vector<double> cur(s.begin(), s.end());  // column j
  double estimate = s.back();
  for (std::size_t j = 0; cur.size() > 1; ++j) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
      const double diff = cur[k + 1] - cur[k];
      if (diff == 0.0 || !std::isfinite(diff)) return estimate;
      next[k] = prev[k + 1] + 1.0 / diff;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (j % 2 == 1) {
      if (!std::isfinite(cur.back())) return estimate;
      estimate = cur.back();
    }
  }
  return estimate;
}

}  // namespace

CompactnessResult compactness_extract(std::span<const MuSobolevFunction> family,
                                      std::span<const double> probe_grid, double norm_bound, double tol) {
  if (family.empty()) throw DomainError("compactness_extract: empty family");
  if (!(tol > 0.0)) throw DomainError("compactness_extract: tol must be positive");
  const TangentFieldPtr field = family.front().field;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double norm = std::sqrt(mu_norm(family[i]).total_sq);
    if (norm > norm_bound * (1.0 + 1e-12)) {
      throw PreconditionError("compactness_extract: member " + std::to_string(i) + " has mu-norm " +
                              format_double(norm) + " above the bound " + format_double(norm_bound));
    }
  }
  CompactnessResult r;
  r.probes.assign(probe_grid.begin(), probe_grid.end());
  std::sort(r.probes.begin(), r.probes.end());
  for (double x : r.probes) {
    if (field->region(x) != RegionLabel::V) {
      throw PreconditionError("compactness_extract: probe " + format_double(x) + " is not in V");
    }
  }

  r.indices.resize(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) r.indices[i] = i;
  for (double x : r.probes) {
    for (;;) {
      std::vector<double> values;
      for (auto i : r.indices) values.push_back(family[i].value_at(x));
      if (monotone(values)) break;
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      const double mid = 0.5 * (*lo + *hi);
      std::vector<std::size_t> lower, upper;
      for (std::size_t k = 0; k < values.size(); ++k) {
        (values[k] < mid ? lower : upper).push_back(r.indices[k]);
      }
      r.indices = upper.size() >= lower.size() ? std::move(upper) : std::move(lower);
    }
  }

  std::size_t short_probes = 0;
  for (double x : r.probes) {
    std::vector<double> values;
    for (auto i : r.indices) values.push_back(family[i].value_at(x));
    bool cauchy = values.size() >= 4;
    for (std::size_t k = values.size() >= 4 ? values.size() - 3 : values.size(); k < values.size(); ++k) {
      if (std::abs(values[k] - values[k - 1]) > tol) cauchy = false;
    }
    double limit = values.back();
    if (!cauchy && values.size() >= 3) limit = wynn_epsilon(values);
    r.limits.push_back(limit);
    r.extrapolated.push_back(!cauchy && values.size() >= 3);
    if (!cauchy && std::abs(values.back() - limit) > std::sqrt(tol)) ++short_probes;
  }
  if (short_probes > 0) {
    r.complete = false;
    r.notice = "finite family: the selected values are not Cauchy within tolerance at " +
               std::to_string(short_probes) + " probe(s); limits there are extrapolated";
  }
  return r;
}

}  // namespace musob
