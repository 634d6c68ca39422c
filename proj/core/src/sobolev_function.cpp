#include <algorithm>
#include <cmath>
#include <sstream>

#include "musob/errors.hpp"
#include "musob/format.hpp"
#include "musob/sobolev.hpp"

namespace musob {

double MuSobolevFunction::value_at(double x) const {
  if (grid.empty()) throw PreconditionError("MuSobolevFunction: empty grid");
  if (x <= grid.front()) return values.front();
  if (x >= grid.back()) return values.back();
  const auto it = std::lower_bound(grid.begin(), grid.end(), x);
  const auto k = static_cast<std::size_t>(it - grid.begin());
  if (grid[k] == x) return values[k];
  const double t = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
  return values[k - 1] + t * (values[k] - values[k - 1]);
}

double MuSobolevFunction::cell_derivative(std::size_t k) const {
  if (derivative[k]) return *derivative[k];
  if (derivative[k + 1]) return *derivative[k + 1];
  return (values[k + 1] - values[k]) / (grid[k + 1] - grid[k]);
}

void MuSobolevFunction::check() const {
  if (!field) throw PreconditionError("MuSobolevFunction: no tangent field");
  if (grid.size() < 2) throw PreconditionError("MuSobolevFunction: grid needs at least two points");
  if (values.size() != grid.size() || derivative.size() != grid.size()) {
    throw PreconditionError("MuSobolevFunction: grid, values and derivative sizes differ");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw PreconditionError("MuSobolevFunction: grid must be strictly increasing");
    }
    if (!std::isfinite(values[k])) {
      throw PreconditionError("MuSobolevFunction: non-finite value at x=" + format_double(grid[k]));
    }
    const bool in_v = field->measure()->interval().contains(grid[k]) &&
                      field->region(grid[k]) == RegionLabel::V;
    if (in_v != derivative[k].has_value()) {
      throw PreconditionError("MuSobolevFunction: derivative must be given exactly on V (x=" +
                              format_double(grid[k]) + ")");
    }
    if (derivative[k] && !std::isfinite(*derivative[k])) {
      throw PreconditionError("MuSobolevFunction: non-finite derivative at x=" + format_double(grid[k]));
    }
  }
}

std::vector<double> default_grid(const TangentField& field, std::size_t points) {
  if (points < 2) throw DomainError("default_grid: need at least two points");
  const Measure& m = *field.measure();
  const double lo = m.interval().lo;
  const double hi = m.interval().hi;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> grid;
  grid.reserve(points * 2);
  for (std::size_t k = 0; k < points; ++k) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  grid.back() = hi;

  std::vector<double> features;
  for (const auto& e : field.critical().elements()) {
    features.push_back(e.lo);
    features.push_back(e.hi);
  }
  constexpr std::size_t kMaxAtomsOnGrid = 1u << 16;
  if (m.atoms().size() <= kMaxAtomsOnGrid) {
    for (const auto& a : m.atoms()) features.push_back(a.position);
  }
  grid.insert(grid.end(), features.begin(), features.end());
  for (const auto& s : m.segments()) {
    grid.push_back(s.lo);
    grid.push_back(s.hi);
    if (s.lo < s.center && s.center < s.hi) grid.push_back(s.center);
  }
  constexpr std::size_t kMaxRefined = 4096;
  if (features.size() <= kMaxRefined) {
    for (double p : features) {
      double step = h;
      for (int j = 0; j < 8; ++j) {
        step *= 0.5;
        if (p - step > lo) grid.push_back(p - step);
        if (p + step < hi) grid.push_back(p + step);
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

MuSobolevFunction make_function_on_grid(TangentFieldPtr field, std::vector<double> grid,
                                        const RealFunction& u, const RealFunction& du) {
  MuSobolevFunction f;
  f.field = std::move(field);
  f.grid = std::move(grid);
  f.values.reserve(f.grid.size());
  f.derivative.reserve(f.grid.size());
  const auto& iv = f.field->measure()->interval();
  for (double x : f.grid) {
    f.values.push_back(u(x));
    if (iv.contains(x) && f.field->region(x) == RegionLabel::V) {
      f.derivative.emplace_back(du(x));
    } else {
      f.derivative.emplace_back(std::nullopt);
    }
  }
  f.check();
  return f;
}

MuSobolevFunction make_function(TangentFieldPtr field, const RealFunction& u, const RealFunction& du,
                                std::size_t points) {
  auto grid = default_grid(*field, points);
  return make_function_on_grid(std::move(field), std::move(grid), u, du);
}

namespace {

void require_same_measure(const MuSobolevFunction& u, const Measure& measure) {
  u.check();
  if (u.field->measure().get() != &measure && !(u.field->measure()->spec() == measure.spec())) {
    throw ConsistencyError("mu_norm: function and measure come from different specs");
  }
  const auto& iv = measure.interval();
  if (u.grid.front() > iv.lo || u.grid.back() < iv.hi) {
    throw DomainError("mu_norm: grid [" + format_double(u.grid.front()) + ", " +
                      format_double(u.grid.back()) + "] does not cover the interval");
  }
}

// Regular-set share of the absolutely continuous mass of each grid cell.
std::vector<double> regular_cell_mass(const MuSobolevFunction& u, const Measure& measure) {
  const auto& iv = measure.interval();
  const auto& m_intervals = u.field->critical().intervals();
  std::vector<double> mass(u.size() - 1, 0.0);
  std::size_t mi = 0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double a = std::max(u.grid[k], iv.lo);
    const double b = std::min(u.grid[k + 1], iv.hi);
    if (!(a < b)) continue;
    double cell = measure.ac_mass(a, b);
    while (mi < m_intervals.size() && m_intervals[mi].hi <= a) ++mi;
    for (std::size_t j = mi; j < m_intervals.size() && m_intervals[j].lo < b; ++j) {
      cell -= measure.ac_mass(std::max(a, m_intervals[j].lo), std::min(b, m_intervals[j].hi));
    }
    mass[k] = std::max(cell, 0.0);
  }
  return mass;
}

}  // namespace

NormParts mu_norm(const MuSobolevFunction& u, const Measure& measure) {
  require_same_measure(u, measure);
  const auto& iv = measure.interval();
  NormParts parts;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double a = std::max(u.grid[k], iv.lo);
    const double b = std::min(u.grid[k + 1], iv.hi);
    if (!(a < b)) continue;
    const auto [first, last] = measure.segments_overlapping(a, b);
    if (first == last) continue;
    const double x0 = u.grid[k];
    const double u0 = u.values[k];
    const double slope = (u.values[k + 1] - u.values[k]) / (u.grid[k + 1] - u.grid[k]);
    parts.l2_part += integrate_interval(
        [&](double x) {
          const double v = u0 + slope * (x - x0);
          return v * v;
        },
        measure, a, b, MeasurePart::absolutely_continuous);
  }
  for (const auto& at : measure.atoms()) {
    const double v = u.value_at(at.position);
    parts.l2_part += at.mass * v * v;
  }
  const auto regular = regular_cell_mass(u, measure);
  for (std::size_t k = 0; k < regular.size(); ++k) {
    if (regular[k] == 0.0) continue;
    const double d = u.cell_derivative(k);
    parts.grad_part += d * d * regular[k];
  }
  parts.total_sq = parts.l2_part + parts.grad_part;
  return parts;
}

NormParts mu_norm(const MuSobolevFunction& u) {
  if (!u.field) throw PreconditionError("mu_norm: function has no tangent field");
  return mu_norm(u, *u.field->measure());
}

std::vector<double> tangential_gradient(const MuSobolevFunction& u) {
  std::vector<double> g(u.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.derivative[k]) g[k] = *u.derivative[k];
  }
  return g;
}

double gradient_energy(const MuSobolevFunction& u, const RealFunction& off_regular) {
  const Measure& measure = *u.field->measure();
  require_same_measure(u, measure);
  double energy = mu_norm(u, measure).grad_part;
  auto square = [&](double x) {
    const double v = off_regular(x);
    return v * v;
  };
  for (const auto& m : u.field->critical().intervals()) {
    energy += integrate_interval(square, measure, m.lo, m.hi, MeasurePart::absolutely_continuous);
  }
  for (const auto& at : measure.atoms()) energy += at.mass * square(at.position);
  return energy;
}

std::string diagnostics_csv(std::span<const SequenceDiagnostics> rows) {
  std::ostringstream out;
  out << "n,err_function,err_gradient,sup_norm,bound_claimed,residual\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.err_function) << ',' << format_double(r.err_gradient) << ','
        << format_double(r.sup_norm) << ',' << format_double(r.bound_claimed) << ','
        << format_double(r.residual) << '\n';
  }
  return out.str();
}

}  // namespace musob
