#include <algorithm>
#include <cmath>

#include "musob/errors.hpp"
#include "musob/sobolev.hpp"

namespace musob {

namespace {

// v_n: 1 on each covering component [lo, hi], linear ramps of widths
// left/right down to 0 outside it.
struct Plateau {
  double lo, hi;
  double left, right;
};

class RampProfile {
 public:
  explicit RampProfile(std::vector<Plateau> plateaus) : plateaus_(std::move(plateaus)) {
    double acc = 0.0;
    for (const auto& p : plateaus_) {
      before_.push_back(acc);
      acc += 0.5 * p.left + (p.hi - p.lo) + 0.5 * p.right;
    }
    total_ = acc;
  }

  [[nodiscard]] double v(double x) const {
    const Plateau* p = nearest(x);
    if (p == nullptr) return 0.0;
    if (x >= p->lo && x <= p->hi) return 1.0;
    if (x < p->lo) return p->left > 0.0 ? std::max(0.0, 1.0 - (p->lo - x) / p->left) : 0.0;
    return p->right > 0.0 ? std::max(0.0, 1.0 - (x - p->hi) / p->right) : 0.0;
  }

  // ∫_lo^x v_n.
  [[nodiscard]] double u(double x) const {
    auto it = std::partition_point(plateaus_.begin(), plateaus_.end(),
                                   [&](const Plateau& p) { return p.hi + p.right <= x; });
    const auto k = static_cast<std::size_t>(it - plateaus_.begin());
    const double base = k < before_.size() ? before_[k] : total_;
    if (it == plateaus_.end()) return total_;
    const Plateau& p = *it;
    const double start = p.lo - p.left;
    if (x <= start) return base;
    if (x <= p.lo) {
      const double t = x - start;
      return base + 0.5 * t * t / p.left;
    }
    if (x <= p.hi) return base + 0.5 * p.left + (x - p.lo);
    const double t = x - p.hi;
    return base + 0.5 * p.left + (p.hi - p.lo) + t - 0.5 * t * t / p.right;
  }

  [[nodiscard]] double total() const noexcept { return total_; }
  [[nodiscard]] const std::vector<Plateau>& plateaus() const noexcept { return plateaus_; }

 private:
  [[nodiscard]] const Plateau* nearest(double x) const {
    auto it = std::partition_point(plateaus_.begin(), plateaus_.end(),
                                   [&](const Plateau& p) { return p.hi + p.right < x; });
    if (it == plateaus_.end() || x < it->lo - it->left) return nullptr;
    return &*it;
  }

  std::vector<Plateau> plateaus_;
  std::vector<double> before_;
  double total_ = 0.0;
};

std::vector<ClosedInterval> cover(const std::vector<double>& points, double radius, const Interval& iv) {
  std::vector<ClosedInterval> out;
  for (double p : points) {
    const double a = std::max(iv.lo, p - radius);
    const double b = std::min(iv.hi, p + radius);
    if (!out.empty() && a <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, b);
    } else {
      out.push_back({a, b});
    }
  }
  return out;
}

}  // namespace

SequenceResult null_gradient_sequence(TangentFieldPtr field, int n, std::size_t grid_points) {
  if (n < 1) throw DomainError("null_gradient_sequence: n must be >= 1");
  const Measure& measure = *field->measure();
  const auto& iv = measure.interval();
  const auto& points = field->singular().points();
  if (points.empty()) {
    throw PreconditionError("null_gradient_sequence: the singular support A is empty, nothing to certify");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  auto lebesgue = [](const std::vector<ClosedInterval>& v) {
    double s = 0.0;
    for (const auto& c : v) s += c.length();
    return s;
  };
  auto ac_on = [&](const std::vector<ClosedInterval>& v) {
    double s = 0.0;
    for (const auto& c : v) s += measure.ac_mass(c.lo, c.hi);
    return s;
  };

  // Omega_n: every atom of A is inside, so mu(Omega_n \ A) is its
  // absolutely continuous mass.
  double radius = inv_n / (8.0 * static_cast<double>(points.size()));
  std::vector<ClosedInterval> omega = cover(points, radius, iv);
  for (int it = 0; it < 60 && ac_on(omega) + lebesgue(omega) > 0.5 * inv_n; ++it) {
    radius *= 0.5;
    omega = cover(points, radius, iv);
  }

  // Ramps outside each component, kept clear of the neighbours.
  double width = inv_n / (4.0 * static_cast<double>(omega.size()));
  std::vector<Plateau> plateaus;
  auto build = [&] {
    plateaus.clear();
    for (std::size_t k = 0; k < omega.size(); ++k) {
      const double room_left = k == 0 ? omega[k].lo - iv.lo : 0.5 * (omega[k].lo - omega[k - 1].hi);
      const double room_right =
          k + 1 == omega.size() ? iv.hi - omega[k].hi : 0.5 * (omega[k + 1].lo - omega[k].hi);
      plateaus.push_back({omega[k].lo, omega[k].hi, std::min(width, room_left),
                          std::min(width, room_right)});
    }
  };
  auto ramp_mass = [&] {
    double s = 0.0;
    for (const auto& p : plateaus) {
      s += p.left + p.right;
      s += measure.ac_mass(p.lo - p.left, p.lo) + measure.ac_mass(p.hi, p.hi + p.right);
    }
    return s;
  };
  build();
  for (int it = 0; it < 60 && ramp_mass() > inv_n; ++it) {
    width *= 0.5;
    build();
  }
  const RampProfile profile(plateaus);

  SequenceDiagnostics diag;
  diag.n = n;
  diag.bound_claimed = 4.0 * inv_n;
  diag.sup_norm = profile.total();

  const auto v_sq = [&](double x) {
    const double v = profile.v(x);
    return v * v;
  };
  const auto u_sq = [&](double x) {
    const double v = profile.u(x);
    return v * v;
  };
  std::vector<double> breaks{iv.lo, iv.hi};
  for (const auto& p : plateaus) {
    breaks.insert(breaks.end(), {p.lo - p.left, p.lo, p.hi, p.hi + p.right});
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // v_n = 1 = 1_A on every atom, so only the absolutely continuous part
  // contributes to the gradient error.
  double grad_sq = 0.0;
  for (const auto& p : plateaus) {
    grad_sq += measure.ac_mass(p.lo, p.hi);
    grad_sq += integrate_interval(v_sq, measure, p.lo - p.left, p.lo, MeasurePart::absolutely_continuous);
    grad_sq += integrate_interval(v_sq, measure, p.hi, p.hi + p.right, MeasurePart::absolutely_continuous);
  }
  double fun_sq = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k] < iv.lo || breaks[k + 1] > iv.hi) continue;
    fun_sq += integrate_interval(u_sq, measure, breaks[k], breaks[k + 1], MeasurePart::absolutely_continuous);
  }
  for (const auto& at : measure.atoms()) fun_sq += at.mass * u_sq(at.position);

  diag.err_gradient = std::sqrt(grad_sq);
  diag.err_function = std::sqrt(fun_sq);
  diag.residual = grad_sq;

  std::vector<double> grid = default_grid(*field, grid_points);
  for (double b : breaks) {
    if (b >= iv.lo && b <= iv.hi) grid.push_back(b);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  SequenceResult result;
  result.u_n = make_function_on_grid(field, std::move(grid), [&](double x) { return profile.u(x); },
                                     [&](double x) { return profile.v(x); });
  result.diagnostics = diag;
  return result;
}

SequenceResult null_gradient_sequence(const MeasureSpec& spec, int n) {
  return null_gradient_sequence(tangent_field(make_measure(spec)), n);
}

}  // namespace musob
