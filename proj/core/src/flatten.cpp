// Flattening of a smooth u on the critical set M.
//
// Pipeline per component (a, b) of Omega_n:
//   [a, a + e/2]      quadratic blend Q from (u(a), u'(a)) to slope 0
//   [a + e/2, a']     constant L0 = Q(e/2), a' = a + e
//   [a', b']          step function: constant on every piece of M, the
//                     pieces of V in between take the value on their left,
//                     jumps only at points of M
//   [b', b]           mirror image of the left blend
// Each jump is then replaced by a smooth rise on a window next to it, on
// the side where the density is smallest.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "musob/errors.hpp"
#include "musob/format.hpp"
#include "musob/sobolev.hpp"

namespace musob {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class ProfileKind { linear, power, inverse_density };

// Rise of a jump at y over the window (y - eps, y) (side = -1) or
// (y, y + eps) (side = +1). F(tau) is the fraction of the jump reached at
// distance tau from y, F(eps) = 1.
struct Window {
  double y = 0.0;
  double side = 1.0;
  double eps = 0.0;
  double jump = 0.0;
  double before = 0.0;  // step value left of y
  double after = 0.0;   // step value right of y
  ProfileKind kind = ProfileKind::linear;
  // power: density coeff * tau^alpha, profile max(tau, eta)^-alpha / A(eps)
  double coeff = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  double a_eps = 1.0;
  // inverse_density: profile 1 / (f * inv_total)
  const DensitySegment* segment = nullptr;
  double inv_total = 0.0;
  double cost = 0.0;

  [[nodiscard]] double lo() const { return side < 0 ? y - eps : y; }
  [[nodiscard]] double hi() const { return side < 0 ? y : y + eps; }
  [[nodiscard]] double x_at(double tau) const { return y + side * tau; }

  [[nodiscard]] double fraction(double tau) const {
    switch (kind) {
      case ProfileKind::linear:
        return tau / eps;
      case ProfileKind::power:
        return power_primitive(tau) / a_eps;
      case ProfileKind::inverse_density: {
        const double x = x_at(tau);
        return segment->inverse_density_integral(std::min(x, y), std::max(x, y)) / inv_total;
      }
    }
    return 0.0;
  }

  [[nodiscard]] double fraction_rate(double tau) const {
    switch (kind) {
      case ProfileKind::linear:
        return 1.0 / eps;
      case ProfileKind::power:
        return std::pow(std::max(tau, eta), -alpha) / a_eps;
      case ProfileKind::inverse_density:
        return 1.0 / (segment->density(x_at(tau)) * inv_total);
    }
    return 0.0;
  }

  [[nodiscard]] double value_tau(double tau) const {
    return side < 0 ? after - jump * fraction(tau) : before + jump * fraction(tau);
  }
  [[nodiscard]] double slope_tau(double tau) const { return jump * fraction_rate(tau); }

  // ∫_0^tau max(s, eta)^-alpha ds.
  [[nodiscard]] double power_primitive(double tau) const {
    if (tau <= eta) return tau * std::pow(eta, -alpha);
    return std::pow(eta, 1.0 - alpha) + power_tail(eta, tau, alpha);
  }

  static double power_tail(double from, double to, double alpha) {
    if (std::abs(alpha - 1.0) < 1e-12) return std::log(to / from);
    return (std::pow(to, 1.0 - alpha) - std::pow(from, 1.0 - alpha)) / (1.0 - alpha);
  }
};

// Closed-form cost ∫ (J F'(tau))^2 c tau^alpha dtau of a power window.
double power_cost(double jump, double coeff, double alpha, double eta, double eps) {
  const double a = std::pow(eta, 1.0 - alpha) + Window::power_tail(eta, eps, alpha);
  const double b = std::pow(eta, 1.0 - alpha) / (alpha + 1.0) + Window::power_tail(eta, eps, alpha);
  return coeff * jump * jump * b / (a * a);
}

struct Run {
  double lo, hi, value;
};

struct Jump {
  double y;
  double jump;
  double before;
  double after;
  double room_left;
  double room_right;
};

struct ComponentPlan {
  double a = 0.0, b = 0.0;
  bool blend_left = false, blend_right = false;
  double eps = 0.0;  // blend length
  double ua = 0.0, sa = 0.0, ub = 0.0, sb = 0.0;
  double a1 = 0.0, b1 = 0.0;
  double left_const = kNaN, right_const = kNaN;
  std::vector<Run> runs;
  std::vector<Jump> jumps;
  std::vector<Window> windows;
};

class FlattenedFunction {
 public:
  FlattenedFunction(const RealFunction& u, const RealFunction& du, std::vector<ComponentPlan> plans)
      : u_(u), du_(du), plans_(std::move(plans)) {}

  [[nodiscard]] const std::vector<ComponentPlan>& plans() const noexcept { return plans_; }

  [[nodiscard]] double value(double x) const {
    const ComponentPlan* p = find(x);
    if (p == nullptr) return u_(x);
    const double half = 0.5 * p->eps;
    if (p->blend_left && x <= p->a + half) {
      const double t = x - p->a;
      return p->ua + p->sa * t - p->sa * t * t / p->eps;
    }
    if (p->blend_right && x >= p->b - half) {
      const double t = p->b - x;
      return p->ub - p->sb * t + p->sb * t * t / p->eps;
    }
    if (x < p->a1) return p->left_const;
    if (x > p->b1) return p->right_const;
    for (const auto& w : p->windows) {
      if (w.lo() <= x && x <= w.hi()) return w.value_tau(std::abs(x - w.y));
    }
    return step(*p, x);
  }

  [[nodiscard]] double slope(double x) const {
    const ComponentPlan* p = find(x);
    if (p == nullptr) return du_(x);
    const double half = 0.5 * p->eps;
    if (p->blend_left && x <= p->a + half) return p->sa * (1.0 - 2.0 * (x - p->a) / p->eps);
    if (p->blend_right && x >= p->b - half) return p->sb * (1.0 - 2.0 * (p->b - x) / p->eps);
    if (x < p->a1 || x > p->b1) return 0.0;
    for (const auto& w : p->windows) {
      if (w.lo() < x && x < w.hi()) return w.slope_tau(std::abs(x - w.y));
    }
    return 0.0;
  }

 private:
  [[nodiscard]] const ComponentPlan* find(double x) const {
    auto it = std::partition_point(plans_.begin(), plans_.end(),
                                   [&](const ComponentPlan& p) { return p.b < x; });
    if (it == plans_.end() || x < it->a) return nullptr;
    return &*it;
  }

  static double step(const ComponentPlan& p, double x) {
    auto it = std::partition_point(p.runs.begin(), p.runs.end(), [&](const Run& r) { return r.hi < x; });
    if (it == p.runs.end()) return p.runs.empty() ? p.right_const : p.runs.back().value;
    return it->value;
  }

  const RealFunction& u_;
  const RealFunction& du_;
  std::vector<ComponentPlan> plans_;
};

struct OpenPiece {
  double a, b;
  bool closed_left, closed_right;  // endpoint belongs to Omega_n (interval edges)
};

class Flattener {
 public:
  Flattener(TangentFieldPtr field, const RealFunction& u, const RealFunction& du, int n)
      : field_(std::move(field)),
        measure_(*field_->measure()),
        u_(u),
        du_(du),
        n_(n),
        inv_n_(1.0 / static_cast<double>(n)),
        elements_(field_->critical().elements()) {}

  SequenceResult run(std::size_t grid_points);

 private:
  void choose_retained();
  [[nodiscard]] bool retained(double x) const {
    return std::binary_search(retained_.begin(), retained_.end(), x);
  }
  [[nodiscard]] std::vector<OpenPiece> omega(double delta) const;
  [[nodiscard]] double excess_mass(const std::vector<OpenPiece>& pieces) const;
  [[nodiscard]] double critical_ac(double a, double b) const;
  [[nodiscard]] bool atoms_inside(double a, double b) const {
    return measure_.atom_mass(a, b, false, false) > 0.0;
  }
  ComponentPlan plan(const OpenPiece& piece, double delta) const;
  Window smooth(const Jump& jump, double target) const;
  bool try_side(const Jump& jump, double side, double eps, double target, Window& out) const;
  [[nodiscard]] double verify(const Window& w) const;
  void diagnose(const FlattenedFunction& f, SequenceDiagnostics& d) const;

  template <class G>
  double window_integral(const Window& w, const G& g) const;

  TangentFieldPtr field_;
  const Measure& measure_;
  const RealFunction& u_;
  const RealFunction& du_;
  int n_;
  double inv_n_;
  std::vector<ClosedInterval> elements_;
  std::vector<double> retained_;
};

void Flattener::choose_retained() {
  std::vector<Atom> atoms(measure_.atoms().begin(), measure_.atoms().end());
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
    if (x.mass != y.mass) return x.mass > y.mass;
    return x.position < y.position;
  });
  const auto keep = std::min<std::size_t>(atoms.size(), static_cast<std::size_t>(n_));
  for (std::size_t i = 0; i < keep; ++i) retained_.push_back(atoms[i].position);
  std::sort(retained_.begin(), retained_.end());
}

std::vector<OpenPiece> Flattener::omega(double delta) const {
  const auto& iv = measure_.interval();
  std::vector<ClosedInterval> cover;
  for (const auto& e : elements_) {
    const double a = std::max(iv.lo, e.lo - delta);
    const double b = std::min(iv.hi, e.hi + delta);
    if (!cover.empty() && a <= cover.back().hi) {
      cover.back().hi = std::max(cover.back().hi, b);
    } else {
      cover.push_back({a, b});
    }
  }
  // Remove the retained atoms and drop the pieces that miss M.
  std::vector<OpenPiece> pieces;
  for (const auto& c : cover) {
    std::vector<double> cuts{c.lo};
    for (auto it = std::lower_bound(retained_.begin(), retained_.end(), c.lo);
         it != retained_.end() && *it <= c.hi; ++it) {
      if (*it > c.lo && *it < c.hi) cuts.push_back(*it);
    }
    cuts.push_back(c.hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      OpenPiece p{cuts[k], cuts[k + 1], false, false};
      p.closed_left = k == 0 && p.a == iv.lo && !retained(p.a);
      p.closed_right = k + 2 == cuts.size() && p.b == iv.hi && !retained(p.b);
      const bool meets = std::any_of(elements_.begin(), elements_.end(), [&](const ClosedInterval& e) {
        const bool open_hit = e.lo < p.b && e.hi > p.a;
        const bool edge_hit = (p.closed_left && e.lo <= p.a && p.a <= e.hi) ||
                              (p.closed_right && e.lo <= p.b && p.b <= e.hi);
        return open_hit || edge_hit;
      });
      if (meets && p.a < p.b) pieces.push_back(p);
    }
  }
  return pieces;
}

double Flattener::critical_ac(double a, double b) const {
  double s = 0.0;
  for (const auto& m : field_->critical().intervals()) {
    if (m.hi <= a || m.lo >= b) continue;
    s += measure_.ac_mass(std::max(a, m.lo), std::min(b, m.hi));
  }
  return s;
}

// mu(Omega_n \ (M \ retained)); retained atoms are never inside Omega_n.
double Flattener::excess_mass(const std::vector<OpenPiece>& pieces) const {
  double s = 0.0;
  for (const auto& p : pieces) {
    s += measure_.ac_mass(p.a, p.b) - critical_ac(p.a, p.b);
    for (const auto& at : measure_.atoms()) {
      const bool inside = (at.position > p.a || (p.closed_left && at.position == p.a)) &&
                          (at.position < p.b || (p.closed_right && at.position == p.b));
      if (inside && !field_->critical().contains(at.position)) s += at.mass;
    }
  }
  return std::max(s, 0.0);
}

ComponentPlan Flattener::plan(const OpenPiece& piece, double delta) const {
  ComponentPlan p;
  p.a = piece.a;
  p.b = piece.b;
  p.blend_left = !piece.closed_left;
  p.blend_right = !piece.closed_right;

  // Blend length: inside delta, clear of M where possible and of atoms.
  double eps = std::min(0.25 * delta, 0.25 * (p.b - p.a));
  for (const auto& e : elements_) {
    if (p.blend_left && e.lo > p.a && e.lo < p.b) eps = std::min(eps, 0.5 * (e.lo - p.a));
    if (p.blend_right && e.hi < p.b && e.hi > p.a) eps = std::min(eps, 0.5 * (p.b - e.hi));
    // An end cut at a retained atom inside M: keep part of M past the blend.
    if (p.blend_left && e.lo <= p.a && e.hi > p.a) eps = std::min(eps, 0.5 * (std::min(e.hi, p.b) - p.a));
    if (p.blend_right && e.hi >= p.b && e.lo < p.b) eps = std::min(eps, 0.5 * (p.b - std::max(e.lo, p.a)));
  }
  for (int it = 0; it < 60; ++it) {
    const bool clash = (p.blend_left && atoms_inside(p.a, p.a + eps)) ||
                       (p.blend_right && atoms_inside(p.b - eps, p.b));
    if (!clash) break;
    eps *= 0.5;
  }
  p.eps = eps;
  p.ua = u_(p.a);
  p.sa = du_(p.a);
  p.ub = u_(p.b);
  p.sb = du_(p.b);
  p.a1 = p.blend_left ? p.a + eps : p.a;
  p.b1 = p.blend_right ? p.b - eps : p.b;
  if (p.blend_left) p.left_const = p.ua + 0.25 * p.sa * eps;
  if (p.blend_right) p.right_const = p.ub - 0.25 * p.sb * eps;

  // Pieces of M inside [a', b'] and their constants (the mu-mean of u on
  // pieces that carry mass, inherited otherwise).
  struct Element {
    double lo, hi, value;
  };
  std::vector<Element> parts;
  for (const auto& e : elements_) {
    const double lo = std::max(e.lo, p.a1);
    const double hi = std::min(e.hi, p.b1);
    if (lo > hi) continue;
    if (!(e.lo < p.b && e.hi > p.a) && !(piece.closed_left && e.lo <= p.a && p.a <= e.hi) &&
        !(piece.closed_right && e.lo <= p.b && p.b <= e.hi)) {
      continue;
    }
    const double mass = measure_.ac_mass(lo, hi) + measure_.atom_mass(lo, hi);
    double value = kNaN;
    if (mass > 0.0) value = integrate_interval(u_, measure_, lo, hi) / mass;
    parts.push_back({lo, hi, value});
  }

  double current = p.left_const;
  double cursor = p.a1;
  std::vector<Run> runs;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto& e = parts[k];
    if (std::isnan(e.value)) e.value = current;
    if (e.lo > cursor) runs.push_back({cursor, e.lo, current});
    if (!std::isnan(current) && !std::isnan(e.value) && e.value != current) {
      const double left_edge = runs.empty() ? p.a1 : runs.back().lo;
      const double right_edge = e.hi > e.lo ? e.hi : (k + 1 < parts.size() ? parts[k + 1].lo : p.b1);
      p.jumps.push_back({e.lo, e.value - current, current, e.value, e.lo - left_edge, right_edge - e.lo});
    }
    runs.push_back({e.lo, e.hi, e.value});
    current = e.value;
    cursor = e.hi;
  }
  // Values still undefined at the start take the first defined one.
  double first_defined = current;
  for (const auto& r : runs) {
    if (!std::isnan(r.value)) {
      first_defined = r.value;
      break;
    }
  }
  if (std::isnan(first_defined)) first_defined = p.right_const;
  if (std::isnan(first_defined)) first_defined = u_(0.5 * (p.a + p.b));
  for (auto& r : runs) {
    if (std::isnan(r.value)) r.value = first_defined;
  }
  if (std::isnan(current)) current = first_defined;
  if (std::isnan(p.left_const)) p.left_const = first_defined;

  if (p.blend_right && current != p.right_const) {
    const double y = parts.empty() ? cursor : parts.back().hi;
    const double left_edge = parts.empty() ? p.a1 : (parts.back().hi > parts.back().lo ? parts.back().lo
                                                                                       : (runs.empty() ? p.a1 : runs.back().lo));
    if (!p.jumps.empty() && p.jumps.back().y == y) {
      // A point of M carrying both jumps: merge them.
      auto& j = p.jumps.back();
      j.jump = p.right_const - j.before;
      j.after = p.right_const;
      j.room_right = p.b1 - y;
      runs.back().value = p.right_const;
    } else {
      p.jumps.push_back({y, p.right_const - current, current, p.right_const, y - left_edge, p.b1 - y});
    }
    if (p.b1 > y) runs.push_back({y, p.b1, p.right_const});
    current = p.right_const;
  } else if (p.b1 > cursor) {
    runs.push_back({cursor, p.b1, current});
  }
  if (std::isnan(p.right_const)) p.right_const = current;
  // Drop degenerate runs; a jump point keeps the right value in the step.
  runs.erase(std::remove_if(runs.begin(), runs.end(), [](const Run& r) { return !(r.lo < r.hi); }),
             runs.end());
  if (runs.empty()) runs.push_back({p.a1, p.b1, current});
  p.runs = std::move(runs);
  p.jumps.erase(std::remove_if(p.jumps.begin(), p.jumps.end(), [](const Jump& j) { return j.jump == 0.0; }),
                p.jumps.end());
  return p;
}

bool Flattener::try_side(const Jump& jump, double side, double eps, double target, Window& out) const {
  Window w;
  w.y = jump.y;
  w.side = side;
  w.eps = eps;
  w.jump = jump.jump;
  w.before = jump.before;
  w.after = jump.after;
  const double lo = w.lo();
  const double hi = w.hi();
  if (!(lo < hi) || atoms_inside(lo, hi)) return false;
  const auto [first, last] = measure_.segments_overlapping(lo, hi);
  if (first == last) {
    w.kind = ProfileKind::linear;
    w.cost = 0.0;
    out = w;
    return true;
  }
  if (last - first != 1) return false;
  const DensitySegment& s = measure_.segments()[first];
  if (s.lo > lo || s.hi < hi) return false;
  if (s.power != 0.0 && s.center == w.y) {
    w.kind = ProfileKind::power;
    w.coeff = s.coeff;
    w.alpha = s.power;
    double eta = 0.5 * eps;
    double cost = power_cost(w.jump, w.coeff, w.alpha, eta, eps);
    for (int it = 0; it < 2000 && cost > target * (1.0 - 1e-6) && eta > 1e-290; ++it) {
      const double next_eta = 0.5 * eta;
      const double next = power_cost(w.jump, w.coeff, w.alpha, next_eta, eps);
      if (!std::isfinite(next)) break;
      eta = next_eta;
      cost = next;
    }
    if (!(cost <= target)) return false;
    w.eta = eta;
    w.a_eps = w.power_primitive(eps);
    w.cost = cost;
    out = w;
    return true;
  }
  // Any other density is bounded below on the window unless its center
  // sits in the closure, which the caller avoids by shrinking.
  if (s.power != 0.0 && lo <= s.center && s.center <= hi) return false;
  w.kind = ProfileKind::inverse_density;
  w.segment = &s;
  w.inv_total = s.inverse_density_integral(lo, hi);
  if (!std::isfinite(w.inv_total) || !(w.inv_total > 0.0)) return false;
  w.cost = w.jump * w.jump / w.inv_total;
  if (!(w.cost <= target)) return false;
  out = w;
  return true;
}

template <class G>
double Flattener::window_integral(const Window& w, const G& g) const {
  // g is a function of tau; the absolutely continuous part only (windows
  // hold no atoms).
  if (w.kind == ProfileKind::power) {
    double total = integrate_power_weight(g, w.coeff, w.alpha, 0.0, w.eta);
    for (double a = w.eta; a < w.eps; a *= 2.0) {
      total += integrate_power_weight(g, w.coeff, w.alpha, a, std::min(2.0 * a, w.eps));
    }
    return total;
  }
  return integrate_interval([&](double x) { return g(std::abs(x - w.y)); }, measure_, w.lo(), w.hi(),
                            MeasurePart::absolutely_continuous);
}

double Flattener::verify(const Window& w) const {
  return window_integral(w, [&](double tau) {
    const double g = w.slope_tau(tau);
    return g * g;
  });
}

Window Flattener::smooth(const Jump& jump, double target) const {
  bool found = false;
  Window best;
  for (double side : {-1.0, 1.0}) {
    double eps = (side < 0 ? jump.room_left : jump.room_right) / 3.0;
    for (int it = 0; it < 60 && eps > 0.0; ++it, eps *= 0.5) {
      Window w;
      if (!try_side(jump, side, eps, target, w)) continue;
      const double verified = verify(w);
      if (verified > target * (1.0 + 1e-9)) continue;
      w.cost = verified;
      if (!found || w.cost < best.cost) {
        best = w;
        found = true;
      }
      break;
    }
  }
  if (!found) {
    throw UnsupportedSpecError("flatten_critical_sequence: cannot smooth the jump at x=" +
                               format_double(jump.y) + " with derivative mass <= " + format_double(target));
  }
  return best;
}

void Flattener::diagnose(const FlattenedFunction& f, SequenceDiagnostics& d) const {
  const auto& M = field_->critical();
  double fun_sq = 0.0, grad_sq = 0.0, residual = 0.0;
  for (const auto& p : f.plans()) {
    std::vector<double> cuts{p.a, p.b, p.a1, p.b1};
    if (p.blend_left) cuts.push_back(p.a + 0.5 * p.eps);
    if (p.blend_right) cuts.push_back(p.b - 0.5 * p.eps);
    for (const auto& r : p.runs) {
      cuts.push_back(r.lo);
      cuts.push_back(r.hi);
    }
    for (const auto& w : p.windows) {
      cuts.push_back(w.lo());
      cuts.push_back(w.hi());
    }
    for (const auto& m : M.intervals()) {
      if (m.lo > p.a && m.lo < p.b) cuts.push_back(m.lo);
      if (m.hi > p.a && m.hi < p.b) cuts.push_back(m.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k], hi = cuts[k + 1];
      if (lo < p.a || hi > p.b) continue;
      const double mid = 0.5 * (lo + hi);
      const bool critical = M.contains(mid);
      const Window* win = nullptr;
      for (const auto& w : p.windows) {
        if (w.lo() <= lo && hi <= w.hi()) win = &w;
      }
      if (win != nullptr) {
        const Window& w = *win;
        fun_sq += window_integral(w, [&](double tau) {
          const double e = w.value_tau(tau) - u_(w.x_at(tau));
          return e * e;
        });
        const double g_sq = window_integral(w, [&](double tau) {
          const double g = w.slope_tau(tau);
          const double e = critical ? g : g - du_(w.x_at(tau));
          return e * e;
        });
        grad_sq += g_sq;
        if (critical) residual += g_sq;
        continue;
      }
      fun_sq += integrate_interval(
          [&](double x) {
            const double e = f.value(x) - u_(x);
            return e * e;
          },
          measure_, lo, hi, MeasurePart::absolutely_continuous);
      const double g_sq = integrate_interval(
          [&](double x) {
            const double e = critical ? f.slope(x) : f.slope(x) - du_(x);
            return e * e;
          },
          measure_, lo, hi, MeasurePart::absolutely_continuous);
      grad_sq += g_sq;
      if (critical) residual += g_sq;
    }
  }
  // Atoms inside Omega_n; the target gradient is u' there.
  for (const auto& at : measure_.atoms()) {
    if (retained(at.position)) continue;
    const double e_f = f.value(at.position) - u_(at.position);
    const double slope = f.slope(at.position);
    const double e_g = slope - du_(at.position);
    fun_sq += at.mass * e_f * e_f;
    grad_sq += at.mass * e_g * e_g;
    if (M.contains(at.position)) residual += at.mass * slope * slope;
  }
  d.err_function = std::sqrt(fun_sq);
  d.err_gradient = std::sqrt(grad_sq);
  d.residual = residual;
}

SequenceResult Flattener::run(std::size_t grid_points) {
  SequenceResult result;
  SequenceDiagnostics& d = result.diagnostics;
  d.n = n_;
  const auto& iv = measure_.interval();

  if (!(field_->mass_of_critical_set() > 0.0)) {
    result.u_n = make_function(field_, u_, du_, grid_points);
    result.vacuous = true;
    result.notice = "mu(M) = 0: the construction is vacuous, u_n = u";
    d.bound_claimed = inv_n_;
    for (double v : result.u_n.values) d.sup_norm = std::max(d.sup_norm, std::abs(v));
    return result;
  }

  choose_retained();
  double tail = 0.0;
  for (const auto& at : measure_.atoms()) {
    if (!retained(at.position) && field_->critical().contains(at.position)) tail += at.mass;
  }
  d.bound_claimed = inv_n_ + tail;

  double min_run = iv.length();
  for (std::size_t k = 0; k + 1 < elements_.size(); ++k) {
    min_run = std::min(min_run, elements_[k + 1].lo - elements_[k].hi);
  }
  double delta = std::min({inv_n_, 0.25 * min_run, 0.25 * iv.length()});
  std::vector<OpenPiece> pieces = omega(delta);
  for (int it = 0; it < 60 && excess_mass(pieces) > inv_n_; ++it) {
    delta *= 0.5;
    pieces = omega(delta);
  }

  std::vector<ComponentPlan> plans;
  std::size_t q = 0;
  for (const auto& piece : pieces) {
    plans.push_back(plan(piece, delta));
    q += plans.back().jumps.size();
  }
  if (q > 0) {
    const double target = inv_n_ / static_cast<double>(q);
    for (auto& p : plans) {
      for (const auto& j : p.jumps) p.windows.push_back(smooth(j, target));
    }
  }
  const FlattenedFunction f(u_, du_, std::move(plans));
  diagnose(f, d);

  std::vector<double> grid = default_grid(*field_, grid_points);
  for (const auto& p : f.plans()) {
    grid.insert(grid.end(), {p.a, p.b, p.a1, p.b1});
    if (p.blend_left) grid.push_back(p.a + 0.5 * p.eps);
    if (p.blend_right) grid.push_back(p.b - 0.5 * p.eps);
    for (const auto& w : p.windows) {
      grid.push_back(w.lo());
      grid.push_back(w.hi());
      for (double tau = 0.5 * w.eps; tau > w.eta && tau > 1e-6 * w.eps; tau *= 0.5) {
        grid.push_back(w.x_at(tau));
      }
    }
  }
  grid.erase(std::remove_if(grid.begin(), grid.end(), [&](double x) { return !iv.contains(x); }),
             grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  result.u_n = make_function_on_grid(field_, std::move(grid), [&](double x) { return f.value(x); },
                                     [&](double x) { return f.slope(x); });
  for (double v : result.u_n.values) d.sup_norm = std::max(d.sup_norm, std::abs(v));
  return result;
}

}  // namespace

SequenceResult flatten_critical_sequence(TangentFieldPtr field, const RealFunction& u, const RealFunction& du,
                                         int n, std::size_t grid_points) {
  if (n < 1) throw DomainError("flatten_critical_sequence: n must be >= 1");
  Flattener flattener(std::move(field), u, du, n);
  return flattener.run(grid_points);
}

SequenceResult flatten_critical_sequence(const MeasureSpec& spec, const RealFunction& u, const RealFunction& du,
                                         int n) {
  return flatten_critical_sequence(tangent_field(make_measure(spec)), u, du, n);
}

}  // namespace musob
