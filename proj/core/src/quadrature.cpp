// Quadrature against a Measure.
//
// Each density segment c|x - x0|^p is integrated on either side of its
// center in the mass coordinate w = |x - x0|^(p+1), where the weight becomes
// the constant c/(p+1). Gauss-Legendre panels are then bisected until
// refinement changes a panel by less than rel_tol times the integral scale,
// which concentrates panels toward the center and toward kinks of g.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "musob/errors.hpp"
#include "musob/measure.hpp"

namespace musob {

namespace {

constexpr int kOrder = 15;

struct GaussRule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule r;
    const double pi = std::acos(-1.0);
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.nodes[static_cast<std::size_t>(i)] = x;
      r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

struct PanelSum {
  double value = 0.0;
  double abs_value = 0.0;
};

template <class F>
PanelSum gauss_panel(const F& f, double a, double b) {
  const auto& rule = gauss_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  PanelSum s;
  for (int i = 0; i < kOrder; ++i) {
    const double v = f(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
    s.value += rule.weights[static_cast<std::size_t>(i)] * v;
    s.abs_value += rule.weights[static_cast<std::size_t>(i)] * std::abs(v);
  }
  s.value *= half;
  s.abs_value *= half;
  return s;
}

// A piece of work: integrate h(w) dw over [a, b], where h already folds in
// the constant density weight of the mass coordinate.
struct Piece {
  double a;
  double b;
  double weight;  // c / (p + 1)
  double center;
  double side;     // +1: x = center + w^(1/(p+1)); -1: x = center - w^(1/(p+1))
  double inv_exp;  // 1 / (p + 1)
};

class Integrator {
  struct Panel {
    double a, b, whole;
    int depth;
  };

  auto integrand(const Piece& piece) const {
    return [this, piece](double w) {
      const double t = piece.inv_exp == 1.0 ? w : std::pow(std::max(w, 0.0), piece.inv_exp);
      const double x = piece.center + piece.side * t;
      const double v = g_(x);
      if (!std::isfinite(v)) throw EvaluationError(x, "non-finite integrand sample");
      return piece.weight * v;
    };
  }

 public:
  Integrator(const RealFunction& g, const IntegrationOptions& options) : g_(g), options_(options) {}

  void add_segment_piece(const DensitySegment& s, double l, double h) {
    if (!(l < h)) return;
    const double e = s.power + 1.0;
    const double weight = s.coeff / e;
    const double inv = 1.0 / e;
    if (h > s.center) {
      const double t0 = std::max(l, s.center) - s.center;
      const double t1 = h - s.center;
      pieces_.push_back({std::pow(t0, e), std::pow(t1, e), weight, s.center, 1.0, inv});
    }
    if (l < s.center) {
      const double t0 = s.center - std::min(h, s.center);
      const double t1 = s.center - l;
      pieces_.push_back({std::pow(t0, e), std::pow(t1, e), weight, s.center, -1.0, inv});
    }
  }

  void add_power_piece(double coeff, double power, double lo, double hi) {
    const double e = power + 1.0;
    pieces_.push_back({std::pow(lo, e), std::pow(hi, e), coeff / e, 0.0, 1.0, 1.0 / e});
  }

  IntegrationResult run() {
    IntegrationResult result;
    std::vector<PanelSum> coarse(pieces_.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      coarse[i] = gauss_panel(integrand(pieces_[i]), pieces_[i].a, pieces_[i].b);
      scale += coarse[i].abs_value;
    }
    const double tol = options_.rel_tol * scale;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto f = integrand(pieces_[i]);
      std::vector<Panel> stack{{pieces_[i].a, pieces_[i].b, coarse[i].value, 0}};
      while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double left = gauss_panel(f, p.a, m).value;
        const double right = gauss_panel(f, m, p.b).value;
        const double refined = left + right;
        ++result.panels;
        if (std::abs(refined - p.whole) <= tol || m <= p.a || m >= p.b) {
          result.value += refined;
        } else if (p.depth >= options_.max_levels) {
          result.value += refined;
          result.cap_hit = true;
        } else {
          stack.push_back({p.a, m, left, p.depth + 1});
          stack.push_back({m, p.b, right, p.depth + 1});
        }
      }
    }
    return result;
  }

 private:
  const RealFunction& g_;
  IntegrationOptions options_;
  std::vector<Piece> pieces_;
};

double atom_sum(const RealFunction& g, const Measure& measure, const RegionSet* region) {
  double total = 0.0;
  for (const auto& a : measure.atoms()) {
    if (region != nullptr && !region->contains(a.position)) continue;
    const double v = g(a.position);
    if (!std::isfinite(v)) throw EvaluationError(a.position, "non-finite integrand sample");
    total += a.mass * v;
  }
  return total;
}

}  // namespace

IntegrationResult integrate_detailed(const RealFunction& g, const Measure& measure,
                                     const RegionSet* region, const IntegrationOptions& options) {
  IntegrationResult result;
  if (options.part != MeasurePart::singular) {
    Integrator integrator(g, options);
    for (const auto& s : measure.segments()) {
      if (region == nullptr) {
        integrator.add_segment_piece(s, s.lo, s.hi);
        continue;
      }
      for (const auto& iv : region->intervals()) {
        integrator.add_segment_piece(s, std::max(s.lo, iv.lo), std::min(s.hi, iv.hi));
      }
    }
    result = integrator.run();
  }
  if (options.part != MeasurePart::absolutely_continuous) {
    result.value += atom_sum(g, measure, region);
  }
  return result;
}

double integrate(const RealFunction& g, const Measure& measure, const std::optional<RegionSet>& region,
                 MeasurePart part) {
  IntegrationOptions options;
  options.part = part;
  return integrate_detailed(g, measure, region ? &*region : nullptr, options).value;
}

double integrate_interval(const RealFunction& g, const Measure& measure, double a, double b,
                          MeasurePart part) {
  double total = 0.0;
  if (part != MeasurePart::singular && a < b) {
    IntegrationOptions options;
    Integrator integrator(g, options);
    auto [first, last] = measure.segments_overlapping(a, b);
    const auto segs = measure.segments();
    for (std::size_t i = first; i < last; ++i) {
      integrator.add_segment_piece(segs[i], std::max(segs[i].lo, a), std::min(segs[i].hi, b));
    }
    total += integrator.run().value;
  }
  if (part != MeasurePart::absolutely_continuous) {
    const auto atoms = measure.atoms();
    auto it = std::lower_bound(atoms.begin(), atoms.end(), a,
                               [](const Atom& at, double v) { return at.position < v; });
    for (; it != atoms.end() && it->position <= b; ++it) {
      const Atom& at = *it;
      const double v = g(at.position);
      if (!std::isfinite(v)) throw EvaluationError(at.position, "non-finite integrand sample");
      total += at.mass * v;
    }
  }
  return total;
}

double integrate_power_weight(const RealFunction& g, double coeff, double power, double lo, double hi,
                              double rel_tol) {
  if (!(lo < hi)) return 0.0;
  if (lo < 0.0) throw DomainError("integrate_power_weight: lo must be >= 0");
  IntegrationOptions options;
  options.rel_tol = rel_tol;
  Integrator integrator(g, options);
  integrator.add_power_piece(coeff, power, lo, hi);
  return integrator.run().value;
}

}  // namespace musob
