#include "musob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "musob/errors.hpp"
#include "musob/format.hpp"

namespace musob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign(double v) { return v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0); }

std::string indexed(const char* array, std::size_t i, const char* field) {
  return std::string("$.") + array + "[" + std::to_string(i) + "]." + field;
}

void require_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) throw ValidationError(path, "must be a finite number");
}

}  // namespace

// ---------------------------------------------------------------- segment

double DensitySegment::density(double x) const {
  if (power == 0.0) return coeff;
  return coeff * std::pow(std::abs(x - center), power);
}

double DensitySegment::primitive(double x) const {
  const double d = x - center;
  return coeff * sign(d) * std::pow(std::abs(d), power + 1.0) / (power + 1.0);
}

double DensitySegment::inverse_primitive(double value) const {
  const double t = std::pow(std::abs(value) * (power + 1.0) / coeff, 1.0 / (power + 1.0));
  return center + sign(value) * t;
}

double DensitySegment::mass(double a, double b) const {
  const double l = std::max(a, lo);
  const double h = std::min(b, hi);
  if (!(l < h)) return 0.0;
  if (power == 0.0) return coeff * (h - l);
  return primitive(h) - primitive(l);
}

double DensitySegment::inverse_density_integral(double a, double b) const {
  const double l = std::max(a, lo);
  const double h = std::min(b, hi);
  if (!(l < h)) return 0.0;
  if (power >= 1.0 && l <= center && center <= h) return kInf;
  const double q = 1.0 - power;
  if (power == 1.0) {
    return std::abs(std::log(std::abs(h - center) / std::abs(l - center))) / coeff;
  }
  auto h_prim = [&](double x) {
    const double d = x - center;
    return sign(d) * std::pow(std::abs(d), q) / q;
  };
  return (h_prim(h) - h_prim(l)) / coeff;
}

double DensitySegment::sublevel_length(double level) const {
  if (level <= 0.0) return 0.0;
  auto overlap = [&](double a, double b) { return std::max(0.0, std::min(b, hi) - std::max(a, lo)); };
  if (power == 0.0) return coeff < level ? hi - lo : 0.0;
  const double radius = std::pow(level / coeff, 1.0 / power);
  if (power > 0.0) return overlap(center - radius, center + radius);
  return (hi - lo) - overlap(center - radius, center + radius);
}

// ------------------------------------------------------------------ cantor

std::vector<Atom> CantorPart::materialize() const {
  std::vector<std::pair<double, double>> level{{lo, hi}};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::pair<double, double>> next;
    next.reserve(level.size() * 2);
    for (auto [a, b] : level) {
      const double third = (b - a) / 3.0;
      next.emplace_back(a, a + third);
      next.emplace_back(b - third, b);
    }
    level = std::move(next);
  }
  const double each = mass / static_cast<double>(level.size());
  std::vector<Atom> atoms;
  atoms.reserve(level.size());
  for (auto [a, b] : level) atoms.push_back({0.5 * (a + b), each});
  return atoms;
}

// -------------------------------------------------------------- validation

void validate(const MeasureSpec& spec) {
  const auto& iv = spec.interval;
  require_finite(iv.lo, "$.interval.lo");
  require_finite(iv.hi, "$.interval.hi");
  if (!(iv.lo < iv.hi)) throw ValidationError("$.interval", "lo must be < hi");

  double total = 0.0;
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& s = spec.segments[i];
    require_finite(s.lo, indexed("segments", i, "lo"));
    require_finite(s.hi, indexed("segments", i, "hi"));
    require_finite(s.coeff, indexed("segments", i, "coeff"));
    require_finite(s.center, indexed("segments", i, "center"));
    require_finite(s.power, indexed("segments", i, "power"));
    if (!(s.lo < s.hi)) throw ValidationError(indexed("segments", i, "hi"), "must exceed lo");
    if (!(s.coeff > 0.0)) throw ValidationError(indexed("segments", i, "coeff"), "must be > 0");
    if (!(s.power > -1.0)) throw ValidationError(indexed("segments", i, "power"), "must be > -1");
    if (s.lo < iv.lo) throw ValidationError(indexed("segments", i, "lo"), "outside interval");
    if (s.hi > iv.hi) throw ValidationError(indexed("segments", i, "hi"), "outside interval");
    total += s.mass();
  }
  std::vector<std::size_t> order(spec.segments.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.segments[a].lo < spec.segments[b].lo;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (spec.segments[order[k]].lo < spec.segments[order[k - 1]].hi) {
      throw ValidationError(indexed("segments", order[k], "lo"),
                            "overlaps segment " + std::to_string(order[k - 1]));
    }
  }

  for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
    const auto& a = spec.atoms[i];
    require_finite(a.position, indexed("atoms", i, "position"));
    require_finite(a.mass, indexed("atoms", i, "mass"));
    if (!(a.mass > 0.0)) throw ValidationError(indexed("atoms", i, "mass"), "must be > 0");
    if (!iv.contains(a.position)) {
      throw ValidationError(indexed("atoms", i, "position"), "outside interval");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.atoms[j].position == a.position) {
        throw ValidationError(indexed("atoms", i, "position"),
                              "duplicates atom " + std::to_string(j));
      }
    }
    total += a.mass;
  }

  for (std::size_t i = 0; i < spec.cantor_parts.size(); ++i) {
    const auto& c = spec.cantor_parts[i];
    require_finite(c.lo, indexed("cantor", i, "lo"));
    require_finite(c.hi, indexed("cantor", i, "hi"));
    require_finite(c.mass, indexed("cantor", i, "mass"));
    if (!(c.lo < c.hi)) throw ValidationError(indexed("cantor", i, "hi"), "must exceed lo");
    if (!(c.mass > 0.0)) throw ValidationError(indexed("cantor", i, "mass"), "must be > 0");
    if (c.depth < 1 || c.depth > 20) {
      throw ValidationError(indexed("cantor", i, "depth"), "must be in [1, 20]");
    }
    if (c.lo < iv.lo || c.hi > iv.hi) {
      throw ValidationError(indexed("cantor", i, "lo"), "outside interval");
    }
    total += c.mass;
  }

  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ValidationError("$", "total mass must be finite and > 0");
  }
}

// ----------------------------------------------------------------- measure

Measure::Measure(MeasureSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  segments_ = spec_.segments;
  std::sort(segments_.begin(), segments_.end(),
            [](const DensitySegment& a, const DensitySegment& b) { return a.lo < b.lo; });

  std::vector<Atom> raw = spec_.atoms;
  for (const auto& c : spec_.cantor_parts) {
    auto pts = c.materialize();
    raw.insert(raw.end(), pts.begin(), pts.end());
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const Atom& a, const Atom& b) { return a.position < b.position; });
  for (const auto& a : raw) {
    if (!atoms_.empty() && atoms_.back().position == a.position) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }

  atom_cumulative_.resize(atoms_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    acc += atoms_[i].mass;
    atom_cumulative_[i] = acc;
  }
  singular_mass_ = acc;

  segment_cumulative_.resize(segments_.size() + 1, 0.0);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    segment_cumulative_[i + 1] = segment_cumulative_[i] + segments_[i].mass();
  }
  ac_mass_ = segment_cumulative_.back();

  total_mass_ = musob::total_mass(spec_);

  // An atom at y enters the CDF at x = y, a segment piece [a, b] over
  // (a, b], so an atom sorts before a piece starting at the same position.
  std::size_t ai = 0;
  for (std::size_t si = 0; si < segments_.size(); ++si) {
    const DensitySegment& s = segments_[si];
    for (; ai < atoms_.size() && atoms_[ai].position <= s.lo; ++ai) {
      pieces_.push_back({atoms_[ai].position, atoms_[ai].position, 0.0, atoms_[ai].mass, -1});
    }
    double start = s.lo;
    for (; ai < atoms_.size() && atoms_[ai].position < s.hi; ++ai) {
      pieces_.push_back({start, atoms_[ai].position, 0.0, s.mass(start, atoms_[ai].position),
                         static_cast<std::ptrdiff_t>(si)});
      pieces_.push_back({atoms_[ai].position, atoms_[ai].position, 0.0, atoms_[ai].mass, -1});
      start = atoms_[ai].position;
    }
    pieces_.push_back({start, s.hi, 0.0, s.mass(start, s.hi), static_cast<std::ptrdiff_t>(si)});
  }
  for (; ai < atoms_.size(); ++ai) {
    pieces_.push_back({atoms_[ai].position, atoms_[ai].position, 0.0, atoms_[ai].mass, -1});
  }
  double before = 0.0;
  for (auto& piece : pieces_) {
    piece.before = before;
    before += piece.mass;
  }
}

MeasurePtr make_measure(MeasureSpec spec) {
  return std::make_shared<const Measure>(std::move(spec));
}

double total_mass(const MeasureSpec& spec) {
  double total = 0.0;
  for (const auto& s : spec.segments) total += s.mass();
  for (const auto& a : spec.atoms) total += a.mass;
  for (const auto& c : spec.cantor_parts) total += c.mass;
  return total;
}

double Measure::cdf(double x) const {
  if (!interval().contains(x)) {
    throw DomainError("cdf: x=" + format_double(x) + " outside the interval");
  }
  return ac_mass(interval().lo, x) + atom_mass(interval().lo, x, true, true);
}

double Measure::cdf_left(double x) const {
  if (!interval().contains(x)) {
    throw DomainError("cdf_left: x=" + format_double(x) + " outside the interval");
  }
  return ac_mass(interval().lo, x) + atom_mass(interval().lo, x, true, false);
}

double Measure::ac_mass(double a, double b) const {
  if (!(a < b)) return 0.0;
  auto [first, last] = segments_overlapping(a, b);
  if (first >= last) return 0.0;
  // Whole segments in the middle come from the prefix table.
  double total = segments_[first].mass(a, b);
  if (last - first >= 2) {
    total += segment_cumulative_[last - 1] - segment_cumulative_[first + 1];
    total += segments_[last - 1].mass(a, b);
  }
  return total;
}

double Measure::atom_at(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, double v) { return a.position < v; });
  if (it != atoms_.end() && it->position == x) return it->mass;
  return 0.0;
}

double Measure::atom_mass(double a, double b, bool include_a, bool include_b) const {
  auto pos_less = [](const Atom& at, double v) { return at.position < v; };
  auto less_pos = [](double v, const Atom& at) { return v < at.position; };
  const auto first = include_a ? std::lower_bound(atoms_.begin(), atoms_.end(), a, pos_less)
                               : std::upper_bound(atoms_.begin(), atoms_.end(), a, less_pos);
  const auto last = include_b ? std::upper_bound(atoms_.begin(), atoms_.end(), b, less_pos)
                              : std::lower_bound(atoms_.begin(), atoms_.end(), b, pos_less);
  if (first >= last) return 0.0;
  const auto i0 = static_cast<std::size_t>(first - atoms_.begin());
  const auto i1 = static_cast<std::size_t>(last - atoms_.begin());
  return atom_cumulative_[i1 - 1] - (i0 > 0 ? atom_cumulative_[i0 - 1] : 0.0);
}

double Measure::mass_open(double a, double b) const {
  if (!(a < b)) return 0.0;
  return ac_mass(a, b) + atom_mass(a, b, false, false);
}

std::pair<std::size_t, std::size_t> Measure::segments_overlapping(double a, double b) const {
  const auto first = std::partition_point(segments_.begin(), segments_.end(),
                                          [&](const DensitySegment& s) { return s.hi <= a; });
  const auto last = std::partition_point(first, segments_.end(),
                                         [&](const DensitySegment& s) { return s.lo < b; });
  return {static_cast<std::size_t>(first - segments_.begin()),
          static_cast<std::size_t>(last - segments_.begin())};
}

double Measure::density(double x) const {
  const auto it = std::partition_point(segments_.begin(), segments_.end(),
                                       [&](const DensitySegment& s) { return s.hi < x; });
  if (it != segments_.end() && it->lo <= x) return it->density(x);
  return 0.0;
}

double Measure::quantile(double p) const {
  if (!(p > 0.0) || p > total_mass_ * (1.0 + 1e-12)) {
    throw DomainError("quantile: p=" + format_double(p) + " outside (0, total_mass]");
  }
  if (pieces_.empty()) return interval().lo;
  auto it = std::partition_point(pieces_.begin(), pieces_.end(),
                                 [&](const MassPiece& m) { return m.before + m.mass < p; });
  if (it == pieces_.end()) return pieces_.back().hi;
  if (it->segment < 0) return it->lo;
  const DensitySegment& s = segments_[static_cast<std::size_t>(it->segment)];
  const double need = std::max(p - it->before, 0.0);
  const double x = s.power == 0.0 ? it->lo + need / s.coeff
                                  : s.inverse_primitive(s.primitive(it->lo) + need);
  return std::clamp(x, it->lo, it->hi);
}

double Measure::support_lo() const {
  double best = interval().hi;
  if (!atoms_.empty()) best = std::min(best, atoms_.front().position);
  if (!segments_.empty()) best = std::min(best, segments_.front().lo);
  return best;
}

// --------------------------------------------------------------- quantize

bool QuantizedMeasure::labelled() const noexcept {
  return region_labels.size() == points.size() &&
         std::none_of(region_labels.begin(), region_labels.end(),
                      [](RegionLabel l) { return l == RegionLabel::unset; });
}

QuantizedMeasure quantize(MeasurePtr measure, std::size_t count) {
  if (count == 0) throw DomainError("quantize: N must be >= 1");
  QuantizedMeasure q;
  const double total = measure->total_mass();
  const double each = total / static_cast<double>(count);
  q.points.resize(count);
  q.masses.assign(count, each);
  q.region_labels.assign(count, RegionLabel::unset);
  q.components.assign(count, -1);
  for (std::size_t i = 0; i < count; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(count) * total;
    q.points[i] = measure->quantile(p);
  }
  q.source = std::move(measure);
  return q;
}

// ---------------------------------------------------- pushforward checks

double pushforward_discrepancy(const RealFunction& map, const Measure& source,
                               const Measure& target, std::size_t grid) {
  if (grid == 0) throw DomainError("pushforward_discrepancy: grid must be >= 1");
  const double lo = source.interval().lo;
  const double hi = source.interval().hi;
  const double total = source.total_mass();
  const bool increasing = map(lo) <= map(hi);

  // mu({x : T(x) <= t}) by bisection on the monotone predicate.
  auto pushed_cdf = [&](double t) {
    auto pred = [&](double x) { return map(x) <= t; };
    if (increasing) {
      if (!pred(lo)) return 0.0;
      if (pred(hi)) return total;
      double a = lo, b = hi;
      for (int it = 0; it < 200; ++it) {
        const double m = a + 0.5 * (b - a);
        if (m <= a || m >= b) break;
        (pred(m) ? a : b) = m;
      }
      return source.cdf(a);
    }
    if (!pred(hi)) return 0.0;
    if (pred(lo)) return total;
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double m = a + 0.5 * (b - a);
      if (m <= a || m >= b) break;
      (pred(m) ? b : a) = m;
    }
    return total - source.cdf(a);
  };

  const double tlo = target.interval().lo;
  const double thi = target.interval().hi;
  double worst = 0.0;
  for (std::size_t j = 0; j <= grid; ++j) {
    double t = tlo + (thi - tlo) * static_cast<double>(j) / static_cast<double>(grid);
    if (j == grid) t = thi;
    worst = std::max(worst, std::abs(pushed_cdf(t) - target.cdf(t)));
  }
  return worst;
}

double pushforward_discrepancy(const QuantizedMeasure& source, std::span<const double> mapped,
                               const QuantizedMeasure& target) {
  if (mapped.size() != source.size()) {
    throw DomainError("pushforward_discrepancy: mapped size differs from source size");
  }
  auto uniform = [](const std::vector<double>& m) {
    return std::all_of(m.begin(), m.end(), [&](double v) { return v == m.front(); });
  };
  std::vector<std::pair<double, double>> image;
  image.reserve(mapped.size());
  for (std::size_t i = 0; i < mapped.size(); ++i) image.emplace_back(mapped[i], source.masses[i]);
  std::sort(image.begin(), image.end());
  std::vector<std::pair<double, double>> goal;
  goal.reserve(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) goal.emplace_back(target.points[i], target.masses[i]);
  std::sort(goal.begin(), goal.end());

  // Equal-mass quanta on both sides: compare counts so a bijection gives an
  // exact zero regardless of summation order.
  const bool counting = !image.empty() && !goal.empty() && uniform(source.masses) &&
                        uniform(target.masses) &&
                        std::abs(source.masses.front() - target.masses.front()) <=
                            1e-12 * std::abs(target.masses.front());
  const double unit = counting ? target.masses.front() : 1.0;

  double f_image = 0.0, f_goal = 0.0, worst = 0.0;
  long long c_image = 0, c_goal = 0;
  std::size_t i = 0, j = 0;
  while (i < image.size() || j < goal.size()) {
    double v = kInf;
    if (i < image.size()) v = image[i].first;
    if (j < goal.size()) v = std::min(v, goal[j].first);
    while (i < image.size() && image[i].first == v) {
      f_image += image[i].second;
      ++c_image;
      ++i;
    }
    while (j < goal.size() && goal[j].first == v) {
      f_goal += goal[j].second;
      ++c_goal;
      ++j;
    }
    const double diff = counting ? unit * static_cast<double>(std::llabs(c_image - c_goal))
                                 : std::abs(f_image - f_goal);
    worst = std::max(worst, diff);
  }
  return worst;
}

}  // namespace musob
