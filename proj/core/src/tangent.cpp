#include "musob/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "musob/errors.hpp"
#include "musob/format.hpp"

namespace musob {

RegionSet critical_set(const Measure& measure) {
  const auto& iv = measure.interval();
  const auto segments = measure.segments();
  std::vector<ClosedInterval> intervals;
  std::vector<double> points;

  // Gaps of the density support, including the ones at the interval edges.
  double covered = iv.lo;
  for (const auto& s : segments) {
    if (s.lo > covered) intervals.push_back({covered, s.lo});
    covered = std::max(covered, s.hi);
  }
  if (covered < iv.hi) intervals.push_back({covered, iv.hi});

  for (const auto& s : segments) {
    if (s.critical) {
      intervals.push_back({s.lo, s.hi});
      continue;
    }
    // 1/f = |x - center|^(-power) / coeff can only blow up at the center.
    // The closed form is finite on every piece that keeps away from it, so
    // a divergent total localises the failure there; this also covers
    // centers sitting on a junction or an interval edge.
    if (std::isinf(s.inverse_density_integral(s.lo, s.hi))) points.push_back(s.center);
  }
  return RegionSet(std::move(intervals), std::move(points));
}

RegionSet critical_set(const MeasureSpec& spec) { return critical_set(Measure(spec)); }

RegionSet singular_support(const Measure& measure) {
  std::vector<double> points;
  points.reserve(measure.atoms().size());
  for (const auto& a : measure.atoms()) points.push_back(a.position);
  return RegionSet({}, std::move(points));
}

RegionSet singular_support(const MeasureSpec& spec) { return singular_support(Measure(spec)); }

TangentField::TangentField(MeasurePtr measure)
    : measure_(std::move(measure)),
      critical_(critical_set(*measure_)),
      singular_(singular_support(*measure_)) {
  const auto& iv = measure_->interval();
  // V is the interval minus the closed set M ∪ A; walk the sorted elements.
  const auto blocked = RegionSet::unite(critical_, singular_).elements();
  double start = iv.lo;
  for (const auto& e : blocked) {
    if (e.lo > start) components_.push_back({start, e.lo});
    start = std::max(start, e.hi);
  }
  if (start < iv.hi) components_.push_back({start, iv.hi});

  for (const auto& m : critical_.intervals()) mass_critical_ += measure_->ac_mass(m.lo, m.hi);
  mass_regular_ = std::max(0.0, measure_->ac_mass() - mass_critical_);
}

double TangentField::mass_of_critical_set() const {
  double total = mass_critical_;
  for (const auto& m : critical_.intervals()) total += measure_->atom_mass(m.lo, m.hi);
  for (double p : critical_.points()) total += measure_->atom_at(p);
  return total;
}

RegionLabel TangentField::region(double x) const {
  if (singular_.contains(x)) return RegionLabel::A;
  if (critical_.contains(x)) return RegionLabel::M;
  return RegionLabel::V;
}

int TangentField::dim(double x) const { return region(x) == RegionLabel::V ? 1 : 0; }

int TangentField::component(double x) const {
  if (region(x) != RegionLabel::V) return -1;
  const auto it = std::partition_point(components_.begin(), components_.end(),
                                       [&](const ClosedInterval& c) { return c.hi < x; });
  if (it == components_.end() || it->lo > x) return -1;
  return static_cast<int>(it - components_.begin());
}

TangentFieldPtr tangent_field(MeasurePtr measure) {
  return std::make_shared<const TangentField>(std::move(measure));
}

int tangent_dim(const TangentField& field, double x) {
  if (!field.measure()->interval().contains(x)) {
    throw DomainError("tangent_dim: x=" + format_double(x) + " outside the interval");
  }
  return field.dim(x);
}

QuantizedMeasure label_quantized(const TangentField& field, QuantizedMeasure q) {
  if (!q.source) throw ConsistencyError("label_quantized: quantized measure has no source");
  if (q.source != field.measure() && !(q.source->spec() == field.measure()->spec())) {
    throw ConsistencyError("label_quantized: quantized measure and tangent field come from different specs");
  }
  q.region_labels.resize(q.size());
  q.components.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q.region_labels[i] = field.region(q.points[i]);
    q.components[i] = field.component(q.points[i]);
  }
  return q;
}

MeasureSpec fat_cantor_density(Interval interval, double alpha, int depth, double floor_mass) {
  if (!(interval.lo < interval.hi)) throw DomainError("fat_cantor_density: empty interval");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw DomainError("fat_cantor_density: alpha must be >= 1");
  if (depth < 1 || depth > 12) throw DomainError("fat_cantor_density: depth must be in [1, 12]");
  if (!(floor_mass > 0.0) || !std::isfinite(floor_mass)) {
    throw DomainError("fat_cantor_density: floor_mass must be > 0");
  }
  const double length = interval.length();
  std::vector<ClosedInterval> survivors{{interval.lo, interval.hi}};
  std::vector<ClosedInterval> gaps;
  double removal = length;
  for (int k = 1; k <= depth; ++k) {
    removal /= 4.0;
    std::vector<ClosedInterval> next;
    next.reserve(survivors.size() * 2);
    for (const auto& s : survivors) {
      const double mid = 0.5 * (s.lo + s.hi);
      const double g_lo = mid - 0.5 * removal;
      const double g_hi = mid + 0.5 * removal;
      next.push_back({s.lo, g_lo});
      next.push_back({g_hi, s.hi});
      gaps.push_back({g_lo, g_hi});
    }
    survivors = std::move(next);
  }
  double surviving_length = 0.0;
  for (const auto& s : survivors) surviving_length += s.length();

  MeasureSpec spec;
  spec.interval = interval;
  const double floor_density = floor_mass / surviving_length;
  for (const auto& s : survivors) spec.segments.push_back({s.lo, s.hi, floor_density, s.lo, 0.0, true});
  for (const auto& g : gaps) {
    const double mid = 0.5 * (g.lo + g.hi);
    spec.segments.push_back({g.lo, mid, 1.0, g.lo, alpha, false});
    spec.segments.push_back({mid, g.hi, 1.0, g.hi, alpha, false});
  }
  std::sort(spec.segments.begin(), spec.segments.end(),
            [](const DensitySegment& a, const DensitySegment& b) { return a.lo < b.lo; });
  return spec;
}

std::string tangent_field_csv(const TangentField& field) {
  std::ostringstream out;
  out << "region_type,lo,hi\n";
  // Rows in positional order so the file diffs cleanly.
  struct Row {
    const char* type;
    double lo, hi;
  };
  std::vector<Row> rows;
  for (const auto& m : field.critical().intervals()) rows.push_back({"M_interval", m.lo, m.hi});
  for (double p : field.critical().points()) rows.push_back({"M_point", p, p});
  for (double p : field.singular().points()) rows.push_back({"A_point", p, p});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.lo < b.lo; });
  for (const auto& r : rows) {
    out << r.type << ',' << format_double(r.lo) << ',' << format_double(r.hi) << '\n';
  }
  out << "mass_V,mass_M,mass_A\n";
  out << format_double(field.mass_regular()) << ',' << format_double(field.mass_critical()) << ','
      << format_double(field.mass_singular()) << '\n';
  return out.str();
}

}  // namespace musob
