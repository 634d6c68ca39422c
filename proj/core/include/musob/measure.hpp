#pragma once

// Finite measures on a bounded interval: an absolutely continuous part
// given by power-law density segments, point atoms, and Cantor-type parts
// materialised as finite-depth atomic approximations.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "musob/region.hpp"

namespace musob {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double length() const noexcept { return hi - lo; }
  [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Density `coeff * |x - center|^power` on [lo, hi].
///
/// `critical` marks a segment as a finite-depth stand-in for a nowhere-dense
/// set of positive measure (the surviving intervals of a fat Cantor
/// construction). Such segments are classified as part of the critical set
/// as whole intervals.
struct DensitySegment {
  double lo = 0.0;
  double hi = 1.0;
  double coeff = 1.0;
  double center = 0.0;
  double power = 0.0;
  bool critical = false;

  [[nodiscard]] double density(double x) const;
  /// Closed-form primitive of the density, zero at `center`.
  [[nodiscard]] double primitive(double x) const;
  /// Inverse of `primitive`.
  [[nodiscard]] double inverse_primitive(double value) const;
  /// Mass of [a, b] intersected with the segment.
  [[nodiscard]] double mass(double a, double b) const;
  [[nodiscard]] double mass() const { return mass(lo, hi); }
  /// Closed-form integral of 1/f over [a, b] ∩ segment; +inf when divergent.
  [[nodiscard]] double inverse_density_integral(double a, double b) const;
  /// Lebesgue measure of { x in segment : density(x) < level }.
  [[nodiscard]] double sublevel_length(double level) const;

  bool operator==(const DensitySegment&) const = default;
};

struct Atom {
  double position = 0.0;
  double mass = 0.0;
  bool operator==(const Atom&) const = default;
};

/// Middle-thirds Cantor measure on [lo, hi] with total mass `mass`,
/// materialised as 2^depth equal atoms at the midpoints of the depth-level
/// surviving intervals.
struct CantorPart {
  double lo = 0.0;
  double hi = 1.0;
  double mass = 1.0;
  int depth = 1;

  [[nodiscard]] std::vector<Atom> materialize() const;
  bool operator==(const CantorPart&) const = default;
};

struct MeasureSpec {
  Interval interval;
  std::vector<DensitySegment> segments;
  std::vector<Atom> atoms;
  std::vector<CantorPart> cantor_parts;

  bool operator==(const MeasureSpec&) const = default;
};

/// Throws ValidationError naming the offending field by JSON path.
void validate(const MeasureSpec& spec);

/// Which part of the measure an integral runs against.
enum class MeasurePart { all, absolutely_continuous, singular };

struct IntegrationOptions {
  double rel_tol = 1e-10;
  int max_levels = 40;
  MeasurePart part = MeasurePart::all;
};

struct IntegrationResult {
  double value = 0.0;
  bool cap_hit = false;  ///< subdivision cap reached somewhere
  std::size_t panels = 0;
};

/// Immutable, validated measure with precomputed CDF tables.
class Measure {
 public:
  explicit Measure(MeasureSpec spec);

  [[nodiscard]] const MeasureSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const Interval& interval() const noexcept { return spec_.interval; }

  /// Segments sorted by position.
  [[nodiscard]] std::span<const DensitySegment> segments() const noexcept { return segments_; }
  /// Spec atoms and materialised Cantor atoms, merged and sorted.
  [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
  [[nodiscard]] bool has_cantor() const noexcept { return !spec_.cantor_parts.empty(); }

  [[nodiscard]] double total_mass() const noexcept { return total_mass_; }
  [[nodiscard]] double ac_mass() const noexcept { return ac_mass_; }
  [[nodiscard]] double singular_mass() const noexcept { return singular_mass_; }

  /// mu([lo, x]); throws DomainError outside the interval.
  [[nodiscard]] double cdf(double x) const;
  /// mu([lo, x)).
  [[nodiscard]] double cdf_left(double x) const;
  /// Smallest x with cdf(x) >= p, for 0 < p <= total_mass.
  [[nodiscard]] double quantile(double p) const;
  /// Infimum of the support (limit of quantile(p) as p -> 0+).
  [[nodiscard]] double support_lo() const;

  [[nodiscard]] double density(double x) const;
  /// mu_a([a, b]).
  [[nodiscard]] double ac_mass(double a, double b) const;
  /// Atom mass at exactly x.
  [[nodiscard]] double atom_at(double x) const;
  /// Total atom mass in [a, b] (include flags choose open/closed ends).
  [[nodiscard]] double atom_mass(double a, double b, bool include_a = true,
                                 bool include_b = true) const;
  /// mu((a, b)).
  [[nodiscard]] double mass_open(double a, double b) const;

  /// Index range [first, last) of segments whose interior meets (a, b).
  [[nodiscard]] std::pair<std::size_t, std::size_t> segments_overlapping(double a,
                                                                        double b) const;

 private:
  MeasureSpec spec_;
  std::vector<DensitySegment> segments_;
  std::vector<Atom> atoms_;
  std::vector<double> atom_cumulative_;  // mass of atoms_[0..i]
  std::vector<double> segment_cumulative_;  // ac mass of segments_[0..i)

  // Atoms and segment pieces (segments split at interior atoms) in the order
  // their mass enters the CDF, for quantile lookup.
  struct MassPiece {
    double lo;
    double hi;
    double before;  // CDF mass preceding the piece
    double mass;
    std::ptrdiff_t segment;  // index into segments_, -1 for an atom
  };
  std::vector<MassPiece> pieces_;
  double total_mass_ = 0.0;
  double ac_mass_ = 0.0;
  double singular_mass_ = 0.0;
};

using MeasurePtr = std::shared_ptr<const Measure>;

[[nodiscard]] MeasurePtr make_measure(MeasureSpec spec);

[[nodiscard]] double total_mass(const MeasureSpec& spec);

/// Equal-mass point approximation of a measure.
struct QuantizedMeasure {
  std::vector<double> points;  ///< nondecreasing
  std::vector<double> masses;  ///< all equal to total_mass / N
  std::vector<RegionLabel> region_labels;  ///< unset until labelled
  std::vector<int> components;  ///< regular-set component per point, -1 off V
  MeasurePtr source;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] bool labelled() const noexcept;
};

/// points[i] = quantile((i - 1/2) / N * total_mass).
[[nodiscard]] QuantizedMeasure quantize(MeasurePtr measure, std::size_t count);

using RealFunction = std::function<double(double)>;

/// Integral of g against the measure, optionally restricted to a region
/// (intervals restrict the absolutely continuous part; atoms count when
/// they lie in an interval or coincide with a listed point).
[[nodiscard]] IntegrationResult integrate_detailed(const RealFunction& g, const Measure& measure,
                                                   const RegionSet* region = nullptr,
                                                   const IntegrationOptions& options = {});

[[nodiscard]] double integrate(const RealFunction& g, const Measure& measure,
                               const std::optional<RegionSet>& region = std::nullopt,
                               MeasurePart part = MeasurePart::all);

/// Integral over the closed interval [a, b].
[[nodiscard]] double integrate_interval(const RealFunction& g, const Measure& measure, double a,
                                        double b, MeasurePart part = MeasurePart::all);

/// Integral of g against c * |t|^power dt over [lo, hi] (both >= 0), the
/// weight of a single density segment in distance-from-center coordinates.
[[nodiscard]] double integrate_power_weight(const RealFunction& g, double coeff, double power,
                                            double lo, double hi, double rel_tol = 1e-10);

/// Kolmogorov distance sup_t |F_{T#mu}(t) - F_nu(t)| on `grid + 1` equally
/// spaced points of the target interval. T must be monotone; its direction
/// is read from T(lo) <= T(hi).
[[nodiscard]] double pushforward_discrepancy(const RealFunction& map, const Measure& source,
                                             const Measure& target, std::size_t grid);

/// Exact Kolmogorov distance between the image of a quantized source under
/// source point i -> mapped[i] and a quantized target.
[[nodiscard]] double pushforward_discrepancy(const QuantizedMeasure& source,
                                             std::span<const double> mapped,
                                             const QuantizedMeasure& target);

}  // namespace musob
