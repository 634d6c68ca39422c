#pragma once

// Tangent-space classification of a measure on an interval: the critical
// set M (where 1/f fails to be locally integrable), the singular support A
// carrying the atomic and Cantor parts, and the regular set
// V = I \ (M ∪ A). The tangent space is {0} on M ∪ A and R on V.

#include <memory>
#include <string>
#include <vector>

#include "musob/measure.hpp"
#include "musob/region.hpp"

namespace musob {

[[nodiscard]] RegionSet critical_set(const Measure& measure);
[[nodiscard]] RegionSet critical_set(const MeasureSpec& spec);

[[nodiscard]] RegionSet singular_support(const Measure& measure);
[[nodiscard]] RegionSet singular_support(const MeasureSpec& spec);

class TangentField {
 public:
  explicit TangentField(MeasurePtr measure);

  [[nodiscard]] const RegionSet& critical() const noexcept { return critical_; }
  [[nodiscard]] const RegionSet& singular() const noexcept { return singular_; }
  [[nodiscard]] const MeasurePtr& measure() const noexcept { return measure_; }

  /// Closures of the connected components of V, sorted. A component is
  /// open in the interval; endpoints belong to it only when they lie
  /// outside M ∪ A.
  [[nodiscard]] const std::vector<ClosedInterval>& regular_components() const noexcept {
    return components_;
  }

  /// A takes precedence over M, so an atom inside M labels A.
  [[nodiscard]] RegionLabel region(double x) const;
  [[nodiscard]] int dim(double x) const;
  /// Index into regular_components(), or -1 when x is not in V.
  [[nodiscard]] int component(double x) const;

  [[nodiscard]] double mass_regular() const noexcept { return mass_regular_; }
  /// Absolutely continuous mass on M.
  [[nodiscard]] double mass_critical() const noexcept { return mass_critical_; }
  /// Mass of the atomic and Cantor parts.
  [[nodiscard]] double mass_singular() const noexcept { return measure_->singular_mass(); }
  /// mu(M), atoms inside M included.
  [[nodiscard]] double mass_of_critical_set() const;

  /// Reserved for sampled densities; always false for closed-form specs.
  [[nodiscard]] bool heuristic() const noexcept { return false; }

 private:
  MeasurePtr measure_;
  RegionSet critical_;
  RegionSet singular_;
  std::vector<ClosedInterval> components_;
  double mass_regular_ = 0.0;
  double mass_critical_ = 0.0;
};

using TangentFieldPtr = std::shared_ptr<const TangentField>;

[[nodiscard]] TangentFieldPtr tangent_field(MeasurePtr measure);

/// 0 on M ∪ A, 1 on V; DomainError outside the interval.
[[nodiscard]] int tangent_dim(const TangentField& field, double x);

/// Fills region labels and regular-set components. Throws ConsistencyError
/// when q was quantized from a different measure.
[[nodiscard]] QuantizedMeasure label_quantized(const TangentField& field, QuantizedMeasure q);

/// Density dist(x, C_d)^alpha on the gaps of a depth-d fat Cantor set
/// (Smith-Volterra: step k removes a middle interval of length |I| / 4^k
/// from every surviving interval), each gap split at its midpoint into two
/// power segments, plus uniform density floor_mass / |C_d| on the surviving
/// intervals. The surviving segments are flagged critical: they stand in
/// for the nowhere-dense limit set, on which 1/f is not locally integrable.
[[nodiscard]] MeasureSpec fat_cantor_density(Interval interval, double alpha, int depth,
                                             double floor_mass);

/// Rows (region_type, lo, hi) with region_type in {M_interval, M_point,
/// A_point}, then the summary (mass_V, mass_M, mass_A).
[[nodiscard]] std::string tangent_field_csv(const TangentField& field);

}  // namespace musob
