#pragma once

#include <cstdint>
#include <vector>

namespace musob {

struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  [[nodiscard]] double length() const noexcept { return hi - lo; }
  bool operator==(const ClosedInterval&) const = default;
};

/// A finite union of closed intervals and isolated points, kept in normal
/// form: intervals sorted and pairwise disjoint (touching intervals are
/// merged), points sorted, unique and not inside any interval.
class RegionSet {
 public:
  RegionSet() = default;
  RegionSet(std::vector<ClosedInterval> intervals, std::vector<double> points);

  [[nodiscard]] const std::vector<ClosedInterval>& intervals() const noexcept { return intervals_; }
  [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }

  [[nodiscard]] bool empty() const noexcept { return intervals_.empty() && points_.empty(); }
  [[nodiscard]] bool contains(double x) const noexcept;
  [[nodiscard]] double lebesgue_measure() const noexcept;

  /// All elements as closed intervals (points become degenerate intervals),
  /// sorted by position.
  [[nodiscard]] std::vector<ClosedInterval> elements() const;

  [[nodiscard]] static RegionSet unite(const RegionSet& a, const RegionSet& b);

  bool operator==(const RegionSet&) const = default;

 private:
  std::vector<ClosedInterval> intervals_;
  std::vector<double> points_;
};

/// Tangent-space class of a point: regular set V (tangent space R),
/// critical set M or singular support A (tangent space {0}).
enum class RegionLabel : std::uint8_t { unset, V, M, A };

const char* to_string(RegionLabel label) noexcept;

}  // namespace musob
