#include "musob/region.hpp"

#include <algorithm>

namespace musob {

RegionSet::RegionSet(std::vector<ClosedInterval> intervals, std::vector<double> points) {
  std::sort(intervals.begin(), intervals.end(),
            [](const ClosedInterval& a, const ClosedInterval& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (double p : points) {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), p,
                               [](double x, const ClosedInterval& iv) { return x < iv.lo; });
    if (it != intervals_.begin() && std::prev(it)->contains(p)) continue;
    points_.push_back(p);
  }
}

bool RegionSet::contains(double x) const noexcept {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const ClosedInterval& iv) { return v < iv.lo; });
  if (it != intervals_.begin() && std::prev(it)->contains(x)) return true;
  return std::binary_search(points_.begin(), points_.end(), x);
}

double RegionSet::lebesgue_measure() const noexcept {
  double total = 0.0;
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

std::vector<ClosedInterval> RegionSet::elements() const {
  std::vector<ClosedInterval> out = intervals_;
  for (double p : points_) out.push_back({p, p});
  std::sort(out.begin(), out.end(),
            [](const ClosedInterval& a, const ClosedInterval& b) { return a.lo < b.lo; });
  return out;
}

RegionSet RegionSet::unite(const RegionSet& a, const RegionSet& b) {
  std::vector<ClosedInterval> ivs = a.intervals_;
  ivs.insert(ivs.end(), b.intervals_.begin(), b.intervals_.end());
  std::vector<double> pts = a.points_;
  pts.insert(pts.end(), b.points_.begin(), b.points_.end());
  return RegionSet(std::move(ivs), std::move(pts));
}

const char* to_string(RegionLabel label) noexcept {
  switch (label) {
    case RegionLabel::V: return "V";
    case RegionLabel::M: return "M";
    case RegionLabel::A: return "A";
    case RegionLabel::unset: break;
  }
  return "unset";
}

}  // namespace musob
