#pragma once

#include <functional>
#include <string>
#include <vector>

#include "musob/measure.hpp"
#include "musob/random.hpp"

namespace musob::fixtures {

/// A corpus measure with ground truth worked out by hand.
struct CorpusEntry {
  std::string name;
  MeasureSpec spec;
  std::function<int(double)> dim;  ///< analytic tangent dimension
  bool embedded = false;           ///< is 1/f integrable over the interval
  std::vector<double> special;     ///< points where dim is 0 on a null set
};

/// uniform; |x - 1/2|^p for p in {0.5, 1, 2, 3}; pure atomic; Lebesgue +
/// atom; Cantor depth 2 and 4; fat Cantor depth 1 and 2; mixed.
const std::vector<CorpusEntry>& corpus();
const CorpusEntry& corpus_entry(const std::string& name);

MeasureSpec uniform_spec(double lo = 0.0, double hi = 1.0, double mass = 1.0);
MeasureSpec power_spec(double center, double power, double coeff = 1.0);

/// Random density DSL spec: one to three power segments on a random
/// interval, sometimes with an atom.
MeasureSpec random_spec(Rng& rng);

/// Surviving intervals of the depth-d fat Cantor set on [0, 1].
std::vector<std::pair<double, double>> fat_cantor_survivors(int depth);

}  // namespace musob::fixtures
