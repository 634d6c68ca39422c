#pragma once

// The measure-Sobolev space H^1_mu on an interval: functions sampled on a
// grid with a derivative on the regular set, the norm decomposition, and
// the approximating-sequence constructions behind the tangent-space
// classification.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "musob/measure.hpp"
#include "musob/tangent.hpp"

namespace musob {

/// u sampled on a grid covering the interval. Between grid points u is
/// interpolated linearly and u' is piecewise constant. `derivative[k]` is
/// present exactly when grid[k] lies in V.
struct MuSobolevFunction {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<std::optional<double>> derivative;
  TangentFieldPtr field;

  [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }
  [[nodiscard]] double value_at(double x) const;
  /// Derivative used on cell [grid[k], grid[k+1]]: the left sample when
  /// present, else the right one, else the chord slope.
  [[nodiscard]] double cell_derivative(std::size_t k) const;
  /// Throws PreconditionError when the invariants fail.
  void check() const;
};

/// Default grid: `points` equally spaced points plus the endpoints of M, the
/// atoms and segment junctions, with geometric refinement around M and the
/// atoms.
[[nodiscard]] std::vector<double> default_grid(const TangentField& field, std::size_t points = 4096);

[[nodiscard]] MuSobolevFunction make_function(TangentFieldPtr field, const RealFunction& u,
                                              const RealFunction& du, std::size_t points = 4096);

[[nodiscard]] MuSobolevFunction make_function_on_grid(TangentFieldPtr field, std::vector<double> grid,
                                                      const RealFunction& u, const RealFunction& du);

struct NormParts {
  double l2_part = 0.0;    ///< ∫ u^2 dmu
  double grad_part = 0.0;  ///< ∫_V (u')^2 f dx
  double total_sq = 0.0;
};

/// Throws DomainError when the grid does not cover the interval and
/// ConsistencyError when u belongs to another measure.
[[nodiscard]] NormParts mu_norm(const MuSobolevFunction& u, const Measure& measure);
[[nodiscard]] NormParts mu_norm(const MuSobolevFunction& u);

/// u' at V grid points, 0 at grid points in M ∪ A.
[[nodiscard]] std::vector<double> tangential_gradient(const MuSobolevFunction& u);

/// ∫ g^2 dmu for the gradient candidate g that equals u' on V and
/// `off_regular` on M ∪ A. The tangential gradient is off_regular = 0.
[[nodiscard]] double gradient_energy(const MuSobolevFunction& u, const RealFunction& off_regular);

struct SequenceDiagnostics {
  int n = 0;
  double err_function = 0.0;  ///< ||u_n - u||_{L^2_mu}
  double err_gradient = 0.0;  ///< ||u_n' - v||_{L^2_mu}
  double sup_norm = 0.0;      ///< sup |u_n|
  double bound_claimed = 0.0;
  /// The quantity the construction bounds by bound_claimed: err_gradient^2
  /// for the null-gradient sequence, the gradient mass on M minus the
  /// retained atoms for the flattening sequence.
  double residual = 0.0;
};

struct SequenceResult {
  MuSobolevFunction u_n;
  SequenceDiagnostics diagnostics;
  bool vacuous = false;
  std::string notice;
};

/// u_n -> 0 with u_n' -> 1_A. Covers A by intervals with
/// mu(Omega_n \ A) + |Omega_n| <= 1/(2n), takes v_n = 1 on Omega_n with
/// linear ramps outside whose (mu + Lebesgue) mass is <= 1/n, and sets
/// u_n(x) = ∫_a^x v_n. The proof bounds are sup_norm <= 2/n and
/// err_gradient^2 <= 4/n. Throws PreconditionError when A is empty.
[[nodiscard]] SequenceResult null_gradient_sequence(TangentFieldPtr field, int n,
                                                    std::size_t grid_points = 4096);
[[nodiscard]] SequenceResult null_gradient_sequence(const MeasureSpec& spec, int n);

/// u_n -> u with u_n' -> v, v = u' off M and at atoms, 0 elsewhere on M.
/// u_n equals u outside a neighbourhood Omega_n of M minus the n heaviest
/// atoms, blends quadratically to constants at the ends of each component
/// of Omega_n, is constant on every piece of M and on the rest of the
/// component, and its jumps (all in M) are smoothed on the side where the
/// density is smallest with derivative mass <= 1/(n q), q the number of
/// jumps. When mu(M) = 0 the result is u itself with `vacuous` set.
/// Throws UnsupportedSpecError when a jump cannot be smoothed cheaply.
[[nodiscard]] SequenceResult flatten_critical_sequence(TangentFieldPtr field, const RealFunction& u,
                                                       const RealFunction& du, int n,
                                                       std::size_t grid_points = 4096);
[[nodiscard]] SequenceResult flatten_critical_sequence(const MeasureSpec& spec, const RealFunction& u,
                                                       const RealFunction& du, int n);

/// CSV with header n,err_function,err_gradient,sup_norm,bound_claimed,residual.
[[nodiscard]] std::string diagnostics_csv(std::span<const SequenceDiagnostics> rows);

/// Series behind the failure of L^2_mu ⊂ L^1 when 1/f is not integrable.
/// With b_n = n l_n, S_n = b_1 + ... + b_n and u_n = n / S_n, the function
/// equal to u_n on the level set {1/(n+1) <= f < 1/n} has squared L^2_mu
/// norm about Σ u_n^2 l_n / n = Σ b_n / S_n^2 and L^1 norm Σ u_n l_n =
/// Σ b_n / S_n.
struct CounterexampleSeries {
  std::vector<std::size_t> index;  ///< level index n of each entry
  std::vector<double> lengths;
  std::vector<double> partial_b;
  std::vector<double> coefficients;
  std::vector<double> l2mu_partial;
  std::vector<double> l1_partial;
  /// Σ b_n converged (S_n moved by at most 1e-12 relative over the last
  /// decade of indices): the embedding holds and the series is no witness.
  bool embedding_holds = false;
};

/// lengths[k] is l_{k+1}; uses the first n_max entries. Throws DomainError
/// on a nonpositive length or when fewer than n_max lengths are given.
[[nodiscard]] CounterexampleSeries counterexample_series(std::span<const double> lengths,
                                                         std::size_t n_max);

struct EmbeddingResult {
  bool embedded = false;
  double inverse_density_integral = 0.0;  ///< ∫ 1/f over the density support
  std::optional<CounterexampleSeries> witness;
};

/// embedded iff ∫ 1/f over the density support is finite. Otherwise the
/// witness is built from the level-set lengths of f for n = 1..n_max
/// (empty level sets are skipped). A measure without density segments is
/// not embedded and has no witness.
[[nodiscard]] EmbeddingResult embedding_test(const Measure& measure, std::size_t n_max = 1000000);
[[nodiscard]] EmbeddingResult embedding_test(const MeasureSpec& spec, std::size_t n_max = 1000000);

/// Rows n,length,partial_b,coefficient,l2mu_partial,l1_partial, thinned to
/// every index up to 100 and about 20 per decade beyond, last row always
/// kept.
[[nodiscard]] std::string counterexample_csv(const CounterexampleSeries& series);

struct CompactnessResult {
  std::vector<std::size_t> indices;  ///< selected subsequence, increasing
  std::vector<double> probes;        ///< sorted probe points
  std::vector<double> limits;        ///< limit estimate per probe
  std::vector<bool> extrapolated;    ///< limit from Wynn's epsilon, not a Cauchy tail
  bool complete = true;
  std::string notice;
};

/// Demonstration of pointwise extraction on V for a finite family with
/// mu-norms bounded by `norm_bound`. Probe points are visited in order; at
/// each one the current index set is cut by value bisection (keeping the
/// more populated half, the upper half on ties) until the sampled values
/// are monotone, hence convergent along the family. The limit is the last
/// value when the tail is Cauchy within `tol`, otherwise Wynn's epsilon
/// extrapolation of the selected values. A finite family may be too short:
/// that is reported through `complete` and `notice`, not thrown.
[[nodiscard]] CompactnessResult compactness_extract(std::span<const MuSobolevFunction> family,
                                                    std::span<const double> probe_grid,
                                                    double norm_bound, double tol = 1e-6);

}  // namespace musob
