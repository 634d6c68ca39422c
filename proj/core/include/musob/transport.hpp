#pragma once

// Discretized gradient-penalized transport between two quantized measures:
// source quantum i goes to target quantum sigma[i]. The objective adds a
// transport cost per quantum and a forward-difference gradient penalty on
// consecutive source quanta inside one component of V.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "musob/measure.hpp"
#include "musob/tangent.hpp"

namespace musob {

struct CostConfig {
  enum class Transport { quadratic, power };
  enum class Gradient { squared, squared_minus_identity };

  Transport transport = Transport::quadratic;
  double power = 2.0;  ///< exponent for Transport::power, >= 1
  Gradient gradient = Gradient::squared;
  double gradient_weight = 1.0;

  /// Throws DomainError on power < 1 or a negative weight.
  void validate() const;
  [[nodiscard]] double transport_cost(double distance) const;
  [[nodiscard]] double shift() const noexcept {
    return gradient == Gradient::squared_minus_identity ? 1.0 : 0.0;
  }
};

using Permutation = std::vector<std::size_t>;

class TransportInstance {
 public:
  /// Throws ConsistencyError on a size or per-quantum mass mismatch and
  /// when the source is not labelled.
  TransportInstance(QuantizedMeasure source, QuantizedMeasure target, CostConfig cost);

  [[nodiscard]] const QuantizedMeasure& source() const noexcept { return source_; }
  [[nodiscard]] const QuantizedMeasure& target() const noexcept { return target_; }
  [[nodiscard]] const CostConfig& cost() const noexcept { return cost_; }
  [[nodiscard]] std::size_t size() const noexcept { return source_.size(); }

  /// Transport cost of sending source i to target j.
  [[nodiscard]] double transport(std::size_t i, std::size_t j) const;
  /// Weight of the gradient pair (i - 1, i), 0 when the pair is inactive.
  [[nodiscard]] double pair_weight(std::size_t i) const noexcept { return pair_weight_[i]; }
  /// Gradient cost of the pair (i - 1, i) with targets a and b.
  [[nodiscard]] double pair_cost(std::size_t i, std::size_t a, std::size_t b) const;

 private:
  QuantizedMeasure source_;
  QuantizedMeasure target_;
  CostConfig cost_;
  std::vector<double> pair_weight_;  // [0] unused
};

struct ObjectiveValue {
  double total = 0.0;
  double transport_term = 0.0;
  double gradient_term = 0.0;
};

enum class SolverKind { dp, brute, local, monotone };

[[nodiscard]] const char* to_string(SolverKind kind) noexcept;
/// Throws DomainError on an unknown name.
[[nodiscard]] SolverKind solver_from_string(const std::string& name);

/// One accepted improvement of a local-search run.
struct TraceEntry {
  std::size_t restart = 0;
  std::size_t iteration = 0;
  double objective = 0.0;
};

struct TransportSolution {
  Permutation assignment;
  ObjectiveValue objective;
  SolverKind solver = SolverKind::monotone;
  std::optional<std::uint64_t> seed;
  std::vector<TraceEntry> trace;
};

/// Throws DomainError when sigma is not a bijection of {0..N-1}.
[[nodiscard]] ObjectiveValue objective(const TransportInstance& instance, const Permutation& sigma);

/// Among targets with equal positions, hands out the indices in increasing
/// order along the source. The objective is unchanged.
[[nodiscard]] Permutation canonicalize(const TransportInstance& instance, Permutation sigma);

/// Exhaustive search, lexicographically smallest optimum. N <= 8.
[[nodiscard]] TransportSolution solve_brute(const TransportInstance& instance);
/// Exact DP over (used targets, last target). N <= 20.
[[nodiscard]] TransportSolution solve_dp(const TransportInstance& instance);

struct LocalSearchOptions {
  std::size_t iters = 200000;  ///< swap evaluations per restart
  std::size_t restarts = 4;    ///< restart 0 starts from the monotone assignment
  std::uint64_t seed = 0;
};

/// 2-opt swaps with first improvement. N >= 2.
[[nodiscard]] TransportSolution solve_local(const TransportInstance& instance,
                                            const LocalSearchOptions& options = {});
/// sigma = identity: both sides are sorted, so this is the nondecreasing map.
[[nodiscard]] TransportSolution solve_monotone(const TransportInstance& instance);

/// Sorts the targets held by M- and A-labelled source quanta so that the
/// assignment is nondecreasing on them; V quanta keep their targets.
[[nodiscard]] Permutation monotone_repair(const TransportInstance& instance, Permutation sigma);

/// x -> quantile_target(cdf_source(x)), clamped to the target's total mass.
[[nodiscard]] RealFunction monotone_map(MeasurePtr source, MeasurePtr target);

struct ProblemReport {
  TransportSolution solution;
  double pushforward_discrepancy = 0.0;
  std::size_t quanta = 0;
};

/// Rescales the target to the source's total mass, quantizes both with N
/// quanta, labels the source, solves, repairs and reports the discrete pushforward discrepancy.
[[nodiscard]] ProblemReport solve_problem(const MeasureSpec& source, const MeasureSpec& target,
                                          std::size_t quanta, const CostConfig& cost, SolverKind method,
                                          const LocalSearchOptions& local = {});

/// {"N","method","objective","transport_term","gradient_term","assignment",
/// "pushforward_discrepancy"} with 17 significant digits.
[[nodiscard]] std::string solution_json(const ProblemReport& report);
/// restart,iteration,objective
[[nodiscard]] std::string local_trace_csv(const TransportSolution& solution);

/// Synthetic labelled instance: N sorted source points in [0, 1] with random
/// V/M/A labels and component breaks, N sorted targets in [-1, 2].
[[nodiscard]] TransportInstance random_instance(std::size_t quanta, std::uint64_t seed,
                                                const CostConfig& cost);

}  // namespace musob
