#include <algorithm>
#include <cmath>
#include <sstream>

#include "musob/errors.hpp"
#include "musob/format.hpp"
#include "musob/random.hpp"
#include "musob/transport.hpp"

namespace musob {

namespace {

MeasureSpec scaled(MeasureSpec spec, double factor) {
  for (auto& s : spec.segments) s.coeff *= factor;
  for (auto& a : spec.atoms) a.mass *= factor;
  for (auto& c : spec.cantor_parts) c.mass *= factor;
  return spec;
}

}  // namespace

RealFunction monotone_map(MeasurePtr source, MeasurePtr target) {
  if (!source || !target) throw DomainError("monotone_map: null measure");
  const double scale = target->total_mass() / source->total_mass();
  return [source = std::move(source), target = std::move(target), scale](double x) {
    const double p = std::min(source->cdf(x) * scale, target->total_mass());
    if (!(p > 0.0)) return target->support_lo();
    return target->quantile(p);
  };
}

ProblemReport solve_problem(const MeasureSpec& source, const MeasureSpec& target, std::size_t quanta,
                            const CostConfig& cost, SolverKind method, const LocalSearchOptions& local) {
  if (quanta == 0) throw DomainError("solve_problem: N must be >= 1");
  auto mu = make_measure(source);
  // The constraint needs equal total masses; the target is rescaled to the
  // source's.
  const double ratio = mu->total_mass() / total_mass(target);
  auto nu = make_measure(std::abs(ratio - 1.0) > 1e-12 ? scaled(target, ratio) : target);
  const auto field = tangent_field(mu);
  QuantizedMeasure q_source = label_quantized(*field, quantize(mu, quanta));
  QuantizedMeasure q_target = quantize(nu, quanta);
  const TransportInstance instance(std::move(q_source), std::move(q_target), cost);

  ProblemReport report;
  report.quanta = quanta;
  switch (method) {
    case SolverKind::dp:
      report.solution = solve_dp(instance);
      break;
    case SolverKind::brute:
      report.solution = solve_brute(instance);
      break;
    case SolverKind::local:
      report.solution = solve_local(instance, local);
      break;
    case SolverKind::monotone:
      report.solution = solve_monotone(instance);
      break;
  }
  auto& s = report.solution;
  s.assignment = canonicalize(instance, monotone_repair(instance, std::move(s.assignment)));
  s.objective = objective(instance, s.assignment);

  std::vector<double> mapped(quanta);
  for (std::size_t i = 0; i < quanta; ++i) mapped[i] = instance.target().points[s.assignment[i]];
  report.pushforward_discrepancy = pushforward_discrepancy(instance.source(), mapped, instance.target());
  return report;
}

std::string solution_json(const ProblemReport& report) {
  const auto& s = report.solution;
  std::ostringstream out;
  out << "{\n";
  out << "  \"N\": " << report.quanta << ",\n";
  out << "  \"method\": \"" << to_string(s.solver) << "\",\n";
  out << "  \"objective\": " << format_double(s.objective.total) << ",\n";
  out << "  \"transport_term\": " << format_double(s.objective.transport_term) << ",\n";
  out << "  \"gradient_term\": " << format_double(s.objective.gradient_term) << ",\n";
  out << "  \"assignment\": [";
  for (std::size_t i = 0; i < s.assignment.size(); ++i) out << (i ? ", " : "") << s.assignment[i];
  out << "],\n";
  out << "  \"pushforward_discrepancy\": " << format_double(report.pushforward_discrepancy) << "\n";
  out << "}\n";
  return out.str();
}

std::string local_trace_csv(const TransportSolution& solution) {
  std::ostringstream out;
  out << "restart,iteration,objective\n";
  for (const auto& t : solution.trace) {
    out << t.restart << ',' << t.iteration << ',' << format_double(t.objective) << '\n';
  }
  return out.str();
}

TransportInstance random_instance(std::size_t quanta, std::uint64_t seed, const CostConfig& cost) {
  if (quanta == 0) throw DomainError("random_instance: N must be >= 1");
  Rng rng(seed);
  QuantizedMeasure source, target;
  for (std::size_t i = 0; i < quanta; ++i) {
    source.points.push_back(rng.uniform());
    target.points.push_back(rng.uniform(-1.0, 2.0));
  }
  std::sort(source.points.begin(), source.points.end());
  std::sort(target.points.begin(), target.points.end());
  const double unit = 1.0 / static_cast<double>(quanta);
  source.masses.assign(quanta, unit);
  target.masses.assign(quanta, unit);
  int component = 0;
  bool previous_v = false;
  for (std::size_t i = 0; i < quanta; ++i) {
    const double r = rng.uniform();
    const RegionLabel label = r < 0.7 ? RegionLabel::V : (r < 0.85 ? RegionLabel::M : RegionLabel::A);
    source.region_labels.push_back(label);
    if (label == RegionLabel::V) {
      if (!previous_v || rng.uniform() < 0.2) ++component;
      source.components.push_back(component - 1);
    } else {
      source.components.push_back(-1);
    }
    previous_v = label == RegionLabel::V;
  }
  target.region_labels.assign(quanta, RegionLabel::unset);
  target.components.assign(quanta, -1);
  return TransportInstance(std::move(source), std::move(target), cost);
}

}  // namespace musob
