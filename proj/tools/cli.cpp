#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "musob/errors.hpp"
#include "musob/format.hpp"
#include "musob/sobolev.hpp"
#include "musob/spec_io.hpp"
#include "musob/tangent.hpp"
#include "musob/transport.hpp"

namespace musob::cli {

namespace {

struct Options {
  std::string spec;
  std::string target_spec;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<int> n;
  std::size_t quanta = 8;
  std::string method = "dp";
  std::string cost = "quadratic";
  std::string grad = "squared";
  double grad_weight = 1.0;
  int threads = 1;
  std::size_t iters = 200000;
  std::size_t restarts = 4;
  std::string construction = "null-gradient";
  std::string u = "x";
  std::size_t grid = 4096;
  std::size_t n_max = 1000000;
};

struct TestFunction {
  RealFunction u;
  RealFunction du;
};

const std::map<std::string, TestFunction>& test_functions() {
  static const std::map<std::string, TestFunction> table = {
      {"x", {[](double x) { return x; }, [](double) { return 1.0; }}},
      {"x2", {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }}},
      {"one", {[](double) { return 1.0; }, [](double) { return 0.0; }}},
      {"sin", {[](double x) { return std::sin(2.0 * M_PI * x); },
               [](double x) { return 2.0 * M_PI * std::cos(2.0 * M_PI * x); }}},
  };
  return table;
}

const TestFunction& test_function(const std::string& name) {
  const auto& table = test_functions();
  auto it = table.find(name);
  if (it == table.end()) throw DomainError("unknown function '" + name + "' (expected x, x2, one or sin)");
  return it->second;
}

CostConfig parse_cost(const Options& o) {
  CostConfig c;
  if (o.cost == "quadratic") {
    c.transport = CostConfig::Transport::quadratic;
  } else if (o.cost.rfind("power:", 0) == 0) {
    c.transport = CostConfig::Transport::power;
    const std::string p = o.cost.substr(6);
    std::size_t used = 0;
    try {
      c.power = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != p.size()) throw DomainError("--cost: cannot read the power in '" + o.cost + "'");
  } else {
    throw DomainError("--cost: expected quadratic or power:P, got '" + o.cost + "'");
  }
  if (o.grad == "squared") {
    c.gradient = CostConfig::Gradient::squared;
  } else if (o.grad == "squared-id") {
    c.gradient = CostConfig::Gradient::squared_minus_identity;
  } else {
    throw DomainError("--grad: expected squared or squared-id, got '" + o.grad + "'");
  }
  c.gradient_weight = o.grad_weight;
  c.validate();
  return c;
}

class Output {
 public:
  Output(const std::string& dir, std::ostream& out) : dir_(dir), out_(out) {}

  void emit(const std::string& name, const std::string& content) {
    if (dir_.empty()) {
      out_ << content;
      return;
    }
    std::filesystem::create_directories(dir_);
    const auto path = std::filesystem::path(dir_) / name;
    std::ofstream file(path, std::ios::binary);
    file << content;
    if (!file) throw DomainError("cannot write " + path.string());
  }

  [[nodiscard]] bool to_directory() const { return !dir_.empty(); }

 private:
  std::string dir_;
  std::ostream& out_;
};

MeasureSpec require_spec(const std::string& path, const char* flag) {
  if (path.empty()) throw DomainError(std::string(flag) + " is required");
  return load_measure_spec(path);
}

void run_classify(const Options& o, Output& out) {
  const auto field = tangent_field(make_measure(require_spec(o.spec, "--spec")));
  out.emit("tangent_field.csv", tangent_field_csv(*field));
}

void run_norm(const Options& o, Output& out) {
  const auto field = tangent_field(make_measure(require_spec(o.spec, "--spec")));
  const auto& f = test_function(o.u);
  const auto parts = mu_norm(make_function(field, f.u, f.du, o.grid));
  const double row[] = {parts.l2_part, parts.grad_part, parts.total_sq};
  out.emit("norm.csv", "l2_part,grad_part,total_sq\n" + format_row(row) + "\n");
}

void run_construct(const Options& o, Output& out, std::ostream& err) {
  const auto field = tangent_field(make_measure(require_spec(o.spec, "--spec")));
  const std::vector<int> levels = o.n.empty() ? std::vector<int>{10, 100, 1000} : o.n;
  std::vector<SequenceDiagnostics> rows;
  for (int n : levels) {
    SequenceResult r;
    if (o.construction == "null-gradient") {
      r = null_gradient_sequence(field, n, o.grid);
    } else if (o.construction == "flatten") {
      const auto& f = test_function(o.u);
      r = flatten_critical_sequence(field, f.u, f.du, n, o.grid);
    } else {
      throw DomainError("--construction: expected null-gradient or flatten, got '" + o.construction + "'");
    }
    if (!r.notice.empty()) err << "note: n=" << n << ": " << r.notice << '\n';
    rows.push_back(r.diagnostics);
  }
  out.emit("diagnostics.csv", diagnostics_csv(rows));
}

void run_embed(const Options& o, Output& out) {
  const auto result = embedding_test(require_spec(o.spec, "--spec"), o.n_max);
  std::ostringstream summary;
  summary << "embedded,inverse_density_integral\n"
          << (result.embedded ? "true" : "false") << ',' << format_double(result.inverse_density_integral)
          << '\n';
  out.emit("embedding_summary.csv", summary.str());
  const CounterexampleSeries empty;
  out.emit("embedding.csv", counterexample_csv(result.witness ? *result.witness : empty));
}

void run_solve(const Options& o, Output& out) {
  const MeasureSpec source = require_spec(o.spec, "--spec");
  const MeasureSpec target = require_spec(o.target_spec, "--target-spec");
  LocalSearchOptions local;
  local.iters = o.iters;
  local.restarts = o.restarts;
  local.seed = o.seed;
  const auto report = solve_problem(source, target, o.quanta, parse_cost(o), solver_from_string(o.method), local);
  out.emit("solution.json", solution_json(report));
  if (report.solution.solver == SolverKind::local && out.to_directory()) {
    out.emit("convergence.csv", local_trace_csv(report.solution));
  }
}

void add_options(CLI::App& sub, Options& o) {
  sub.add_option("--spec", o.spec, "measure spec (JSON)");
  sub.add_option("--target-spec", o.target_spec, "target measure spec for solve");
  sub.add_option("--out", o.out, "output directory (default: stdout)");
  sub.add_option("--seed", o.seed, "random seed");
  sub.add_option("--n", o.n, "construction level, repeatable")->check(CLI::PositiveNumber);
  sub.add_option("--quanta", o.quanta, "quanta per measure for solve")->check(CLI::PositiveNumber);
  sub.add_option("--method", o.method, "brute, dp, local or monotone");
  sub.add_option("--cost", o.cost, "quadratic or power:P");
  sub.add_option("--grad", o.grad, "squared or squared-id");
  sub.add_option("--grad-weight", o.grad_weight, "gradient weight");
  sub.add_option("--threads", o.threads, "thread cap")->check(CLI::PositiveNumber);
  sub.add_option("--iters", o.iters, "local search: swap evaluations per restart");
  sub.add_option("--restarts", o.restarts, "local search: restarts");
  sub.add_option("--construction", o.construction, "null-gradient or flatten");
  sub.add_option("--u", o.u, "test function: x, x2, one or sin");
  sub.add_option("--grid", o.grid, "grid points")->check(CLI::PositiveNumber);
  sub.add_option("--n-max", o.n_max, "embed: number of level sets")->check(CLI::PositiveNumber);
  sub.add_option("--config", "JSON file with flag values; flags on the command line win");
}

// Flag tokens named in a JSON config, for the flags absent from args.
std::vector<std::string> config_tokens(const std::string& path, const std::set<std::string>& present,
                                       std::string& command) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON config: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("$", "config must be a JSON object");
  std::vector<std::string> tokens;
  auto scalar = [](const nlohmann::json& v, const std::string& key) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    throw ValidationError("$." + key, "expected a string or a number");
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "command") {
      command = scalar(value, key);
      continue;
    }
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    if (present.count(flag) != 0) continue;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        tokens.push_back(flag);
        tokens.push_back(scalar(value[i], key + "[" + std::to_string(i) + "]"));
      }
    } else {
      tokens.push_back(flag);
      tokens.push_back(scalar(value, key));
    }
  }
  return tokens;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = args_in;

  // --config is applied first so later flags can override it.
  std::optional<std::string> config;
  std::set<std::string> present;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const std::string name = a.substr(0, a.find('='));
    present.insert(name);
    if (name == "--config") config = a.size() > name.size() ? a.substr(name.size() + 1)
                                                            : (i + 1 < args.size() ? args[i + 1] : "");
  }
  try {
    if (config) {
      std::string command;
      auto extra = config_tokens(*config, present, command);
      if (!command.empty() && (args.empty() || args.front().rfind("-", 0) == 0)) {
        args.insert(args.begin(), command);
      }
      args.insert(args.end(), extra.begin(), extra.end());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{"Tangent spaces, mu-Sobolev norms and gradient-penalized transport on the line", "musob"};
  app.require_subcommand(1);
  Options o;
  auto* classify = app.add_subcommand("classify", "classify a measure into V, M and A");
  auto* norm = app.add_subcommand("norm", "H^1_mu norm of a test function");
  auto* construct = app.add_subcommand("construct", "approximating-sequence diagnostics");
  auto* embed = app.add_subcommand("embed", "L^2_mu into L^1 embedding test");
  auto* solve = app.add_subcommand("solve", "discrete gradient-penalized transport");
  for (auto* sub : {classify, norm, construct, embed, solve}) add_options(*sub, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    Output output(o.out, out);
    if (classify->parsed()) run_classify(o, output);
    if (norm->parsed()) run_norm(o, output);
    if (construct->parsed()) run_construct(o, output, err);
    if (embed->parsed()) run_embed(o, output);
    if (solve->parsed()) run_solve(o, output);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 1;
  }
  return 0;
}

}  // namespace musob::cli
