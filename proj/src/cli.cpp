#include "gradsat/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>
#include <vector>

#include "gradsat/bench.hpp"
#include "gradsat/generate.hpp"
#include "gradsat/orchestrator.hpp"
#include "gradsat/solution_io.hpp"

namespace gradsat {

namespace {

// CLI11 wants argc/argv with the program name first.
int parse_args(CLI::App& app, const char* program, std::span<const std::string> args,
               std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{program};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << program << ": " << e.what() << '\n';
    return 1;
  }
  return -1;
}

std::size_t default_workers() {
  return std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
}

void add_solver_options(CLI::App& app, HybridConfig& config, double& tau, std::uint32_t& iters) {
  app.add_option("--candidates", config.optimizer.candidates, "Candidate assignments N")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", config.workers, "CDCL worker threads W")->check(CLI::PositiveNumber);
  app.add_option("--tau", tau, "Smooth-min temperature")->check(CLI::PositiveNumber);
  app.add_option("--max-iters", iters, "Gradient iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", config.seed, "Random seed");
  app.add_flag("--no-normalize{false}", config.optimizer.normalize,
               "Skip per-variable row normalization of the parameters");
}

}  // namespace

int main_solve(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-seeded portfolio CDCL SAT solver", "gradsat"};
  HybridConfig config;
  config.workers = default_workers();
  double tau = config.optimizer.tau;
  std::uint32_t iters = config.optimizer.max_iterations;
  std::string input;
  double timeout = 0.0;
  std::string trace_path;
  std::string json_path;
  std::string partials_path;
  std::string matrix_path;
  bool unseeded_only = false;
  bool gradient_only = false;

  app.add_option("input", input, "DIMACS CNF file")->required();
  add_solver_options(app, config, tau, iters);
  app.add_option("--timeout", timeout, "Wall-clock limit in seconds")->check(CLI::PositiveNumber);
  app.add_option("--trace", trace_path, "Write gradient trace CSV")
      ->expected(0, 1)
      ->default_str("gradsat-trace.csv");
  app.add_option("--json-stats", json_path, "Write run statistics as JSON");
  app.add_option("--dump-partials", partials_path, "Write seed partial assignments as JSON");
  app.add_option("--dump-matrix", matrix_path, "Write the problem matrix (Matrix Market)");
  auto* unseeded = app.add_flag("--unseeded-only", unseeded_only, "Plain CDCL baseline");
  app.add_flag("--gradient-only", gradient_only, "Gradient phase only")->excludes(unseeded);

  if (int rc = parse_args(app, "gradsat", args, out, err); rc >= 0) return rc;
  if (app.count("--trace") && trace_path.empty()) trace_path = "gradsat-trace.csv";

  config.optimizer.tau = tau;
  config.optimizer.max_iterations = iters;
  if (timeout > 0) config.global_timeout = std::chrono::duration<double>(timeout);
  if (unseeded_only) config.mode = PipelineMode::UnseededOnly;
  if (gradient_only) config.mode = PipelineMode::GradientOnly;

  try {
    std::vector<std::string> warnings;
    const CnfFormula formula = parse_dimacs_file(input, &warnings);
    for (const auto& w : warnings) err << "c warning: " << w << '\n';
    out << "c " << input << ": " << formula.num_vars() << " variables, " << formula.num_clauses()
        << " clauses\n";

    if (!matrix_path.empty()) {
      std::ofstream mm(matrix_path);
      write_matrix_market(mm, encode_problem(formula));
    }

    const HybridResult result = solve_hybrid(formula, config);

    if (!trace_path.empty() && result.gradient) {
      std::ofstream trace(trace_path);
      write_trace_csv(trace, result.gradient->trace);
    }
    if (!json_path.empty()) {
      std::ofstream js(json_path);
      js << to_json(result).dump(2) << '\n';
    }
    if (!partials_path.empty()) {
      nlohmann::json doc = nlohmann::json::array();
      for (const auto& p : result.partials) doc.push_back(to_json(p));
      std::ofstream js(partials_path);
      js << doc.dump(2) << '\n';
    }

    out << "c gradient " << result.timings.gradient_seconds << "s, cdcl "
        << result.timings.refinement_seconds << "s, total " << result.timings.total_seconds
        << "s\n";
    write_solution(out, result.outcome.status,
                   result.outcome.model ? &*result.outcome.model : nullptr);
    return competition_exit_code(result.outcome.status);
  } catch (const std::exception& e) {
    err << "gradsat: " << e.what() << '\n';
    return 1;
  }
}

int main_bench(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Benchmark harness for gradsat", "gradsat-bench"};
  app.require_subcommand(1);

  SuiteConfig suite;
  suite.hybrid.workers = default_workers();
  double tau = suite.hybrid.optimizer.tau;
  std::uint32_t iters = suite.hybrid.optimizer.max_iterations;
  std::string directory;
  std::string json_path = "report.json";
  std::string csv_path = "curves.csv";
  auto* run = app.add_subcommand("suite", "Run hybrid and baseline over a directory of .cnf files");
  run->add_option("directory", directory, "Directory of .cnf files")->required();
  run->add_option("--timeout", suite.timeout_seconds, "Per-instance timeout in seconds")
      ->check(CLI::PositiveNumber);
  run->add_option("--grid-points", suite.grid_points, "Cumulative curve resolution");
  run->add_option("--json", json_path, "Report output");
  run->add_option("--csv", csv_path, "Cumulative curve output");
  add_solver_options(*run, suite.hybrid, tau, iters);

  std::string out_dir;
  std::uint32_t vars = 100;
  double ratio = 4.2;
  std::size_t count = 10;
  std::uint32_t k = 3;
  std::uint64_t seed = 1;
  bool planted = false;
  auto* gen = app.add_subcommand("generate", "Write random k-SAT instances");
  gen->add_option("directory", out_dir, "Output directory")->required();
  gen->add_option("--vars", vars, "Variables per instance")->check(CLI::PositiveNumber);
  gen->add_option("--ratio", ratio, "Clause-to-variable ratio")->check(CLI::PositiveNumber);
  gen->add_option("--count", count, "Number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--k", k, "Literals per clause")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "First seed");
  gen->add_flag("--planted", planted, "Plant a hidden satisfying assignment");

  if (int rc = parse_args(app, "gradsat-bench", args, out, err); rc >= 0) return rc;

  try {
    if (*run) {
      suite.hybrid.optimizer.tau = tau;
      suite.hybrid.optimizer.max_iterations = iters;
      suite.json_out = json_path;
      suite.csv_out = csv_path;
      const SuiteReport report = run_suite(directory, suite, &out);
      out << "c PAR2 hybrid " << report.hybrid.par2 << " baseline " << report.baseline.par2 << '\n';
      return 0;
    }
    std::filesystem::create_directories(out_dir);
    const auto clauses = static_cast<std::size_t>(ratio * vars + 0.5);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t s = seed + i;
      const CnfFormula f =
          planted ? planted_ksat(vars, clauses, k, s).formula : random_ksat(vars, clauses, k, s);
      const auto name = std::filesystem::path(out_dir) /
                        ((planted ? "planted-" : "random-") + std::to_string(vars) + "-" +
                         std::to_string(s) + ".cnf");
      std::ofstream file(name);
      file << "c generated k=" << k << " ratio=" << ratio << " seed=" << s << '\n';
      write_dimacs(file, f);
      out << name.string() << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "gradsat-bench: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace gradsat
