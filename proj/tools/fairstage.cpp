// fairstage: generate FCMS instances, run the solvers, sweep experiments and
// export the envy-constrained 0-1 program.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fairstage/fairstage.hpp"

namespace {

using namespace fairstage;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct GenerateArgs {
  std::string family = "uniform";
  std::size_t n = 10;
  std::size_t k = 40;
  std::int64_t wmin = 1;
  std::int64_t wmax = 30;
  std::uint64_t seed = 1;
  double m = 10.0;
  double delta = -1.0;
  double gamma = 0.01;
  bool reject = false;
  std::uint64_t max_tries = 10'000;
  std::string out;
};

struct SolveArgs {
  std::string instance;
  std::string algorithm = "dc_balance";
  double alpha = 0.01;
  std::size_t n = 0;
  std::uint64_t budget = EnumerationBudget{}.max_solutions;
  bool compact = false;
};

struct SweepArgs {
  std::string axis = "agents";
  std::size_t instances = 500;
  std::vector<std::string> algorithms = {"min_cost", "dc_balance", "edc_balance"};
  std::vector<std::size_t> values;
  std::size_t fixed = 0;
  double alpha = 0.01;
  std::int64_t wmin = 1;
  std::int64_t wmax = 30;
  std::uint64_t seed = 1;
  std::uint64_t max_tries = 10'000;
  std::size_t threads = 0;
  std::string out;
};

struct ExportArgs {
  std::string instance;
  std::string out;
  std::size_t n = 0;
};

std::string default_instance_name(Family f, const FcmsGraph& g, std::uint64_t seed) {
  std::string name = std::string(to_string(f)) + "_n" + std::to_string(g.stage_size(0)) + "_k" +
                     std::to_string(g.num_stages());
  if (f == Family::uniform) name += "_s" + std::to_string(seed);
  return name + ".fcms.json";
}

int cmd_generate(const GenerateArgs& a) {
  InstanceSpec spec;
  spec.family = parse_family(a.family);
  spec.n = a.n;
  spec.k = a.k;
  spec.wmin = a.wmin;
  spec.wmax = a.wmax;
  spec.max_weight = a.m;
  spec.delta = a.delta > 0.0 ? a.delta : a.m / 10.0;
  spec.gamma = a.gamma;
  spec.seed = a.seed;

  FcmsGraph graph;
  std::uint64_t seed = a.seed;
  if (a.reject) {
    if (spec.family != Family::uniform) {
      throw ValidationError("--reject only applies to the uniform family");
    }
    SampledInstance s = gen_rejection_sampled(a.n, a.k, a.wmin, a.wmax, a.seed, a.max_tries);
    graph = std::move(s.graph);
    seed = s.seed;
    std::cerr << "accepted after " << s.tries << " tries (seed " << seed << ")\n";
  } else {
    graph = generate(spec);
  }
  const std::string path = a.out.empty() ? default_instance_name(spec.family, graph, seed) : a.out;
  write_instance(graph, path);
  std::cout << path << ": n=" << graph.stage_size(0) << " K=" << graph.num_stages()
            << " M=" << graph.max_weight() << '\n';
  return 0;
}

int cmd_solve(const SolveArgs& a) {
  const FcmsGraph graph = read_instance(a.instance);
  const std::size_t n = a.n == 0 ? graph.min_stage_size() : a.n;
  RunOptions options;
  options.fairness.alpha = a.alpha;
  options.budget.max_solutions = a.budget;
  const RunResult r = run_algorithm(graph, n, parse_algorithm(a.algorithm), options);
  nlohmann::json doc = solve_report(graph, n, r, options);
  doc["instance"] = a.instance;
  std::cout << doc.dump(a.compact ? -1 : 2) << '\n';
  return 0;
}

int cmd_sweep(const SweepArgs& a) {
  SweepPlan plan;
  if (a.axis == "agents") {
    plan = SweepPlan::standard(SweepAxis::agents);
  } else if (a.axis == "stages") {
    plan = SweepPlan::standard(SweepAxis::stages);
  } else {
    throw ValidationError("--axis must be 'agents' or 'stages'");
  }
  if (!a.values.empty()) plan.values = a.values;
  if (a.fixed != 0) plan.fixed = a.fixed;
  plan.instances_per_point = a.instances;
  plan.algorithms.clear();
  for (const std::string& name : a.algorithms) plan.algorithms.push_back(parse_algorithm(name));
  plan.alpha = a.alpha;
  plan.wmin = a.wmin;
  plan.wmax = a.wmax;
  plan.base_seed = a.seed;
  plan.max_tries = a.max_tries;
  plan.threads = a.threads != 0 ? a.threads : std::max(1u, std::thread::hardware_concurrency());

  const SweepResult result = run_sweep(plan);
  write_sweep(result, a.out);

  std::printf("%4s %4s %-15s %6s %10s %10s %8s %10s\n", "n", "K", "algorithm", "count",
              "envy/M", "CoF", "swaps", "time_s");
  for (const PointSummary& s : result.summary) {
    std::printf("%4zu %4zu %-15s %6zu %10.4f %10.4f %8.2f %10.6f\n", s.n, s.k,
                s.algorithm.c_str(), s.count, s.mean_envy_ratio, s.mean_cof, s.mean_swaps,
                s.mean_time_s);
  }
  std::cout << "rows: " << a.out << "\nsummary: " << summary_path_for(a.out) << '\n';
  return 0;
}

int cmd_export_lp(const ExportArgs& a) {
  const FcmsGraph graph = read_instance(a.instance);
  const std::size_t n = a.n == 0 ? graph.min_stage_size() : a.n;
  const LpStats stats = write_lp(graph, n, a.out);
  std::cout << a.out << ": " << stats.variables << " binary variables, " << stats.constraints
            << " constraints (" << stats.envy_rows << " envy rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair assignment on fully connected multi-stage graphs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write one instance file (.fcms.json)");
  generate->add_option("--family", gen.family, "uniform | unfair_chain | tight2m | gamma")
      ->capture_default_str();
  generate->add_option("--n", gen.n, "agents (nodes per stage)")->capture_default_str();
  generate->add_option("--k", gen.k, "stages")->capture_default_str();
  generate->add_option("--wmin", gen.wmin, "smallest uniform weight")->capture_default_str();
  generate->add_option("--wmax", gen.wmax, "largest uniform weight")->capture_default_str();
  generate->add_option("--seed", gen.seed, "RNG seed")->envname("FAIRSTAGE_SEED")->capture_default_str();
  generate->add_option("--m", gen.m, "max weight M of the adversarial families")->capture_default_str();
  generate->add_option("--delta", gen.delta, "unfair_chain delta (default M/10)");
  generate->add_option("--gamma", gen.gamma, "gamma-instance path weight")->capture_default_str();
  generate->add_flag("--reject", gen.reject, "rejection-sample until min-cost envy exceeds 2M");
  generate->add_option("--max-tries", gen.max_tries, "rejection sampling cap")->capture_default_str();
  generate->add_option("-o,--out", gen.out, "output path");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one algorithm and print a JSON report");
  solve_cmd->add_option("instance,--instance", solve.instance, "instance file")->required();
  solve_cmd->add_option("-a,--algorithm", solve.algorithm,
                        "min_cost | c_balance | dc_balance | edc_balance | oracle_min_cost | "
                        "oracle_min_envy | oracle_bounded")
      ->capture_default_str();
  solve_cmd->add_option("--alpha", solve.alpha, "envy slack of DC-/EDC-Balance")->capture_default_str();
  solve_cmd->add_option("--n", solve.n, "agents (default: smallest stage size)");
  solve_cmd->add_option("--budget", solve.budget, "oracle enumeration cap")->capture_default_str();
  solve_cmd->add_flag("--compact", solve.compact, "single-line JSON");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment sweep and write CSV");
  sweep_cmd->add_option("--axis", sweep.axis, "agents | stages")->capture_default_str();
  sweep_cmd->add_option("--instances", sweep.instances, "instances per point")->capture_default_str();
  sweep_cmd->add_option("--algorithms", sweep.algorithms, "comma-separated algorithm list")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--values", sweep.values, "axis values (default: standard grid)")
      ->delimiter(',');
  sweep_cmd->add_option("--fixed", sweep.fixed, "K for an agents sweep, n for a stages sweep");
  sweep_cmd->add_option("--alpha", sweep.alpha)->capture_default_str();
  sweep_cmd->add_option("--wmin", sweep.wmin)->capture_default_str();
  sweep_cmd->add_option("--wmax", sweep.wmax)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "base seed")->envname("FAIRSTAGE_SEED")->capture_default_str();
  sweep_cmd->add_option("--max-tries", sweep.max_tries, "rejection sampling cap")->capture_default_str();
  sweep_cmd->add_option("--threads", sweep.threads, "workers (default: all cores)");
  sweep_cmd->add_option("-o,--out", sweep.out, "per-run CSV path")->required();

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export-lp", "Write the envy-constrained 0-1 program");
  export_cmd->add_option("instance,--instance", exp.instance, "instance file")->required();
  export_cmd->add_option("-o,--out", exp.out, "output .lp path")->required();
  export_cmd->add_option("--n", exp.n, "agents (default: smallest stage size)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*solve_cmd) return cmd_solve(solve);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*export_cmd) return cmd_export_lp(exp);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
