#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fairstage/core.hpp"
#include "fairstage/fairness.hpp"
#include "fairstage/mincost.hpp"
#include "fairstage/oracle.hpp"

namespace fairstage {

enum class Algorithm {
  min_cost,
  c_balance,
  dc_balance,
  edc_balance,
  oracle_min_cost,
  oracle_min_envy,
  oracle_bounded,
};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::min_cost: return "min_cost";
    case Algorithm::c_balance: return "c_balance";
    case Algorithm::dc_balance: return "dc_balance";
    case Algorithm::edc_balance: return "edc_balance";
    case Algorithm::oracle_min_cost: return "oracle_min_cost";
    case Algorithm::oracle_min_envy: return "oracle_min_envy";
    case Algorithm::oracle_bounded: return "oracle_bounded";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::min_cost, Algorithm::c_balance, Algorithm::dc_balance,
                      Algorithm::edc_balance, Algorithm::oracle_min_cost,
                      Algorithm::oracle_min_envy, Algorithm::oracle_bounded}) {
    if (name == to_string(a)) return a;
  }
  throw ValidationError("unknown algorithm '" + name + "'");
}

struct RunOptions {
  FairnessConfig fairness;
  EnumerationBudget budget;
};

struct RunResult {
  Algorithm algorithm = Algorithm::min_cost;
  Solution solution;
  std::vector<double> costs;
  double total_cost = 0.0;
  double envy = 0.0;
  std::size_t swap_count = 0;
  double wall_time_s = 0.0;

  // Reference point: the minimum-cost solution the fair algorithms start from.
  double min_cost = 0.0;
  double min_cost_envy = 0.0;
  // Max weight the fair algorithms balanced against (of the induced
  // balanced graph when the input is wider than n).
  double balance_max_weight = 0.0;

  std::optional<FairnessTrace> trace;
  std::optional<SwapRecord> c_swap;
};

namespace detail {

inline FairResult run_fair(Algorithm algorithm, const FcmsGraph& graph, const Solution& start,
                           const FairnessConfig& config) {
  switch (algorithm) {
    case Algorithm::dc_balance: return dc_balance(graph, start, config);
    case Algorithm::edc_balance: return edc_balance(graph, start, config);
    default: break;
  }
  throw PreconditionError("not a balancing algorithm");
}

}  // namespace detail

// Run one algorithm on n agents. Balancing algorithms start from the
// minimum-cost solution; on graphs wider than n they operate on the
// balanced subgraph that solution induces. The timed window covers the
// whole run including the minimum-cost solve.
inline RunResult run_algorithm(const FcmsGraph& graph, std::size_t n, Algorithm algorithm,
                               const RunOptions& options = {}) {
  using Clock = std::chrono::steady_clock;
  RunResult r;
  r.algorithm = algorithm;

  const auto t0 = Clock::now();
  switch (algorithm) {
    case Algorithm::oracle_min_cost:
      r.solution = brute_min_cost(graph, n, options.budget).solution;
      break;
    case Algorithm::oracle_min_envy:
      r.solution = brute_min_envy(graph, n, options.budget).solution;
      break;
    case Algorithm::oracle_bounded: {
      auto best = brute_min_cost_bounded_envy(graph, n, 2.0 * graph.max_weight(), options.budget);
      if (!best) throw PreconditionError("no solution with envy within 2M");
      r.solution = best->solution;
      break;
    }
    default: {
      Solution start = min_cost_solution(graph, n);
      if (algorithm == Algorithm::min_cost) {
        r.solution = std::move(start);
        break;
      }
      const bool direct = graph.is_balanced() && graph.stage_size(0) == n;
      std::optional<InducedGraph> induced;
      if (!direct) induced = induced_bfcms(graph, start);
      const FcmsGraph& work = direct ? graph : induced->graph;
      const Solution& work_start = direct ? start : induced->solution;
      Solution balanced;
      if (algorithm == Algorithm::c_balance) {
        CBalanceResult cb = c_balance(work, work_start);
        balanced = std::move(cb.solution);
        r.c_swap = cb.swap;
        r.swap_count = cb.swap ? 1 : 0;
      } else {
        FairResult fr = detail::run_fair(algorithm, work, work_start, options.fairness);
        balanced = std::move(fr.solution);
        r.swap_count = fr.trace.swaps.size();
        r.trace = std::move(fr.trace);
      }
      r.solution = direct ? std::move(balanced) : lift_solution(*induced, balanced);
      r.balance_max_weight = work.max_weight();
      break;
    }
  }
  r.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();

  r.costs = path_costs(graph, r.solution);
  r.total_cost = solution_cost(graph, r.solution);
  r.envy = envy_of_costs(r.costs);

  // Reference min-cost outside the timed window.
  const Solution reference = min_cost_solution(graph, n);
  r.min_cost = solution_cost(graph, reference);
  r.min_cost_envy = envy(graph, reference);
  if (r.balance_max_weight == 0.0) r.balance_max_weight = graph.max_weight();
  return r;
}

inline MetricsRow make_metrics_row(const FcmsGraph& graph, std::size_t n, std::uint64_t seed,
                                   const RunResult& r, double alpha) {
  MetricsRow row;
  row.algorithm = to_string(r.algorithm);
  row.n = n;
  row.k = graph.num_stages();
  row.seed = seed;
  row.total_cost = r.total_cost;
  row.envy = r.envy;
  row.max_weight = graph.max_weight();
  row.envy_ratio = envy_ratio(r.envy, graph.max_weight());
  row.cof = cof(r.total_cost, r.min_cost);
  row.swap_count = r.swap_count;
  row.wall_time_s = r.wall_time_s;
  if (r.algorithm == Algorithm::dc_balance || r.algorithm == Algorithm::c_balance) {
    // C-Balance is DC-Balance's n = 2 case, so both share the bounds.
    row.bound_swaps = swap_count_bound(r.min_cost_envy, r.balance_max_weight, n, alpha);
    row.mms_bound =
        mms_upper_bound(r.min_cost, r.min_cost_envy, r.balance_max_weight, n, alpha);
  }
  return row;
}

// ---------------------------------------------------------------------------
// CSV.

inline constexpr const char* kMetricsCsvHeader =
    "algorithm,n,K,seed,cost,envy,envy_ratio,cof,swaps,bound_swaps,mms_bound,time_s,M,error";

namespace detail {

inline std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

inline void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  char time_buf[32];
  std::snprintf(time_buf, sizeof time_buf, "%.6f", row.wall_time_s);
  const bool failed = !row.error.empty();
  auto num = [&](double x) { return failed ? std::string() : detail::csv_number(x); };
  out << row.algorithm << ',' << row.n << ',' << row.k << ',' << row.seed << ','
      << num(row.total_cost) << ',' << num(row.envy) << ',' << num(row.envy_ratio) << ','
      << num(row.cof) << ',' << (failed ? std::string() : std::to_string(row.swap_count)) << ','
      << (row.bound_swaps ? std::to_string(*row.bound_swaps) : std::string()) << ','
      << (row.mms_bound ? detail::csv_number(*row.mms_bound) : std::string()) << ','
      << (failed ? std::string() : std::string(time_buf)) << ','
      << detail::csv_number(row.max_weight) << ',' << detail::csv_field(row.error) << '\n';
}

}  // namespace fairstage
