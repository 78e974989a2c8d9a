#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairstage/core.hpp"

namespace fairstage {

// One suffix swap between the current costliest and cheapest agents.
// Stages are 1-based; the swap exchanges the nodes from `swap_stage` onward.
struct SwapRecord {
  std::size_t agent_high = 0;
  std::size_t agent_low = 0;
  std::size_t swap_stage = 0;  // i in [2, K]
  std::size_t round = 0;       // 1-based round the swap belongs to
  double eps = 0.0;            // gap between the pair before the swap
  double delta = 0.0;          // (eps - 2M) / 2
  double cost_high_before = 0.0;
  double cost_low_before = 0.0;
  double prefix_high = 0.0;  // cost of the high path till stage i - 1
  double prefix_low = 0.0;
  double cross_high = 0.0;  // new edge into the low path's stage-i node
  double cross_low = 0.0;   // new edge into the high path's stage-i node
  double cost_high_after = 0.0;
  double cost_low_after = 0.0;
  double envy_after = 0.0;  // envy of the whole solution after the swap
};

struct FairnessConfig {
  double alpha = 0.01;
  // Safety cap on the number of swaps; defaults to 4x the worst-case bound.
  std::optional<std::size_t> max_swaps;
};

enum class Termination { target_met, no_improvement, cap };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::target_met: return "target_met";
    case Termination::no_improvement: return "no_improvement";
    case Termination::cap: return "cap";
  }
  return "unknown";
}

struct FairnessTrace {
  std::vector<SwapRecord> swaps;
  // Solution envy at the start of every round.
  std::vector<double> round_envy;
  double envy_before = 0.0;
  double envy_after = 0.0;
  Termination terminated_by = Termination::target_met;
};

struct FairResult {
  Solution solution;
  FairnessTrace trace;
};

struct CBalanceResult {
  Solution solution;
  std::optional<SwapRecord> swap;
};

// ⌊n/2⌋ · ⌈log2((E0 − 2M)/(αM))⌉, or 0 when E0 is already within (2+α)M.
inline std::uint64_t swap_count_bound(double e0, double max_weight, std::size_t n,
                                      double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
  if (!(max_weight > 0.0) || e0 <= (2.0 + alpha) * max_weight) return 0;
  const double ratio = (e0 - 2.0 * max_weight) / (alpha * max_weight);
  auto rounds = static_cast<std::int64_t>(std::ceil(std::log2(ratio)));
  // log2 of an exact power of two can land a hair above the integer.
  if (rounds > 0 && std::ldexp(1.0, static_cast<int>(rounds - 1)) >= ratio * (1.0 - 1e-12)) {
    --rounds;
  }
  rounds = std::max<std::int64_t>(rounds, 1);
  return static_cast<std::uint64_t>(n / 2) * static_cast<std::uint64_t>(rounds);
}

// Worst-case cost of fairness of DC-Balance.
inline double cof_bound(double cost_opt, double e0, double max_weight, std::size_t n,
                        double alpha) {
  const std::uint64_t swaps = swap_count_bound(e0, max_weight, n, alpha);
  if (swaps == 0 || cost_opt <= 0.0) return 1.0;
  return 1.0 + 2.0 * max_weight * static_cast<double>(swaps) / cost_opt;
}

// Upper bound on the largest agent cost of a DC-Balance solution.
inline double mms_upper_bound(double cost_opt, double e0, double max_weight, std::size_t n,
                              double alpha) {
  if (n == 0) throw PreconditionError("mms bound needs at least one agent");
  const double swaps = static_cast<double>(swap_count_bound(e0, max_weight, n, alpha));
  return (cost_opt + 2.0 * max_weight * swaps +
          static_cast<double>(n - 1) * (2.0 + alpha) * max_weight) /
         static_cast<double>(n);
}

// First stage i in [2, K] where the prefix-cost gap between `high` and
// `low` exceeds half their total gap. Requires cost(high) > cost(low).
inline std::size_t find_crossing_stage(const FcmsGraph& graph, const Path& high,
                                       const Path& low) {
  const double eps = path_cost(graph, high) - path_cost(graph, low);
  if (!(eps > 0.0)) {
    throw PreconditionError("crossing stage needs the first path to be strictly costlier");
  }
  const std::size_t k = graph.num_stages();
  double gap = 0.0;  // prefix gap at stage 1
  for (std::size_t i = 2; i <= k; ++i) {
    gap += graph.weight(i - 2, high[i - 2], high[i - 1]) -
           graph.weight(i - 2, low[i - 2], low[i - 1]);
    if (gap > eps / 2.0) return i;
  }
  // The full-path gap is eps > eps / 2; only reachable through rounding.
  return k;
}

// Swap stage of C-Balance; the pair's gap must exceed 2M.
inline std::size_t find_swap_stage(const FcmsGraph& graph, const Path& high, const Path& low) {
  const double eps = path_cost(graph, high) - path_cost(graph, low);
  if (!(eps > 2.0 * graph.max_weight())) {
    throw PreconditionError("swap requested with gap " + std::to_string(eps) +
                            " not above 2M = " + std::to_string(2.0 * graph.max_weight()));
  }
  return find_crossing_stage(graph, high, low);
}

namespace detail {

// Exchange the suffixes of agents `high` and `low` from `stage` onward.
inline SwapRecord swap_suffixes(const FcmsGraph& graph, Solution& solution, std::size_t high,
                                std::size_t low, std::size_t stage) {
  Path& ph = solution.paths[high];
  Path& pl = solution.paths[low];
  SwapRecord r;
  r.agent_high = high;
  r.agent_low = low;
  r.swap_stage = stage;
  r.cost_high_before = path_cost(graph, ph);
  r.cost_low_before = path_cost(graph, pl);
  r.eps = r.cost_high_before - r.cost_low_before;
  r.delta = (r.eps - 2.0 * graph.max_weight()) / 2.0;
  r.prefix_high = prefix_cost(graph, ph, stage - 1);
  r.prefix_low = prefix_cost(graph, pl, stage - 1);
  r.cross_high = graph.weight(stage - 2, ph[stage - 2], pl[stage - 1]);
  r.cross_low = graph.weight(stage - 2, pl[stage - 2], ph[stage - 1]);
  std::swap_ranges(ph.begin() + static_cast<std::ptrdiff_t>(stage - 1), ph.end(),
                   pl.begin() + static_cast<std::ptrdiff_t>(stage - 1));
  r.cost_high_after = path_cost(graph, ph);
  r.cost_low_after = path_cost(graph, pl);
  return r;
}

// Costliest and cheapest agents; ties go to the lowest index.
inline std::pair<std::size_t, std::size_t> extreme_agents(const std::vector<double>& costs) {
  std::size_t hi = 0, lo = 0;
  for (std::size_t a = 1; a < costs.size(); ++a) {
    if (costs[a] > costs[hi]) hi = a;
    if (costs[a] < costs[lo]) lo = a;
  }
  return {hi, lo};
}

class Balancer {
 public:
  Balancer(const FcmsGraph& graph, Solution solution)
      : graph_(graph), solution_(std::move(solution)) {
    require_valid(graph_, solution_);
    costs_ = path_costs(graph_, solution_);
    trace_.envy_before = envy_of_costs(costs_);
    trace_.round_envy.push_back(trace_.envy_before);
    adjusted_.assign(costs_.size(), 0);
  }

  double current_envy() const { return envy_of_costs(costs_); }
  std::size_t swaps() const { return trace_.swaps.size(); }

  // Apply one swap between the current extremes. Returns false when the
  // two extremes coincide (zero envy).
  bool step(bool require_gap_above_2m) {
    const auto [hi, lo] = extreme_agents(costs_);
    if (hi == lo || !(costs_[hi] > costs_[lo])) return false;
    const Path& ph = solution_.paths[hi];
    const Path& pl = solution_.paths[lo];
    const std::size_t stage = require_gap_above_2m ? find_swap_stage(graph_, ph, pl)
                                                   : find_crossing_stage(graph_, ph, pl);
    saved_round_ = round_;
    saved_adjusted_ = adjusted_;
    saved_round_envy_ = trace_.round_envy.size();
    if (adjusted_[hi] || adjusted_[lo]) {
      ++round_;
      std::fill(adjusted_.begin(), adjusted_.end(), 0);
      trace_.round_envy.push_back(current_envy());
    }
    adjusted_[hi] = adjusted_[lo] = 1;
    SwapRecord r = swap_suffixes(graph_, solution_, hi, lo, stage);
    costs_[hi] = r.cost_high_after;
    costs_[lo] = r.cost_low_after;
    r.round = round_;
    r.envy_after = current_envy();
    trace_.swaps.push_back(r);
    return true;
  }

  // Undo the most recent swap.
  void rollback() {
    const SwapRecord r = trace_.swaps.back();
    Path& ph = solution_.paths[r.agent_high];
    Path& pl = solution_.paths[r.agent_low];
    std::swap_ranges(ph.begin() + static_cast<std::ptrdiff_t>(r.swap_stage - 1), ph.end(),
                     pl.begin() + static_cast<std::ptrdiff_t>(r.swap_stage - 1));
    costs_[r.agent_high] = r.cost_high_before;
    costs_[r.agent_low] = r.cost_low_before;
    trace_.swaps.pop_back();
    round_ = saved_round_;
    adjusted_ = saved_adjusted_;
    trace_.round_envy.resize(saved_round_envy_);
  }

  FairResult finish(Termination how) && {
    trace_.envy_after = current_envy();
    trace_.terminated_by = how;
    return {std::move(solution_), std::move(trace_)};
  }

 private:
  const FcmsGraph& graph_;
  Solution solution_;
  std::vector<double> costs_;
  std::vector<char> adjusted_;
  std::size_t round_ = 1;
  FairnessTrace trace_;
  // State before the latest step, for rollback.
  std::size_t saved_round_ = 1;
  std::vector<char> saved_adjusted_;
  std::size_t saved_round_envy_ = 1;
};

inline std::size_t default_swap_cap(const FcmsGraph& graph, double e0, std::size_t n,
                                    double alpha) {
  return 4 * static_cast<std::size_t>(swap_count_bound(e0, graph.max_weight(), n, alpha));
}

inline void check_config(const FairnessConfig& config) {
  if (!(config.alpha > 0.0)) throw PreconditionError("alpha must be positive");
}

}  // namespace detail

// C-Balance: at most one suffix swap between two agents, leaving their
// envy within 2M.
inline CBalanceResult c_balance(const FcmsGraph& graph, const Solution& solution) {
  if (solution.num_agents() != 2) {
    throw PreconditionError("c_balance needs exactly 2 agents, got " +
                            std::to_string(solution.num_agents()));
  }
  require_valid(graph, solution);
  const double c0 = path_cost(graph, solution.paths[0]);
  const double c1 = path_cost(graph, solution.paths[1]);
  const std::size_t high = c1 > c0 ? 1 : 0;
  const std::size_t low = 1 - high;
  CBalanceResult out{solution, std::nullopt};
  if (!(std::abs(c0 - c1) > 2.0 * graph.max_weight())) return out;
  const std::size_t stage =
      find_swap_stage(graph, solution.paths[high], solution.paths[low]);
  SwapRecord r = detail::swap_suffixes(graph, out.solution, high, low, stage);
  r.round = 1;
  r.envy_after = std::abs(r.cost_high_after - r.cost_low_after);
  out.swap = r;
  return out;
}

// DC-Balance: swap the costliest and cheapest agents until the envy is at
// most (2 + alpha) M.
inline FairResult dc_balance(const FcmsGraph& graph, const Solution& solution,
                             const FairnessConfig& config = {}) {
  detail::check_config(config);
  if (solution.num_agents() < 2) throw PreconditionError("dc_balance needs at least 2 agents");
  detail::Balancer b(graph, solution);
  const double target = (2.0 + config.alpha) * graph.max_weight();
  const std::size_t cap = config.max_swaps.value_or(detail::default_swap_cap(
      graph, b.current_envy(), solution.num_agents(), config.alpha));
  while (b.current_envy() > target) {
    if (b.swaps() >= cap) return std::move(b).finish(Termination::cap);
    b.step(true);
  }
  return std::move(b).finish(Termination::target_met);
}

// EDC-Balance: DC-Balance, then keep swapping the extreme pair while each
// swap strictly lowers the solution's envy.
inline FairResult edc_balance(const FcmsGraph& graph, const Solution& solution,
                              const FairnessConfig& config = {}) {
  detail::check_config(config);
  if (solution.num_agents() < 2) throw PreconditionError("edc_balance needs at least 2 agents");
  detail::Balancer b(graph, solution);
  const double target = (2.0 + config.alpha) * graph.max_weight();
  const std::size_t cap = config.max_swaps.value_or(
      detail::default_swap_cap(graph, b.current_envy(), solution.num_agents(), config.alpha) +
      solution.num_agents() * graph.num_layers());
  while (b.current_envy() > target) {
    if (b.swaps() >= cap) return std::move(b).finish(Termination::cap);
    b.step(true);
  }
  for (;;) {
    const double before = b.current_envy();
    if (b.swaps() >= cap) return std::move(b).finish(Termination::cap);
    if (!b.step(false)) return std::move(b).finish(Termination::target_met);
    if (!(b.current_envy() < before - kTolerance)) {
      b.rollback();
      return std::move(b).finish(Termination::no_improvement);
    }
  }
}

}  // namespace fairstage
