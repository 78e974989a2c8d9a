#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fairstage/core.hpp"

namespace fairstage {

struct EnumerationBudget {
  std::uint64_t max_solutions = 10'000'000;
};

struct OracleResult {
  Solution solution;
  double cost = 0.0;
  double envy = 0.0;
};

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

}  // namespace detail

// Number of canonical valid solutions for n agents: C(|V1|, n) start sets
// times, per layer, the injective maps of n occupied nodes into the next
// stage. Saturates at uint64 max.
inline std::uint64_t count_solutions(const FcmsGraph& graph, std::size_t n) {
  if (n == 0 || n > graph.min_stage_size()) return 0;
  std::uint64_t count = 1;
  const std::size_t s1 = graph.stage_size(0);
  // C(s1, n) built incrementally; every partial product is itself a binomial.
  for (std::size_t i = 0; i < n; ++i) {
    count = detail::saturating_mul(count, s1 - i) / (i + 1);
  }
  for (std::size_t j = 1; j < graph.num_stages(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      count = detail::saturating_mul(count, graph.stage_size(j) - i);
    }
  }
  return count;
}

// Visit every valid solution of n agents exactly once. Agents are
// canonicalized by ascending stage-1 node, so path order never multiplies
// the count. The visitor receives the solution and its per-path costs.
template <typename Visitor>
void for_each_solution(const FcmsGraph& graph, std::size_t n, Visitor&& visit,
                       EnumerationBudget budget = {}) {
  if (n == 0 || n > graph.min_stage_size()) {
    throw PreconditionError("agent count must be in [1, smallest stage size]");
  }
  const std::uint64_t total = count_solutions(graph, n);
  if (total > budget.max_solutions) throw BudgetExceeded(total, budget.max_solutions);

  const std::size_t k = graph.num_stages();
  Solution s;
  s.paths.assign(n, Path(k, 0));
  // prefix[a][j]: cost of agent a through stage j, recomputed on every
  // extension so sums never drift through add/subtract cycles.
  std::vector<std::vector<double>> prefix(n, std::vector<double>(k, 0.0));
  std::vector<double> costs(n, 0.0);
  std::vector<std::vector<char>> used(k);
  for (std::size_t j = 0; j < k; ++j) used[j].assign(graph.stage_size(j), 0);

  // Place agent `agent` at 0-based stage `stage`, agents left to right,
  // then move on to the next stage.
  auto extend = [&](auto&& self, std::size_t stage, std::size_t agent) -> void {
    if (stage == k) {
      for (std::size_t a = 0; a < n; ++a) costs[a] = prefix[a][k - 1];
      visit(static_cast<const Solution&>(s), std::span<const double>(costs));
      return;
    }
    if (agent == n) {
      self(self, stage + 1, 0);
      return;
    }
    const NodeIndex from = s.paths[agent][stage - 1];
    for (NodeIndex v = 0; v < graph.stage_size(stage); ++v) {
      if (used[stage][v]) continue;
      used[stage][v] = 1;
      s.paths[agent][stage] = v;
      prefix[agent][stage] = prefix[agent][stage - 1] + graph.weight(stage - 1, from, v);
      self(self, stage, agent + 1);
      used[stage][v] = 0;
    }
  };

  // Start sets: n-combinations of stage-1 nodes in lexicographic order.
  std::vector<NodeIndex> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = i;
  const std::size_t s1 = graph.stage_size(0);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) {
      s.paths[i][0] = start[i];
      prefix[i][0] = 0.0;
    }
    extend(extend, 1, 0);
    std::size_t i = n;
    while (i > 0 && start[i - 1] == s1 - n + (i - 1)) --i;
    if (i == 0) break;
    ++start[i - 1];
    for (std::size_t t = i; t < n; ++t) start[t] = start[t - 1] + 1;
  }
}

inline std::vector<Solution> enumerate_solutions(const FcmsGraph& graph, std::size_t n,
                                                 EnumerationBudget budget = {}) {
  std::vector<Solution> out;
  for_each_solution(
      graph, n, [&](const Solution& s, std::span<const double>) { out.push_back(s); }, budget);
  return out;
}

namespace detail {

inline double sum_of(std::span<const double> costs) {
  double total = 0.0;
  for (double c : costs) total += c;
  return total;
}

// -1 / 0 / +1 with values within kTolerance treated as equal.
inline int compare_within_tolerance(double a, double b) {
  if (a < b - kTolerance) return -1;
  if (a > b + kTolerance) return 1;
  return 0;
}

// Lower cost first, then lexicographically smaller solution.
inline bool better_by_cost(double cost, const Solution& s, const OracleResult& best) {
  const int c = compare_within_tolerance(cost, best.cost);
  return c < 0 || (c == 0 && s < best.solution);
}

}  // namespace detail

// Exact minimum total cost; ties resolved to the lexicographically
// smallest solution.
inline OracleResult brute_min_cost(const FcmsGraph& graph, std::size_t n,
                                   EnumerationBudget budget = {}) {
  std::optional<OracleResult> best;
  for_each_solution(
      graph, n,
      [&](const Solution& s, std::span<const double> costs) {
        const double c = detail::sum_of(costs);
        if (!best || detail::better_by_cost(c, s, *best)) {
          best = OracleResult{s, c, envy_of_costs(costs)};
        }
      },
      budget);
  return *best;
}

// Exact minimum envy; ties go to lower cost, then lexicographic order.
inline OracleResult brute_min_envy(const FcmsGraph& graph, std::size_t n,
                                   EnumerationBudget budget = {}) {
  std::optional<OracleResult> best;
  for_each_solution(
      graph, n,
      [&](const Solution& s, std::span<const double> costs) {
        const double e = envy_of_costs(costs);
        const double c = detail::sum_of(costs);
        if (!best) {
          best = OracleResult{s, c, e};
          return;
        }
        const int by_envy = detail::compare_within_tolerance(e, best->envy);
        if (by_envy < 0 || (by_envy == 0 && detail::better_by_cost(c, s, *best))) {
          best = OracleResult{s, c, e};
        }
      },
      budget);
  return *best;
}

// Exact minimum cost among solutions whose envy is at most `bound`
// (within kTolerance); nullopt when none qualifies.
inline std::optional<OracleResult> brute_min_cost_bounded_envy(const FcmsGraph& graph,
                                                               std::size_t n, double bound,
                                                               EnumerationBudget budget = {}) {
  std::optional<OracleResult> best;
  for_each_solution(
      graph, n,
      [&](const Solution& s, std::span<const double> costs) {
        const double e = envy_of_costs(costs);
        if (e > bound + kTolerance) return;
        const double c = detail::sum_of(costs);
        if (!best || detail::better_by_cost(c, s, *best)) best = OracleResult{s, c, e};
      },
      budget);
  return best;
}

}  // namespace fairstage
