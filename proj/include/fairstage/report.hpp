#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include <json.hpp>

#include "fairstage/fairness.hpp"
#include "fairstage/runner.hpp"

namespace fairstage {

inline nlohmann::json swap_to_json(const SwapRecord& r) {
  return {{"agent_high", r.agent_high},
          {"agent_low", r.agent_low},
          {"swap_stage", r.swap_stage},
          {"round", r.round},
          {"eps", r.eps},
          {"delta", r.delta},
          {"prefix_high", r.prefix_high},
          {"prefix_low", r.prefix_low},
          {"cross_high", r.cross_high},
          {"cross_low", r.cross_low},
          {"cost_high_before", r.cost_high_before},
          {"cost_low_before", r.cost_low_before},
          {"cost_high_after", r.cost_high_after},
          {"cost_low_after", r.cost_low_after},
          {"envy_after", r.envy_after}};
}

// JSON report of one solver run, as printed by `fairstage solve`.
inline nlohmann::json solve_report(const FcmsGraph& graph, std::size_t n, const RunResult& r,
                                   const RunOptions& options) {
  const double m = graph.max_weight();
  nlohmann::json doc = {
      {"algorithm", to_string(r.algorithm)},
      {"n", n},
      {"K", graph.num_stages()},
      {"M", m},
      {"paths", r.solution.paths},
      {"path_costs", r.costs},
      {"total_cost", r.total_cost},
      {"envy", r.envy},
      {"envy_ratio", envy_ratio(r.envy, m)},
      {"min_cost", r.min_cost},
      {"min_cost_envy", r.min_cost_envy},
      {"swap_count", r.swap_count},
      {"time_s", r.wall_time_s},
  };
  const double c = cof(r.total_cost, r.min_cost);
  doc["cof"] = std::isfinite(c) ? nlohmann::json(c) : nlohmann::json("unbounded");

  if (r.trace) {
    nlohmann::json swaps = nlohmann::json::array();
    for (const SwapRecord& s : r.trace->swaps) swaps.push_back(swap_to_json(s));
    doc["trace"] = {{"envy_before", r.trace->envy_before},
                    {"envy_after", r.trace->envy_after},
                    {"terminated_by", to_string(r.trace->terminated_by)},
                    {"round_envy", r.trace->round_envy},
                    {"swaps", std::move(swaps)}};
  }
  if (r.c_swap) doc["swap"] = swap_to_json(*r.c_swap);

  if (r.algorithm == Algorithm::dc_balance) {
    const double alpha = options.fairness.alpha;
    const double bm = r.balance_max_weight;
    doc["alpha"] = alpha;
    doc["bounds"] = {
        {"target_envy", (2.0 + alpha) * bm},
        {"swap_count_bound", swap_count_bound(r.min_cost_envy, bm, n, alpha)},
        {"cof_bound", cof_bound(r.min_cost, r.min_cost_envy, bm, n, alpha)},
        {"mms_bound", mms_upper_bound(r.min_cost, r.min_cost_envy, bm, n, alpha)},
        {"max_agent_cost", *std::max_element(r.costs.begin(), r.costs.end())},
    };
  } else if (r.algorithm == Algorithm::edc_balance) {
    doc["alpha"] = options.fairness.alpha;
  }
  return doc;
}

}  // namespace fairstage
