#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "fairstage/core.hpp"

namespace fairstage {

struct Assignment {
  std::vector<NodeIndex> column_of_row;  // injective rows -> columns
  double total_cost = 0.0;
};

// Minimum-cost assignment of every row of an r x c matrix (r <= c) to a
// distinct column. Shortest augmenting path Hungarian method with row and
// column potentials; rows are inserted in index order and ties pick the
// lowest column, so equal-cost optima are resolved deterministically.
inline Assignment hungarian(const Matrix& cost) {
  const std::size_t r = cost.rows();
  const std::size_t c = cost.cols();
  if (r > c) {
    throw PreconditionError("hungarian: " + std::to_string(r) + " rows exceed " +
                            std::to_string(c) + " columns");
  }
  for (double x : cost.values()) {
    if (std::isnan(x)) throw ValidationError("hungarian: NaN cost entry");
    if (!std::isfinite(x) || x < 0.0) {
      throw ValidationError("hungarian: cost entries must be finite and non-negative");
    }
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based with a virtual column 0, as in the classical formulation.
  std::vector<double> u(r + 1, 0.0), v(c + 1, 0.0);
  std::vector<std::size_t> row_of_col(c + 1, 0), way(c + 1, 0);
  std::vector<double> minv(c + 1);
  std::vector<char> used(c + 1);

  for (std::size_t i = 1; i <= r; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= c; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= c; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment result;
  result.column_of_row.assign(r, 0);
  for (std::size_t j = 1; j <= c; ++j) {
    if (row_of_col[j] != 0) result.column_of_row[row_of_col[j] - 1] = j - 1;
  }
  // Sum the selected entries rather than trusting the dual value.
  for (std::size_t i = 0; i < r; ++i) result.total_cost += cost(i, result.column_of_row[i]);
  return result;
}

// Per-layer perfect matching used by Seq-Hungarian.
struct LayerMatching {
  std::size_t layer = 0;
  std::vector<NodeIndex> target;  // stage-(layer) node -> stage-(layer+1) node
  double cost = 0.0;
};

inline std::vector<LayerMatching> layer_matchings(const FcmsGraph& graph) {
  if (!graph.is_balanced()) {
    throw PreconditionError("seq_hungarian requires a balanced graph");
  }
  std::vector<LayerMatching> out;
  out.reserve(graph.num_layers());
  for (std::size_t j = 0; j < graph.num_layers(); ++j) {
    Assignment a = hungarian(graph.layer(j));
    out.push_back({j, std::move(a.column_of_row), a.total_cost});
  }
  return out;
}

// Minimum-cost solution of a balanced graph: solve each layer independently
// and chain the matchings. Agent i starts at stage-1 node i.
inline Solution seq_hungarian(const FcmsGraph& graph) {
  const std::vector<LayerMatching> matchings = layer_matchings(graph);
  const std::size_t n = graph.stage_size(0);
  Solution s;
  s.paths.assign(n, Path(graph.num_stages()));
  for (std::size_t i = 0; i < n; ++i) {
    NodeIndex at = i;
    s.paths[i][0] = at;
    for (std::size_t j = 0; j < matchings.size(); ++j) {
      at = matchings[j].target[at];
      s.paths[i][j + 1] = at;
    }
  }
  return s;
}

namespace detail {

// Residual network for successive shortest paths.
class FlowNetwork {
 public:
  struct Arc {
    std::size_t head;
    std::size_t rev;
    int capacity;
    double cost;
  };

  explicit FlowNetwork(std::size_t nodes) : adj_(nodes) {}

  std::size_t add_arc(std::size_t tail, std::size_t head, int capacity, double cost) {
    adj_[tail].push_back({head, adj_[head].size(), capacity, cost});
    adj_[head].push_back({tail, adj_[tail].size() - 1, 0, -cost});
    return adj_[tail].size() - 1;
  }

  std::size_t size() const noexcept { return adj_.size(); }
  std::vector<Arc>& arcs(std::size_t node) { return adj_[node]; }
  const std::vector<Arc>& arcs(std::size_t node) const { return adj_[node]; }

 private:
  std::vector<std::vector<Arc>> adj_;
};

}  // namespace detail

// n node-disjoint stage-1 -> stage-K paths of minimum total cost, as a unit
// min-cost flow of value n on the layered network with every node split
// into an in/out pair of capacity one, a source feeding stage 1 and a sink
// fed by stage K.
inline Solution min_cost_disjoint_paths(const FcmsGraph& graph, std::size_t n) {
  if (n < 1) throw PreconditionError("need at least one agent");
  if (n > graph.min_stage_size()) {
    throw PreconditionError(std::to_string(n) + " agents exceed the smallest stage (" +
                            std::to_string(graph.min_stage_size()) + " nodes)");
  }
  const std::size_t k = graph.num_stages();
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::size_t j = 0; j < k; ++j) offset[j + 1] = offset[j] + graph.stage_size(j);

  const std::size_t source = 0;
  const std::size_t sink = 1;
  auto in_node = [&](std::size_t stage, NodeIndex v) { return 2 + 2 * (offset[stage] + v); };
  auto out_node = [&](std::size_t stage, NodeIndex v) { return in_node(stage, v) + 1; };

  detail::FlowNetwork net(2 + 2 * offset[k]);
  const int big = static_cast<int>(n);
  for (std::size_t j = 0; j < k; ++j) {
    for (NodeIndex v = 0; v < graph.stage_size(j); ++v) {
      net.add_arc(in_node(j, v), out_node(j, v), 1, 0.0);
    }
  }
  for (NodeIndex v = 0; v < graph.stage_size(0); ++v) net.add_arc(source, in_node(0, v), big, 0.0);
  for (std::size_t j = 0; j + 1 < k; ++j) {
    for (NodeIndex a = 0; a < graph.stage_size(j); ++a) {
      for (NodeIndex b = 0; b < graph.stage_size(j + 1); ++b) {
        net.add_arc(out_node(j, a), in_node(j + 1, b), 1, graph.weight(j, a, b));
      }
    }
  }
  for (NodeIndex v = 0; v < graph.stage_size(k - 1); ++v) {
    net.add_arc(out_node(k - 1, v), sink, big, 0.0);
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t num_nodes = net.size();

  // Exact initial potentials: stage-wise shortest distances on the DAG.
  std::vector<double> potential(num_nodes, inf);
  potential[source] = 0.0;
  for (NodeIndex v = 0; v < graph.stage_size(0); ++v) {
    potential[in_node(0, v)] = 0.0;
    potential[out_node(0, v)] = 0.0;
  }
  for (std::size_t j = 0; j + 1 < k; ++j) {
    for (NodeIndex b = 0; b < graph.stage_size(j + 1); ++b) {
      double best = inf;
      for (NodeIndex a = 0; a < graph.stage_size(j); ++a) {
        best = std::min(best, potential[out_node(j, a)] + graph.weight(j, a, b));
      }
      potential[in_node(j + 1, b)] = best;
      potential[out_node(j + 1, b)] = best;
    }
  }
  {
    double best = inf;
    for (NodeIndex v = 0; v < graph.stage_size(k - 1); ++v) {
      best = std::min(best, potential[out_node(k - 1, v)]);
    }
    potential[sink] = best;
  }

  std::vector<double> dist(num_nodes);
  std::vector<std::size_t> prev_node(num_nodes), prev_arc(num_nodes);
  using Entry = std::pair<double, std::size_t>;

  for (std::size_t unit = 0; unit < n; ++unit) {
    std::fill(dist.begin(), dist.end(), inf);
    dist[source] = 0.0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
      const auto [d, node] = queue.top();
      queue.pop();
      if (d > dist[node]) continue;
      const auto& arcs = net.arcs(node);
      for (std::size_t a = 0; a < arcs.size(); ++a) {
        const auto& arc = arcs[a];
        if (arc.capacity <= 0) continue;
        // Reduced costs are non-negative up to rounding.
        const double reduced =
            std::max(0.0, arc.cost + potential[node] - potential[arc.head]);
        const double nd = d + reduced;
        if (nd < dist[arc.head]) {
          dist[arc.head] = nd;
          prev_node[arc.head] = node;
          prev_arc[arc.head] = a;
          queue.emplace(nd, arc.head);
        }
      }
    }
    if (!std::isfinite(dist[sink])) {
      throw PreconditionError("no augmenting path: fewer than " + std::to_string(n) +
                              " disjoint paths exist");
    }
    for (std::size_t v = 0; v < num_nodes; ++v) {
      if (std::isfinite(dist[v])) potential[v] += dist[v];
    }
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      auto& arc = net.arcs(prev_node[v])[prev_arc[v]];
      arc.capacity -= 1;
      net.arcs(v)[arc.rev].capacity += 1;
    }
  }

  // Decompose: every saturated split arc at stage 1 starts one path.
  Solution s;
  for (NodeIndex start = 0; start < graph.stage_size(0); ++start) {
    const auto& split = net.arcs(in_node(0, start));
    const bool used = std::any_of(split.begin(), split.end(), [&](const auto& arc) {
      return arc.head == out_node(0, start) && arc.capacity == 0;
    });
    if (!used) continue;
    Path p(k);
    p[0] = start;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      const std::size_t from = out_node(j, p[j]);
      const std::size_t lo = in_node(j + 1, 0);
      const std::size_t hi = in_node(j + 1, graph.stage_size(j + 1) - 1);
      for (const auto& arc : net.arcs(from)) {
        if (arc.head >= lo && arc.head <= hi && (arc.head - lo) % 2 == 0 &&
            arc.capacity == 0 && arc.cost >= 0.0) {
          p[j + 1] = (arc.head - lo) / 2;
          break;
        }
      }
    }
    s.paths.push_back(std::move(p));
  }
  return s;
}

// Minimum-cost assignment of n agents on any FCMS graph; Seq-Hungarian when
// the graph is balanced with exactly n nodes per stage.
inline Solution min_cost_solution(const FcmsGraph& graph, std::size_t n) {
  if (graph.is_balanced() && graph.stage_size(0) == n) return seq_hungarian(graph);
  return min_cost_disjoint_paths(graph, n);
}

inline Solution min_cost_solution(const FcmsGraph& graph) {
  return min_cost_solution(graph, graph.min_stage_size());
}

// Balanced subgraph spanned by the nodes a solution occupies.
struct InducedGraph {
  FcmsGraph graph;
  // to_original[j][new index] = original node index at stage j
  std::vector<std::vector<NodeIndex>> to_original;
  // The input solution expressed in the induced graph's indices.
  Solution solution;
};

inline InducedGraph induced_bfcms(const FcmsGraph& graph, const Solution& solution) {
  require_valid(graph, solution);
  const std::size_t k = graph.num_stages();
  const std::size_t n = solution.num_agents();

  InducedGraph out;
  out.to_original.resize(k);
  std::vector<std::vector<NodeIndex>> to_new(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& nodes = out.to_original[j];
    for (const Path& p : solution.paths) nodes.push_back(p[j]);
    std::sort(nodes.begin(), nodes.end());
    to_new[j].assign(graph.stage_size(j), 0);
    for (std::size_t idx = 0; idx < n; ++idx) to_new[j][nodes[idx]] = idx;
  }

  std::vector<Matrix> layers;
  layers.reserve(k - 1);
  for (std::size_t j = 0; j + 1 < k; ++j) {
    Matrix w(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        w(a, b) = graph.weight(j, out.to_original[j][a], out.to_original[j + 1][b]);
      }
    }
    layers.push_back(std::move(w));
  }
  out.graph = FcmsGraph(std::move(layers));

  out.solution.paths.reserve(n);
  for (const Path& p : solution.paths) {
    Path q(k);
    for (std::size_t j = 0; j < k; ++j) q[j] = to_new[j][p[j]];
    out.solution.paths.push_back(std::move(q));
  }
  return out;
}

// Map a solution on the induced graph back to original node indices.
inline Solution lift_solution(const InducedGraph& induced, const Solution& solution) {
  require_valid(induced.graph, solution);
  Solution out;
  out.paths.reserve(solution.num_agents());
  for (const Path& p : solution.paths) {
    Path q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) q[j] = induced.to_original[j][p[j]];
    out.paths.push_back(std::move(q));
  }
  return out;
}

}  // namespace fairstage
