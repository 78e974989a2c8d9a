#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairstage/errors.hpp"

namespace fairstage {

// Equality tolerance for derived floating-point quantities.
inline constexpr double kTolerance = 1e-9;

using NodeIndex = std::size_t;

// Dense row-major matrix of edge weights between two adjacent stages.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ValidationError("matrix data size does not match " +
                            std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) {
        throw ValidationError("ragged matrix: row " + std::to_string(i) +
                              " has " + std::to_string(rows[i].size()) +
                              " entries, expected " + std::to_string(c));
      }
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * c);
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Fully connected multi-stage graph. Stage j (0-based) has stage_size(j)
// nodes; layer j holds the weights of edges from stage j to stage j + 1.
class FcmsGraph {
 public:
  FcmsGraph() = default;

  explicit FcmsGraph(std::vector<Matrix> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) {
      throw ValidationError("an FCMS graph needs at least two stages");
    }
    stage_sizes_.reserve(layers_.size() + 1);
    stage_sizes_.push_back(layers_.front().rows());
    for (std::size_t j = 0; j < layers_.size(); ++j) {
      const Matrix& w = layers_[j];
      if (w.rows() != stage_sizes_.back()) {
        throw ValidationError("layer " + std::to_string(j + 1) + " has " +
                              std::to_string(w.rows()) + " rows but stage " +
                              std::to_string(j + 1) + " has " +
                              std::to_string(stage_sizes_.back()) + " nodes");
      }
      if (w.rows() == 0 || w.cols() == 0) {
        throw ValidationError("stage sizes must be positive (layer " +
                              std::to_string(j + 1) + ")");
      }
      stage_sizes_.push_back(w.cols());
    }

    max_weight_ = 0.0;
    min_weight_ = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < layers_.size(); ++j) {
      for (double x : layers_[j].values()) {
        if (!std::isfinite(x) || x < 0.0) {
          throw ValidationError("layer " + std::to_string(j + 1) +
                                " has a negative or non-finite weight");
        }
        max_weight_ = std::max(max_weight_, x);
        min_weight_ = std::min(min_weight_, x);
      }
    }
  }

  std::size_t num_stages() const noexcept { return stage_sizes_.size(); }
  std::size_t num_layers() const noexcept { return layers_.size(); }
  std::size_t stage_size(std::size_t stage) const { return stage_sizes_.at(stage); }
  const std::vector<std::size_t>& stage_sizes() const noexcept { return stage_sizes_; }
  std::size_t min_stage_size() const {
    return *std::min_element(stage_sizes_.begin(), stage_sizes_.end());
  }

  const Matrix& layer(std::size_t j) const { return layers_.at(j); }
  const std::vector<Matrix>& layers() const noexcept { return layers_; }

  double weight(std::size_t layer, NodeIndex from, NodeIndex to) const {
    return layers_[layer](from, to);
  }

  // M
  double max_weight() const noexcept { return max_weight_; }
  // m
  double min_weight() const noexcept { return min_weight_; }

  // Smallest strictly positive weight, or 0 when every weight is zero.
  double min_nonzero_weight() const {
    double best = std::numeric_limits<double>::infinity();
    for (const Matrix& w : layers_) {
      for (double x : w.values()) {
        if (x > 0.0) best = std::min(best, x);
      }
    }
    return std::isfinite(best) ? best : 0.0;
  }

  bool is_balanced() const {
    return std::all_of(stage_sizes_.begin(), stage_sizes_.end(),
                       [&](std::size_t s) { return s == stage_sizes_.front(); });
  }

  friend bool operator==(const FcmsGraph& a, const FcmsGraph& b) {
    return a.layers_ == b.layers_;
  }

 private:
  std::vector<Matrix> layers_;
  std::vector<std::size_t> stage_sizes_;
  double max_weight_ = 0.0;
  double min_weight_ = 0.0;
};

// One node index per stage.
using Path = std::vector<NodeIndex>;

// n node-disjoint paths; paths[i] is the path assigned to agent i.
struct Solution {
  std::vector<Path> paths;

  std::size_t num_agents() const noexcept { return paths.size(); }

  friend bool operator==(const Solution&, const Solution&) = default;
  friend auto operator<=>(const Solution&, const Solution&) = default;
};

struct Violation {
  enum class Kind { empty, length, index, disjointness };

  Kind kind;
  std::size_t agent;  // offending agent (second of the pair for disjointness)
  std::size_t stage;  // 1-based stage; 0 when not stage-specific
  std::string message;
};

inline std::optional<Violation> validate(const FcmsGraph& graph, const Solution& solution) {
  const std::size_t k = graph.num_stages();
  if (solution.paths.empty()) {
    return Violation{Violation::Kind::empty, 0, 0, "solution has no paths"};
  }
  for (std::size_t a = 0; a < solution.paths.size(); ++a) {
    const Path& p = solution.paths[a];
    if (p.size() != k) {
      return Violation{Violation::Kind::length, a, 0,
                       "path of agent " + std::to_string(a) + " has length " +
                           std::to_string(p.size()) + ", expected " + std::to_string(k)};
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (p[j] >= graph.stage_size(j)) {
        return Violation{Violation::Kind::index, a, j + 1,
                         "agent " + std::to_string(a) + " uses node " +
                             std::to_string(p[j]) + " outside stage " +
                             std::to_string(j + 1)};
      }
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<std::size_t> owner(graph.stage_size(j), solution.paths.size());
    for (std::size_t a = 0; a < solution.paths.size(); ++a) {
      const NodeIndex v = solution.paths[a][j];
      if (owner[v] != solution.paths.size()) {
        return Violation{Violation::Kind::disjointness, a, j + 1,
                         "agents " + std::to_string(owner[v]) + " and " +
                             std::to_string(a) + " share node " + std::to_string(v) +
                             " at stage " + std::to_string(j + 1)};
      }
      owner[v] = a;
    }
  }
  return std::nullopt;
}

inline void require_valid(const FcmsGraph& graph, const Solution& solution) {
  if (auto v = validate(graph, solution)) throw ValidationError(v->message);
}

inline double path_cost(const FcmsGraph& graph, std::span<const NodeIndex> path) {
  if (path.size() != graph.num_stages()) {
    throw ValidationError("path has length " + std::to_string(path.size()) +
                          ", expected " + std::to_string(graph.num_stages()));
  }
  for (std::size_t j = 0; j < path.size(); ++j) {
    if (path[j] >= graph.stage_size(j)) {
      throw ValidationError("node " + std::to_string(path[j]) +
                            " is outside stage " + std::to_string(j + 1));
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    total += graph.weight(j, path[j], path[j + 1]);
  }
  return total;
}

// Cost of the path "till stage `stage`": the sum of its first (stage - 1)
// edges. `stage` is 1-based, in [1, K].
inline double prefix_cost(const FcmsGraph& graph, std::span<const NodeIndex> path,
                          std::size_t stage) {
  if (stage < 1 || stage > graph.num_stages()) {
    throw PreconditionError("prefix stage " + std::to_string(stage) +
                            " outside [1, " + std::to_string(graph.num_stages()) + "]");
  }
  if (path.size() != graph.num_stages()) {
    throw ValidationError("path has length " + std::to_string(path.size()) +
                          ", expected " + std::to_string(graph.num_stages()));
  }
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < stage; ++j) {
    total += graph.weight(j, path[j], path[j + 1]);
  }
  return total;
}

inline std::vector<double> path_costs(const FcmsGraph& graph, const Solution& solution) {
  std::vector<double> costs;
  costs.reserve(solution.paths.size());
  for (const Path& p : solution.paths) costs.push_back(path_cost(graph, p));
  return costs;
}

inline double solution_cost(const FcmsGraph& graph, const Solution& solution) {
  double total = 0.0;
  for (const Path& p : solution.paths) total += path_cost(graph, p);
  return total;
}

inline double envy_of_costs(std::span<const double> costs) {
  if (costs.empty()) throw ValidationError("envy of an empty solution");
  const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
  return *hi - *lo;
}

inline double envy(const FcmsGraph& graph, const Solution& solution) {
  if (solution.paths.empty()) throw ValidationError("envy of an empty solution");
  const std::vector<double> costs = path_costs(graph, solution);
  return envy_of_costs(costs);
}

// Cost of fairness. cof(0, 0) is 1; a positive cost against a zero optimum
// is unbounded and reported as +infinity.
inline double cof(double cost_fair, double cost_opt) {
  if (cost_opt > 0.0) return cost_fair / cost_opt;
  if (cost_opt == 0.0 && cost_fair == 0.0) return 1.0;
  if (cost_opt == 0.0) return std::numeric_limits<double>::infinity();
  throw PreconditionError("optimal cost must be non-negative");
}

// One experiment record.
struct MetricsRow {
  std::string algorithm;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  double envy = 0.0;
  double envy_ratio = 0.0;
  double cof = 1.0;
  std::size_t swap_count = 0;
  std::optional<std::uint64_t> bound_swaps;
  std::optional<double> mms_bound;
  double wall_time_s = 0.0;
  double max_weight = 0.0;
  std::string error;
};

inline double envy_ratio(double envy_value, double max_weight) {
  return max_weight > 0.0 ? envy_value / max_weight : 0.0;
}

}  // namespace fairstage
