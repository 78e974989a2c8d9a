#pragma once

// Random instance generators and naive reference solvers for the tests.
// Nothing here calls into the library's solvers.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "fairstage/core.hpp"

namespace fstest {

using fairstage::FcmsGraph;
using fairstage::Matrix;
using fairstage::Path;
using fairstage::Solution;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  std::size_t size(std::size_t lo, std::size_t hi) {
    return static_cast<std::size_t>(between(static_cast<std::int64_t>(lo),
                                            static_cast<std::int64_t>(hi)));
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool coin() { return between(0, 1) == 1; }

 private:
  std::mt19937_64 engine_;
};

inline FcmsGraph random_graph(Rng& rng, const std::vector<std::size_t>& sizes, std::int64_t wmin,
                              std::int64_t wmax) {
  std::vector<Matrix> layers;
  for (std::size_t j = 0; j + 1 < sizes.size(); ++j) {
    Matrix w(sizes[j], sizes[j + 1]);
    for (std::size_t r = 0; r < sizes[j]; ++r) {
      for (std::size_t c = 0; c < sizes[j + 1]; ++c) w(r, c) = static_cast<double>(rng.between(wmin, wmax));
    }
    layers.push_back(std::move(w));
  }
  return FcmsGraph(std::move(layers));
}

inline FcmsGraph random_balanced(Rng& rng, std::size_t n, std::size_t k, std::int64_t wmin,
                                 std::int64_t wmax) {
  return random_graph(rng, std::vector<std::size_t>(k, n), wmin, wmax);
}

// Stage sizes in [n, max_size] for K stages.
inline std::vector<std::size_t> random_sizes(Rng& rng, std::size_t n, std::size_t k,
                                             std::size_t max_size) {
  std::vector<std::size_t> sizes(k);
  for (auto& s : sizes) s = rng.size(n, max_size);
  return sizes;
}

// Random valid solution of n agents: a random injective choice per stage.
inline Solution random_solution(Rng& rng, const FcmsGraph& g, std::size_t n) {
  Solution s;
  s.paths.assign(n, Path(g.num_stages()));
  for (std::size_t j = 0; j < g.num_stages(); ++j) {
    std::vector<std::size_t> nodes(g.stage_size(j));
    std::iota(nodes.begin(), nodes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(nodes[i], nodes[rng.size(i, nodes.size() - 1)]);
      s.paths[i][j] = nodes[i];
    }
  }
  return s;
}

inline double naive_path_cost(const FcmsGraph& g, const Path& p) {
  double c = 0.0;
  for (std::size_t j = 0; j + 1 < p.size(); ++j) c += g.layer(j)(p[j], p[j + 1]);
  return c;
}

// Every source-to-sink path of the graph.
inline std::vector<Path> all_paths(const FcmsGraph& g) {
  std::vector<Path> out;
  Path p(g.num_stages());
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == g.num_stages()) {
      out.push_back(p);
      return;
    }
    for (std::size_t v = 0; v < g.stage_size(j); ++v) {
      p[j] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return out;
}

// Visit every set of n pairwise node-disjoint paths, ordered by start node.
// Built from the raw path list, independent of the library's enumerator.
inline void naive_for_each(const FcmsGraph& g, std::size_t n,
                           const std::function<void(const Solution&)>& visit) {
  const std::vector<Path> paths = all_paths(g);
  Solution s;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (s.paths.size() == n) {
      visit(s);
      return;
    }
    for (std::size_t i = from; i < paths.size(); ++i) {
      const Path& cand = paths[i];
      if (!s.paths.empty() && cand[0] <= s.paths.back()[0]) continue;
      bool disjoint = true;
      for (const Path& q : s.paths) {
        for (std::size_t j = 0; j < cand.size() && disjoint; ++j) disjoint = cand[j] != q[j];
        if (!disjoint) break;
      }
      if (!disjoint) continue;
      s.paths.push_back(cand);
      rec(i + 1);
      s.paths.pop_back();
    }
  };
  rec(0);
}

inline double naive_min_cost(const FcmsGraph& g, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  naive_for_each(g, n, [&](const Solution& s) {
    double c = 0.0;
    for (const Path& p : s.paths) c += naive_path_cost(g, p);
    best = std::min(best, c);
  });
  return best;
}

inline double naive_envy(const FcmsGraph& g, const Solution& s) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Path& p : s.paths) {
    const double c = naive_path_cost(g, p);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return hi - lo;
}

inline double naive_min_envy(const FcmsGraph& g, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  naive_for_each(g, n, [&](const Solution& s) { best = std::min(best, naive_envy(g, s)); });
  return best;
}

// Minimum over all injective row -> column maps.
inline double brute_assignment(const Matrix& m) {
  std::vector<std::size_t> cols(m.cols());
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> used(m.cols(), 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t r, double acc) {
    if (acc >= best) return;
    if (r == m.rows()) {
      best = acc;
      return;
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (used[c]) continue;
      used[c] = 1;
      rec(r + 1, acc + m(r, c));
      used[c] = 0;
    }
  };
  rec(0, 0.0);
  return best;
}

}  // namespace fstest
