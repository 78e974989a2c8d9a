#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "fairstage/core.hpp"

namespace fairstage {

struct LpStats {
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::size_t envy_rows = 0;
};

namespace detail {

inline std::string lp_number(double x) {
  char buf[32];
  if (std::floor(x) == x && std::abs(x) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", x);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", x);
  }
  return buf;
}

// Variable for agent `a` using the edge u -> v of layer `layer`
// (agent and stage 1-based, nodes 0-based).
inline std::string lp_var(std::size_t a, std::size_t layer, std::size_t u, std::size_t v) {
  return "x_a" + std::to_string(a + 1) + "_s" + std::to_string(layer + 1) + "_" +
         std::to_string(u) + "_" + std::to_string(v);
}

// Writes "name: t1 + t2 ... <sense> rhs" wrapping long rows.
class RowWriter {
 public:
  RowWriter(std::ostream& out, std::string name) : out_(out) { out_ << ' ' << name << ':'; }

  void term(double coef, const std::string& var) {
    if (coef == 0.0) coef = 0.0;  // drop the sign of -0
    if (terms_ > 0 && terms_ % 8 == 0) out_ << "\n   ";
    if (coef < 0) {
      out_ << " - " << (coef == -1.0 ? "" : lp_number(-coef) + " ") << var;
    } else {
      out_ << (terms_ == 0 ? " " : " + ") << (coef == 1.0 ? "" : lp_number(coef) + " ") << var;
    }
    ++terms_;
  }

  void finish(const char* sense, double rhs) { out_ << ' ' << sense << ' ' << lp_number(rhs) << '\n'; }

  std::size_t terms() const noexcept { return terms_; }

 private:
  std::ostream& out_;
  std::size_t terms_ = 0;
};

}  // namespace detail

// Minimum-cost assignment of n agents with every pairwise envy at most 2M,
// as a 0-1 program in CPLEX LP format. Node-degree rows are equalities on
// stages with exactly n nodes and <= 1 on wider stages.
inline LpStats export_lp(const FcmsGraph& graph, std::size_t n, std::ostream& out) {
  if (n < 1 || n > graph.min_stage_size()) {
    throw PreconditionError("agent count must be in [1, smallest stage size]");
  }
  const std::size_t k = graph.num_stages();
  const double bound = 2.0 * graph.max_weight();
  LpStats stats;
  auto sense_for = [&](std::size_t stage) { return graph.stage_size(stage) == n ? "=" : "<="; };

  out << "\\ Fair multi-stage assignment: " << n << " agents, " << k << " stages\n";
  out << "\\ x_a<agent>_s<stage>_<u>_<v> = 1 when the agent takes edge u -> v out of <stage>\n";
  out << "\\ envy rows bound every pairwise cost difference by 2M = " << detail::lp_number(bound)
      << '\n';

  out << "Minimize\n";
  {
    detail::RowWriter row(out, "cost");
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t j = 0; j + 1 < k; ++j) {
        for (std::size_t u = 0; u < graph.stage_size(j); ++u) {
          for (std::size_t v = 0; v < graph.stage_size(j + 1); ++v) {
            row.term(graph.weight(j, u, v), detail::lp_var(a, j, u, v));
            ++stats.variables;
          }
        }
      }
    }
    out << '\n';
  }

  out << "Subject To\n";
  // One outgoing edge per node of stages 1..K-1.
  for (std::size_t j = 0; j + 1 < k; ++j) {
    for (std::size_t u = 0; u < graph.stage_size(j); ++u) {
      detail::RowWriter row(out, "out_s" + std::to_string(j + 1) + "_" + std::to_string(u));
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t v = 0; v < graph.stage_size(j + 1); ++v) {
          row.term(1.0, detail::lp_var(a, j, u, v));
        }
      }
      row.finish(sense_for(j), 1.0);
      ++stats.constraints;
    }
  }
  // One incoming edge per node of stages 2..K.
  for (std::size_t j = 0; j + 1 < k; ++j) {
    for (std::size_t v = 0; v < graph.stage_size(j + 1); ++v) {
      detail::RowWriter row(out, "in_s" + std::to_string(j + 2) + "_" + std::to_string(v));
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t u = 0; u < graph.stage_size(j); ++u) {
          row.term(1.0, detail::lp_var(a, j, u, v));
        }
      }
      row.finish(sense_for(j + 1), 1.0);
      ++stats.constraints;
    }
  }
  // Each agent leaves stage 1 exactly once.
  for (std::size_t a = 0; a < n; ++a) {
    detail::RowWriter row(out, "start_a" + std::to_string(a + 1));
    for (std::size_t u = 0; u < graph.stage_size(0); ++u) {
      for (std::size_t v = 0; v < graph.stage_size(1); ++v) row.term(1.0, detail::lp_var(a, 0, u, v));
    }
    row.finish("=", 1.0);
    ++stats.constraints;
  }
  // Per-agent flow conservation at inner stages.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t j = 1; j + 1 < k; ++j) {
      for (std::size_t v = 0; v < graph.stage_size(j); ++v) {
        detail::RowWriter row(out, "flow_a" + std::to_string(a + 1) + "_s" +
                                       std::to_string(j + 1) + "_" + std::to_string(v));
        for (std::size_t u = 0; u < graph.stage_size(j - 1); ++u) {
          row.term(1.0, detail::lp_var(a, j - 1, u, v));
        }
        for (std::size_t w = 0; w < graph.stage_size(j + 1); ++w) {
          row.term(-1.0, detail::lp_var(a, j, v, w));
        }
        row.finish("=", 0.0);
        ++stats.constraints;
      }
    }
  }
  // Pairwise envy.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      detail::RowWriter row(out, "envy_a" + std::to_string(a + 1) + "_a" + std::to_string(b + 1));
      for (std::size_t j = 0; j + 1 < k; ++j) {
        for (std::size_t u = 0; u < graph.stage_size(j); ++u) {
          for (std::size_t v = 0; v < graph.stage_size(j + 1); ++v) {
            const double c = graph.weight(j, u, v);
            if (c == 0.0) continue;
            row.term(c, detail::lp_var(a, j, u, v));
            row.term(-c, detail::lp_var(b, j, u, v));
          }
        }
      }
      if (row.terms() == 0) row.term(0.0, detail::lp_var(a, 0, 0, 0));
      row.finish("<=", bound);
      ++stats.constraints;
      ++stats.envy_rows;
    }
  }

  out << "Binary\n";
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t j = 0; j + 1 < k; ++j) {
      for (std::size_t u = 0; u < graph.stage_size(j); ++u) {
        for (std::size_t v = 0; v < graph.stage_size(j + 1); ++v) {
          out << ' ' << detail::lp_var(a, j, u, v) << '\n';
        }
      }
    }
  }
  out << "End\n";
  return stats;
}

inline LpStats write_lp(const FcmsGraph& graph, std::size_t n, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  LpStats stats = export_lp(graph, n, out);
  if (!out) throw IoError("failed writing '" + path + "'");
  return stats;
}

}  // namespace fairstage
