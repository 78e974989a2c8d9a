#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairstage/core.hpp"
#include "fairstage/mincost.hpp"

namespace fairstage {

// ---------------------------------------------------------------------------
// Randomness. std::mt19937_64 is bit-specified by the standard; the integer
// mapping below is ours so results do not depend on the library's
// distribution implementation.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent child seed for stream `index` of `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index));
}

// Uniform integer in [lo, hi], unbiased by rejection.
inline std::int64_t uniform_int(std::mt19937_64& engine, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(engine());
  const std::uint64_t reject_below = (0 - range) % range;
  std::uint64_t x;
  do {
    x = engine();
  } while (x < reject_below);
  return lo + static_cast<std::int64_t>(x % range);
}

// ---------------------------------------------------------------------------
// Generators.

enum class Family { uniform, unfair_chain, tight_2m, gamma };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::uniform: return "uniform";
    case Family::unfair_chain: return "unfair_chain";
    case Family::tight_2m: return "tight_2m";
    case Family::gamma: return "gamma";
  }
  return "unknown";
}

inline Family parse_family(const std::string& name) {
  if (name == "uniform") return Family::uniform;
  if (name == "unfair_chain" || name == "unfairchain" || name == "chain") {
    return Family::unfair_chain;
  }
  if (name == "tight_2m" || name == "tight2m" || name == "tight") return Family::tight_2m;
  if (name == "gamma") return Family::gamma;
  throw ValidationError("unknown instance family '" + name + "'");
}

inline FcmsGraph gen_uniform(std::size_t n, std::size_t k, std::int64_t wmin, std::int64_t wmax,
                             std::uint64_t seed) {
  if (n < 1) throw ValidationError("uniform: n must be at least 1");
  if (k < 2) throw ValidationError("uniform: K must be at least 2");
  if (wmin < 0 || wmin > wmax) throw ValidationError("uniform: need 0 <= wmin <= wmax");
  std::mt19937_64 engine(seed);
  std::vector<Matrix> layers;
  layers.reserve(k - 1);
  for (std::size_t j = 0; j + 1 < k; ++j) {
    Matrix w(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        w(a, b) = static_cast<double>(uniform_int(engine, wmin, wmax));
      }
    }
    layers.push_back(std::move(w));
  }
  return FcmsGraph(std::move(layers));
}

// Two agents; node 0 is the upper row, node 1 the lower. Upper straight
// edges weigh M - delta, lower straight edges 0, every cross edge M.
inline FcmsGraph gen_unfair_chain(std::size_t k, double max_weight, double delta) {
  if (k < 2) throw ValidationError("unfair_chain: K must be at least 2");
  if (!(delta > 0.0) || !(delta < max_weight)) {
    throw ValidationError("unfair_chain: need 0 < delta < M");
  }
  const Matrix w = Matrix::from_rows({{max_weight - delta, max_weight}, {max_weight, 0.0}});
  return FcmsGraph(std::vector<Matrix>(k - 1, w));
}

// Three stages, two agents; every one of the four assignments splits the
// costs into {2M, 0}.
inline FcmsGraph gen_tight_2m(double max_weight) {
  if (!(max_weight > 0.0)) throw ValidationError("tight_2m: M must be positive");
  const double m = max_weight;
  return FcmsGraph({Matrix::from_rows({{m, 0.0}, {m, 0.0}}),
                    Matrix::from_rows({{m, m}, {0.0, 0.0}})});
}

// Node 0 of every stage lies on the gamma path: 0 -> 0 weighs gamma, edges
// between node 0 and any other node weigh M, all remaining edges are 0.
inline FcmsGraph gen_gamma_instance(std::size_t n, std::size_t k, double max_weight,
                                    double gamma) {
  if (n < 2) throw ValidationError("gamma: n must be at least 2");
  if (k < 2) throw ValidationError("gamma: K must be at least 2");
  if (!(gamma > 0.0) || !(gamma < max_weight)) {
    throw ValidationError("gamma: need 0 < gamma < M");
  }
  Matrix w(n, n, 0.0);
  w(0, 0) = gamma;
  for (std::size_t v = 1; v < n; ++v) {
    w(0, v) = max_weight;
    w(v, 0) = max_weight;
  }
  return FcmsGraph(std::vector<Matrix>(k - 1, w));
}

struct SampledInstance {
  FcmsGraph graph;
  std::uint64_t seed = 0;   // seed that produced the accepted graph
  std::uint64_t tries = 0;  // graphs drawn, including the accepted one
};

// Draw uniform graphs until the minimum-cost solution has envy above 2M.
// Attempt t uses `seed` itself for t = 0 and derive_seed(seed, t) after.
inline SampledInstance gen_rejection_sampled(std::size_t n, std::size_t k, std::int64_t wmin,
                                             std::int64_t wmax, std::uint64_t seed,
                                             std::uint64_t max_tries = 10'000) {
  for (std::uint64_t t = 0; t < max_tries; ++t) {
    const std::uint64_t s = t == 0 ? seed : derive_seed(seed, t);
    FcmsGraph g = gen_uniform(n, k, wmin, wmax, s);
    if (envy(g, seq_hungarian(g)) > 2.0 * g.max_weight()) {
      return {std::move(g), s, t + 1};
    }
  }
  throw RejectionExhausted(max_tries);
}

struct InstanceSpec {
  Family family = Family::uniform;
  std::size_t n = 2;
  std::size_t k = 2;
  std::int64_t wmin = 1;
  std::int64_t wmax = 30;
  double max_weight = 10.0;  // M for the adversarial families
  double delta = 1.0;
  double gamma = 0.01;
  std::uint64_t seed = 0;
};

inline FcmsGraph generate(const InstanceSpec& spec) {
  switch (spec.family) {
    case Family::uniform: return gen_uniform(spec.n, spec.k, spec.wmin, spec.wmax, spec.seed);
    case Family::unfair_chain: return gen_unfair_chain(spec.k, spec.max_weight, spec.delta);
    case Family::tight_2m: return gen_tight_2m(spec.max_weight);
    case Family::gamma: return gen_gamma_instance(spec.n, spec.k, spec.max_weight, spec.gamma);
  }
  throw ValidationError("unknown family");
}

// ---------------------------------------------------------------------------
// Instance files (.fcms.json).

inline constexpr int kInstanceFormatVersion = 1;

namespace detail {

inline nlohmann::json weight_to_json(double w) {
  // Integral weights as JSON integers; the rest with round-trip precision.
  if (std::abs(w) < 9007199254740992.0 && std::floor(w) == w) {
    return static_cast<std::int64_t>(w);
  }
  return w;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const FcmsGraph& graph) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Matrix& w : graph.layers()) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < w.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (double x : w.row(r)) row.push_back(detail::weight_to_json(x));
      rows.push_back(std::move(row));
    }
    layers.push_back(std::move(rows));
  }
  return {{"format_version", kInstanceFormatVersion},
          {"num_stages", graph.num_stages()},
          {"stage_sizes", graph.stage_sizes()},
          {"layers", std::move(layers)}};
}

inline FcmsGraph instance_from_json(const nlohmann::json& doc) {
  auto fail = [](const std::string& where, const std::string& what) -> void {
    throw ParseError(where + ": " + what);
  };
  if (!doc.is_object()) fail("document", "expected a JSON object");
  for (const char* key : {"format_version", "num_stages", "stage_sizes", "layers"}) {
    if (!doc.contains(key)) fail(key, "missing field");
  }
  if (!doc["format_version"].is_number_integer() ||
      doc["format_version"].get<int>() != kInstanceFormatVersion) {
    fail("format_version", "unsupported version");
  }
  auto positive_int = [](const nlohmann::json& v) {
    return v.is_number_integer() && v.get<std::int64_t>() > 0;
  };
  if (!positive_int(doc["num_stages"])) fail("num_stages", "expected a positive integer");
  const auto k = doc["num_stages"].get<std::size_t>();
  const auto& sizes = doc["stage_sizes"];
  if (!sizes.is_array()) fail("stage_sizes", "expected an array");
  if (sizes.size() != k) {
    fail("stage_sizes", "has " + std::to_string(sizes.size()) + " entries but num_stages is " +
                            std::to_string(k));
  }
  std::vector<std::size_t> stage_sizes;
  for (std::size_t j = 0; j < k; ++j) {
    if (!positive_int(sizes[j])) {
      fail("stage_sizes[" + std::to_string(j) + "]", "expected a positive integer");
    }
    stage_sizes.push_back(sizes[j].get<std::size_t>());
  }
  if (k < 2) fail("num_stages", "need at least 2 stages");
  const auto& layers = doc["layers"];
  if (!layers.is_array() || layers.size() != k - 1) {
    fail("layers", "expected " + std::to_string(k - 1) + " weight matrices");
  }
  std::vector<Matrix> matrices;
  matrices.reserve(k - 1);
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const std::string where = "layers[" + std::to_string(j) + "]";
    const auto& rows = layers[j];
    if (!rows.is_array() || rows.size() != stage_sizes[j]) {
      fail(where, "expected " + std::to_string(stage_sizes[j]) + " rows to match stage_sizes");
    }
    Matrix w(stage_sizes[j], stage_sizes[j + 1]);
    for (std::size_t r = 0; r < stage_sizes[j]; ++r) {
      const auto& row = rows[r];
      const std::string rw = where + "[" + std::to_string(r) + "]";
      if (!row.is_array() || row.size() != stage_sizes[j + 1]) {
        fail(rw, "expected " + std::to_string(stage_sizes[j + 1]) +
                     " columns to match stage_sizes");
      }
      for (std::size_t c = 0; c < stage_sizes[j + 1]; ++c) {
        if (!row[c].is_number()) fail(rw + "[" + std::to_string(c) + "]", "expected a number");
        const double x = row[c].get<double>();
        if (!(x >= 0.0) || !std::isfinite(x)) {
          throw ValidationError(rw + "[" + std::to_string(c) +
                                "]: weight must be finite and non-negative");
        }
        w(r, c) = x;
      }
    }
    matrices.push_back(std::move(w));
  }
  return FcmsGraph(std::move(matrices));
}

inline void write_instance(const FcmsGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << instance_to_json(graph).dump(1) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline FcmsGraph read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return instance_from_json(doc);
}

}  // namespace fairstage
