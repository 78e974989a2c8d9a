#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "fairstage/instances.hpp"
#include "fairstage/runner.hpp"

namespace fairstage {

enum class SweepAxis { agents, stages };

struct SweepPlan {
  SweepAxis axis = SweepAxis::agents;
  // K when sweeping agents, n when sweeping stages.
  std::size_t fixed = 40;
  std::vector<std::size_t> values;
  std::size_t instances_per_point = 500;
  std::vector<Algorithm> algorithms = {Algorithm::min_cost, Algorithm::dc_balance,
                                       Algorithm::edc_balance};
  double alpha = 0.01;
  std::int64_t wmin = 1;
  std::int64_t wmax = 30;
  std::uint64_t base_seed = 0;
  std::uint64_t max_tries = 10'000;
  std::size_t threads = 1;
  EnumerationBudget budget;

  // Agents 2..20 step 2 at K = 40, or stages 20..80 step 5 at n = 10.
  static SweepPlan standard(SweepAxis axis) {
    SweepPlan p;
    p.axis = axis;
    if (axis == SweepAxis::agents) {
      p.fixed = 40;
      for (std::size_t n = 2; n <= 20; n += 2) p.values.push_back(n);
    } else {
      p.fixed = 10;
      for (std::size_t k = 20; k <= 80; k += 5) p.values.push_back(k);
    }
    return p;
  }

  std::size_t agents_at(std::size_t point) const {
    return axis == SweepAxis::agents ? values[point] : fixed;
  }
  std::size_t stages_at(std::size_t point) const {
    return axis == SweepAxis::stages ? values[point] : fixed;
  }

  void validate() const {
    if (values.empty()) throw ValidationError("sweep: no axis values");
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] <= values[i - 1]) throw ValidationError("sweep: axis values must increase");
    }
    if (instances_per_point < 1) throw ValidationError("sweep: need at least one instance");
    if (algorithms.empty()) throw ValidationError("sweep: no algorithms selected");
    if (!(alpha > 0.0)) throw ValidationError("sweep: alpha must be positive");
    if (wmin < 0 || wmin > wmax) throw ValidationError("sweep: need 0 <= wmin <= wmax");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (agents_at(i) < 1 || stages_at(i) < 2) {
        throw ValidationError("sweep: need n >= 1 and K >= 2 at every point");
      }
    }
  }
};

// Seed of instance `index` at the point with n agents and K stages.
inline std::uint64_t sweep_instance_seed(std::uint64_t base, std::size_t n, std::size_t k,
                                         std::size_t index) {
  return derive_seed(derive_seed(base, (static_cast<std::uint64_t>(n) << 32) | k), index);
}

struct PointSummary {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string algorithm;
  std::size_t count = 0;
  std::size_t errors = 0;
  double mean_envy_ratio = 0.0, std_envy_ratio = 0.0;
  double mean_cof = 0.0, std_cof = 0.0;
  double mean_swaps = 0.0, std_swaps = 0.0;
  double mean_bound_swaps = 0.0;
  double mean_time_s = 0.0, std_time_s = 0.0;
};

struct SweepResult {
  std::vector<MetricsRow> rows;
  std::vector<PointSummary> summary;
};

namespace detail {

struct MeanStd {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  // Sample standard deviation.
  double stddev() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double var = (sum_sq - static_cast<double>(count) * m * m) / static_cast<double>(count - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
};

inline std::vector<MetricsRow> run_sweep_instance(const SweepPlan& plan, std::size_t n,
                                                  std::size_t k, std::size_t index) {
  std::vector<MetricsRow> rows;
  const std::uint64_t seed = sweep_instance_seed(plan.base_seed, n, k, index);
  auto failed_row = [&](const std::string& name, std::uint64_t s, const std::string& what) {
    MetricsRow row;
    row.algorithm = name;
    row.n = n;
    row.k = k;
    row.seed = s;
    row.error = what;
    return row;
  };
  SampledInstance inst;
  try {
    inst = gen_rejection_sampled(n, k, plan.wmin, plan.wmax, seed, plan.max_tries);
  } catch (const std::exception& e) {
    for (Algorithm a : plan.algorithms) rows.push_back(failed_row(to_string(a), seed, e.what()));
    return rows;
  }
  RunOptions options;
  options.fairness.alpha = plan.alpha;
  options.budget = plan.budget;
  for (Algorithm a : plan.algorithms) {
    try {
      const RunResult r = run_algorithm(inst.graph, n, a, options);
      rows.push_back(make_metrics_row(inst.graph, n, inst.seed, r, plan.alpha));
    } catch (const std::exception& e) {
      MetricsRow row = failed_row(to_string(a), inst.seed, e.what());
      row.max_weight = inst.graph.max_weight();
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace detail

inline std::vector<PointSummary> summarize(const std::vector<MetricsRow>& rows) {
  struct Acc {
    detail::MeanStd envy_ratio, cof, swaps, bound, time;
    std::size_t errors = 0;
  };
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> order;
  std::map<std::tuple<std::size_t, std::size_t, std::string>, Acc> acc;
  for (const MetricsRow& row : rows) {
    const auto key = std::make_tuple(row.n, row.k, row.algorithm);
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    if (!row.error.empty()) {
      ++a.errors;
      continue;
    }
    a.envy_ratio.add(row.envy_ratio);
    a.cof.add(row.cof);
    a.swaps.add(static_cast<double>(row.swap_count));
    if (row.bound_swaps) a.bound.add(static_cast<double>(*row.bound_swaps));
    a.time.add(row.wall_time_s);
  }
  std::vector<PointSummary> out;
  for (const auto& key : order) {
    const Acc& a = acc[key];
    PointSummary s;
    std::tie(s.n, s.k, s.algorithm) = key;
    s.count = a.envy_ratio.count;
    s.errors = a.errors;
    s.mean_envy_ratio = a.envy_ratio.mean();
    s.std_envy_ratio = a.envy_ratio.stddev();
    s.mean_cof = a.cof.mean();
    s.std_cof = a.cof.stddev();
    s.mean_swaps = a.swaps.mean();
    s.std_swaps = a.swaps.stddev();
    s.mean_bound_swaps = a.bound.mean();
    s.mean_time_s = a.time.mean();
    s.std_time_s = a.time.stddev();
    out.push_back(s);
  }
  return out;
}

// Generates instances_per_point rejection-sampled instances per axis point
// and runs every selected algorithm on each. Rows come back ordered by
// (point, instance, algorithm) whatever the worker count.
inline SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  const std::size_t per_point = plan.instances_per_point;
  const std::size_t tasks = plan.values.size() * per_point;
  std::vector<std::vector<MetricsRow>> results(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t point = t / per_point;
      results[t] = detail::run_sweep_instance(plan, plan.agents_at(point), plan.stages_at(point),
                                              t % per_point);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(plan.threads, tasks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  for (auto& rows : results) {
    for (auto& row : rows) out.rows.push_back(std::move(row));
  }
  out.summary = summarize(out.rows);
  return out;
}

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRow& row : rows) write_metrics_row(out, row);
}

inline constexpr const char* kSummaryCsvHeader =
    "n,K,algorithm,count,errors,mean_envy_ratio,std_envy_ratio,mean_cof,std_cof,mean_swaps,"
    "std_swaps,mean_bound_swaps,mean_time_s,std_time_s";

inline void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& summary) {
  out << kSummaryCsvHeader << '\n';
  for (const PointSummary& s : summary) {
    char time_buf[64];
    std::snprintf(time_buf, sizeof time_buf, "%.6f,%.6f", s.mean_time_s, s.std_time_s);
    out << s.n << ',' << s.k << ',' << s.algorithm << ',' << s.count << ',' << s.errors << ','
        << detail::csv_number(s.mean_envy_ratio) << ',' << detail::csv_number(s.std_envy_ratio)
        << ',' << detail::csv_number(s.mean_cof) << ',' << detail::csv_number(s.std_cof) << ','
        << detail::csv_number(s.mean_swaps) << ',' << detail::csv_number(s.std_swaps) << ','
        << detail::csv_number(s.mean_bound_swaps) << ',' << time_buf << '\n';
  }
}

// Companion path for the per-point aggregate: "runs.csv" -> "runs.summary.csv".
inline std::string summary_path_for(const std::string& csv_path) {
  const std::string ext = ".csv";
  if (csv_path.size() > ext.size() &&
      csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0) {
    return csv_path.substr(0, csv_path.size() - ext.size()) + ".summary.csv";
  }
  return csv_path + ".summary.csv";
}

inline void write_sweep(const SweepResult& result, const std::string& csv_path) {
  {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open '" + csv_path + "' for writing");
    write_metrics_csv(out, result.rows);
    if (!out) throw IoError("failed writing '" + csv_path + "'");
  }
  const std::string summary_path = summary_path_for(csv_path);
  std::ofstream out(summary_path);
  if (!out) throw IoError("cannot open '" + summary_path + "' for writing");
  write_summary_csv(out, result.summary);
  if (!out) throw IoError("failed writing '" + summary_path + "'");
}

}  // namespace fairstage
