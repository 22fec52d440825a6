#include "edgevid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "edgevid/text_io.hpp"

namespace edgevid {

namespace {

SweepRow run_point(const ExperimentConfig& config, const SweepPoint& p) {
  SweepRow row;
  row.policy = p.policy;
  row.seed = p.seed;
  row.axis_value = p.axis_value;
  try {
    const RunConfig rc = make_run_config(config, p.policy, p.seed, p.axis_value);
    row.cache_fraction =
        static_cast<double>(rc.cache_capacity) / static_cast<double>(rc.catalog.library_size());
    row.proc_units = rc.proc_capacity;
    double sum = 0.0;
    for (double l : rc.workload.arrival_rate_per_min) sum += l;
    row.lambda = sum / static_cast<double>(rc.workload.arrival_rate_per_min.size());
    row.zipf_alpha = rc.workload.zipf_alpha;

    const auto start = std::chrono::steady_clock::now();
    row.metrics = run(rc).metrics;
    const auto elapsed = std::chrono::steady_clock::now() - start;
    if (config.record_runtime) row.runtime_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

Summary summarize(const std::vector<double>& xs) {
  return Summary{static_cast<int>(xs.size()), mean_of(xs), ci95_half_width(xs)};
}

std::string opt_number(const std::optional<double>& x, int decimals) {
  return x ? format_fixed(*x, decimals) : std::string("NA");
}

void write_summary(std::ostream& out, const Summary& s, int decimals) {
  out << ',' << (s.n > 0 ? format_fixed(s.mean, decimals) : "NA") << ',' << opt_number(s.ci95, decimals);
}

}  // namespace

int SweepResult::error_count() const {
  int n = 0;
  for (const auto& r : rows) n += r.ok ? 0 : 1;
  return n;
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config) {
  std::vector<std::optional<double>> values;
  if (config.axis == SweepAxis::none)
    values.emplace_back(std::nullopt);
  else
    values.assign(config.sweep_values.begin(), config.sweep_values.end());

  std::vector<SweepPoint> points;
  points.reserve(config.policies.size() * values.size() * config.seeds.size());
  for (PolicyKind p : config.policies)
    for (const auto& v : values)
      for (std::uint64_t s : config.seeds) points.push_back(SweepPoint{p, v, s});
  return points;
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepProgress& progress) {
  config.validate();
  const std::vector<SweepPoint> points = sweep_points(config);

  SweepResult result;
  result.axis = config.axis;
  result.rows.resize(points.size());

  std::size_t workers = config.workers > 0 ? static_cast<std::size_t>(config.workers)
                                           : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(points.size(), 1));

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      SweepRow row = run_point(config, points[i]);
      std::lock_guard lock(mu);
      result.rows[i] = std::move(row);
      ++done;
      if (progress) progress(result.rows[i], done, points.size());
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  result.aggregates = aggregate(result.rows);
  return result;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::optional<double> ci95_half_width(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  return boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
}

std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows) {
  struct Group {
    AggregateRow agg;
    std::vector<double> hit, delay, tb, cost, util;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.agg.policy == r.policy && g.agg.axis_value == r.axis_value;
    });
    if (it == groups.end()) {
      groups.emplace_back();
      it = std::prev(groups.end());
      it->agg.policy = r.policy;
      it->agg.axis_value = r.axis_value;
    }
    ++it->agg.runs;
    if (!r.ok) {
      ++it->agg.errors;
      continue;
    }
    it->hit.push_back(r.metrics.hit_ratio);
    it->delay.push_back(r.metrics.avg_access_delay_ms);
    it->tb.push_back(r.metrics.external_traffic_tb());
    it->cost.push_back(cost_to_byte_ms(r.metrics.total_backhaul_cost));
    it->util.push_back(r.metrics.mean_processing_utilization);
  }
  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (auto& g : groups) {
    g.agg.hit_ratio = summarize(g.hit);
    g.agg.avg_delay_ms = summarize(g.delay);
    g.agg.external_traffic_tb = summarize(g.tb);
    g.agg.backhaul_cost = summarize(g.cost);
    g.agg.proc_util = summarize(g.util);
    out.push_back(g.agg);
  }
  return out;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << "policy,seed,cache_fraction,P_units,lambda,zipf_alpha,hit_ratio,avg_delay_ms,external_traffic_TB,"
         "backhaul_cost,proc_util,runtime_ms,status\n";
  for (const auto& r : result.rows) {
    out << to_string(r.policy) << ',' << r.seed << ',' << format_fixed(r.cache_fraction, 6) << ','
        << r.proc_units << ',' << format_shortest(r.lambda) << ',' << format_shortest(r.zipf_alpha) << ',';
    if (r.ok) {
      out << format_fixed(r.metrics.hit_ratio, 6) << ',' << format_fixed(r.metrics.avg_access_delay_ms, 6) << ','
          << format_fixed(r.metrics.external_traffic_tb(), 9) << ',' << format_milli(r.metrics.total_backhaul_cost)
          << ',' << format_fixed(r.metrics.mean_processing_utilization, 6) << ',' << opt_number(r.runtime_ms, 3)
          << ",ok\n";
    } else {
      out << "NA,NA,NA,NA,NA," << opt_number(r.runtime_ms, 3) << ",error\n";
    }
  }

  out << "\naggregate,policy,axis,axis_value,runs,errors,hit_ratio_mean,hit_ratio_ci95,avg_delay_ms_mean,"
         "avg_delay_ms_ci95,external_traffic_TB_mean,external_traffic_TB_ci95,backhaul_cost_mean,"
         "backhaul_cost_ci95,proc_util_mean,proc_util_ci95\n";
  for (const auto& a : result.aggregates) {
    out << "aggregate," << to_string(a.policy) << ',' << sweep_key(result.axis) << ','
        << (a.axis_value ? format_shortest(*a.axis_value) : std::string("NA")) << ',' << a.runs << ','
        << a.errors;
    write_summary(out, a.hit_ratio, 6);
    write_summary(out, a.avg_delay_ms, 6);
    write_summary(out, a.external_traffic_tb, 9);
    write_summary(out, a.backhaul_cost, 3);
    write_summary(out, a.proc_util, 6);
    out << '\n';
  }
}

}  // namespace edgevid
