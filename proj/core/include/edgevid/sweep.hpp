// Parameter sweeps over (policy, axis value, seed) and their CSV form.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "edgevid/config.hpp"

namespace edgevid {

struct SweepRow {
  PolicyKind policy = PolicyKind::jccp;
  std::uint64_t seed = 0;
  std::optional<double> axis_value;
  double cache_fraction = 0.0;  // M_j over the library size
  ProcUnits proc_units = 0;
  double lambda = 0.0;          // mean arrival rate, requests/minute
  double zipf_alpha = 0.0;
  bool ok = false;
  std::string error;            // set when !ok
  MetricsReport metrics;
  std::optional<double> runtime_ms;
};

struct Summary {
  int n = 0;
  double mean = 0.0;
  std::optional<double> ci95;  // Student-t half-width; absent below two samples
};

struct AggregateRow {
  PolicyKind policy = PolicyKind::jccp;
  std::optional<double> axis_value;
  int runs = 0;    // rows in the group
  int errors = 0;  // rows excluded from the statistics
  Summary hit_ratio;
  Summary avg_delay_ms;
  Summary external_traffic_tb;
  Summary backhaul_cost;  // byte*ms
  Summary proc_util;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::none;
  std::vector<SweepRow> rows;
  std::vector<AggregateRow> aggregates;

  int error_count() const;
};

/// Sweep points in output order: policies in config order, then axis
/// values, then seeds.
struct SweepPoint {
  PolicyKind policy;
  std::optional<double> axis_value;
  std::uint64_t seed;
};
std::vector<SweepPoint> sweep_points(const ExperimentConfig& config);

using SweepProgress = std::function<void(const SweepRow&, std::size_t done, std::size_t total)>;

/// Runs every point on a pool of `config.workers` threads (0 = hardware
/// concurrency). Engine failures mark the row and do not stop the sweep.
/// `progress` is called under a lock, in completion order.
SweepResult run_sweep(const ExperimentConfig& config, const SweepProgress& progress = {});

double mean_of(const std::vector<double>& xs);
/// t_{0.975, n-1} * s / sqrt(n); nullopt for n < 2.
std::optional<double> ci95_half_width(const std::vector<double>& xs);

/// Groups rows by (policy, axis value) in first-seen order.
std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows);

/// Data rows, a blank line, then the aggregate block with its own header.
void write_csv(std::ostream& out, const SweepResult& result);

}  // namespace edgevid
