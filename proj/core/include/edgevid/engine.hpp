// Discrete-event simulation of one policy over one seeded workload.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "edgevid/model.hpp"
#include "edgevid/policy.hpp"
#include "edgevid/processing.hpp"
#include "edgevid/workload.hpp"

namespace edgevid {

/// Everything needed for one deterministic run.
struct RunConfig {
  PolicyKind policy = PolicyKind::jccp;
  std::uint64_t seed = 1;
  Catalog catalog = default_catalog();
  /// Defaults to CostParams::matching_bitrate(catalog).
  std::optional<CostParams> cost;
  WorkloadParams workload;
  Bytes cache_capacity = 0;   // M_j, bytes, every server
  ProcUnits proc_capacity = 0;  // P_j, every server
  int warmup_requests = 0;
  JccpOptions jccp;
  /// Check cache and processing invariants after every event.
  bool check_invariants = true;
  bool record_log = false;
  /// Fixture overrides; generated from `seed` when absent.
  std::optional<std::vector<Request>> trace;
  std::optional<Topology> topology;

  int num_servers() const { return workload.num_servers(); }
};

struct MetricsReport {
  std::int64_t requests = 0;  // requests counted (after warm-up)
  std::int64_t hits = 0;      // served without the origin
  double hit_ratio = 0.0;
  Micros total_delay = 0;
  double avg_access_delay_ms = 0.0;
  Bytes external_traffic_bytes = 0;  // pulled from the origin
  Bytes internal_traffic_bytes = 0;  // carried between edge servers
  Cost total_backhaul_cost = 0;
  std::array<std::int64_t, kDecisionKinds> decision_counts{};
  std::vector<double> processing_utilization;  // per server
  double mean_processing_utilization = 0.0;
  double horizon_s = 0.0;

  double external_traffic_tb() const { return static_cast<double>(external_traffic_bytes) / 1e12; }
  std::int64_t count(DecisionKind k) const { return decision_counts[static_cast<std::size_t>(k)]; }
  bool operator==(const MetricsReport&) const = default;
};

struct DecisionRecord {
  std::int64_t request_id = 0;
  double time = 0.0;
  int server = 0;
  VariantId variant;
  ServingDecision decision;
  int transcode_site = 0;  // 0 when nothing is transcoded
  Cost cost = 0;
  Micros delay = 0;
  Bytes origin_bytes = 0;

  bool operator==(const DecisionRecord&) const = default;
};

struct RunResult {
  MetricsReport metrics;
  Topology topology;
  std::vector<DecisionRecord> log;  // counted requests only, arrival order
  std::uint64_t solver_nodes = 0;   // offline policy only
};

/// A cache or processing invariant failed mid-run.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunResult run(const RunConfig& config);

/// Per-server time-averaged load(j)/P_j over [0, horizon]; 0 where P_j = 0.
std::vector<double> compute_utilization(const UtilizationAccumulator& acc, double horizon);

}  // namespace edgevid
