// Per-server transcoding capacity ledger.
//
// Every active transcode holds its load p_l at the server that runs it until
// its release time. load(j) is the sum over transcodes hosted at j, whichever
// server the request is homed at.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "edgevid/model.hpp"

namespace edgevid {

struct ActiveTranscode {
  std::int64_t request_id = 0;
  int server = 0;
  ProcUnits load = 0;
  double release_time = 0.0;
};

class ProcessingLedger {
 public:
  ProcessingLedger() = default;
  /// `capacities[j-1]` = P_j.
  explicit ProcessingLedger(std::vector<ProcUnits> capacities);

  int num_servers() const { return static_cast<int>(capacity_.size()); }
  ProcUnits capacity(int server) const { return capacity_.at(slot(server)); }

  /// U_j: total load of transcodes hosted at `server`.
  ProcUnits load(int server) const { return load_.at(slot(server)); }

  /// Q = P_server - load(server) - p. Negative means `p` does not fit.
  ProcUnits headroom(int server, ProcUnits p) const { return capacity(server) - load(server) - p; }

  /// Records a transcode of load `p` at `server`. Returns false, without
  /// mutation, when it would exceed P_server. Throws std::logic_error when
  /// `request_id` is already active.
  bool admit(int server, std::int64_t request_id, ProcUnits p, double release_time);

  /// Frees the load held by `request_id`. Returns false if it is not active.
  bool release(std::int64_t request_id);

  /// Drops every active transcode.
  void clear();

  bool active(std::int64_t request_id) const { return active_.contains(request_id); }
  std::optional<ActiveTranscode> find(std::int64_t request_id) const;
  std::size_t active_count() const { return active_.size(); }

  /// load(server) recomputed from the active set, for cross-checking the
  /// incrementally maintained total.
  ProcUnits recount_load(int server) const;

 private:
  std::size_t slot(int server) const;

  std::vector<ProcUnits> capacity_;
  std::vector<ProcUnits> load_;
  std::unordered_map<std::int64_t, ActiveTranscode> active_;
};

/// Time integral of load(j)/P_j, sampled piecewise-constantly between events.
class UtilizationAccumulator {
 public:
  UtilizationAccumulator() = default;
  explicit UtilizationAccumulator(int num_servers) : area_(static_cast<std::size_t>(num_servers), 0.0) {}

  /// Integrates the current ledger loads over [last, now]. `now` must not
  /// decrease between calls.
  void advance(double now, const ProcessingLedger& ledger);

  double last_time() const { return last_; }
  /// Integral of load(j)/P_j dt; 0 for servers with P_j = 0.
  double area(int server) const { return area_.at(static_cast<std::size_t>(server - 1)); }
  int num_servers() const { return static_cast<int>(area_.size()); }

 private:
  std::vector<double> area_;
  double last_ = 0.0;
};

}  // namespace edgevid
