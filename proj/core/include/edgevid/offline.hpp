// Exact offline request scheduling over the currently active requests.
//
// Given a fixed cache placement, every active request picks one serving
// option; transcoding options consume p_l at their host server, whose total
// may not exceed P_j. The objective is the summed backhaul cost. Two solvers
// are provided: an exhaustive enumerator (validation oracle, small instances
// only) and a depth-first branch and bound that scales to a full simulation.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "edgevid/model.hpp"

namespace edgevid {

struct SystemState;

/// Cache membership of every server at one instant, restricted to the titles
/// an instance cares about. Levels are kept as a bitmask per (title, server).
class CacheSnapshot {
 public:
  explicit CacheSnapshot(int num_servers = 0) : num_servers_(num_servers) {}

  int num_servers() const { return num_servers_; }

  void add(int server, const VariantId& v);
  bool holds(int server, const VariantId& v) const;
  /// Smallest cached level above v.level at `server`, or nullopt.
  std::optional<int> closest_transcodable(int server, const VariantId& v) const;

  /// All (server, variant) pairs, sorted by server, title, level.
  std::vector<std::pair<int, VariantId>> entries() const;

 private:
  std::uint64_t mask(int server, int video) const;

  int num_servers_;
  std::unordered_map<int, std::vector<std::uint64_t>> levels_;  // title -> mask per server
};

struct SchedulingInstance {
  std::vector<Request> requests;
  CacheSnapshot snapshot;
  Topology topology;
  std::vector<ProcUnits> capacities;  // P_j at [j-1]
  std::vector<Bytes> sizes;           // r_l at [l-1]
  std::vector<ProcUnits> loads;       // p_l at [l-1]

  int num_servers() const { return topology.num_servers(); }
  int num_levels() const { return static_cast<int>(sizes.size()); }
  Bytes size(int level) const { return sizes.at(static_cast<std::size_t>(level - 1)); }
  ProcUnits load(int level) const { return loads.at(static_cast<std::size_t>(level - 1)); }
  ProcUnits capacity(int server) const { return capacities.at(static_cast<std::size_t>(server - 1)); }

  /// Checks dimensions and request validity. Throws DomainError.
  void validate() const;
};

/// Instance over `requests` with the caches, topology and full capacities of
/// `state`. Only the titles requested are captured in the snapshot.
SchedulingInstance make_instance(std::vector<Request> requests, const SystemState& state);

struct SchedulingOption {
  ServingDecision decision;
  Cost cost = 0;
  int site = 0;        // transcode host, 0 when no processing is used
  ProcUnits load = 0;  // p_l at `site`
};

/// Every option the snapshot permits for `request`, in a fixed order:
/// local hit, local transcode, then per neighbor k ascending (fetch,
/// transcode at k, transcode at home), then origin (always present).
std::vector<SchedulingOption> enumerate_options(const Request& request, const SchedulingInstance& instance);

struct Schedule {
  std::vector<std::size_t> choice;          // option index per request
  std::vector<ServingDecision> decisions;   // aligned with instance.requests
  Cost objective = 0;
};

/// The exhaustive solver refused an instance above its size guard.
class SolverRefusal : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// No assignment satisfies the processing capacities.
class InfeasibleSchedule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kExhaustiveGuard = 10'000'000;

/// Enumerates the Cartesian product of per-request options and returns the
/// first (lexicographic in option index) minimum-cost feasible schedule.
Schedule solve_exhaustive(const SchedulingInstance& instance, std::uint64_t max_combinations = kExhaustiveGuard);

struct BnbStats {
  std::uint64_t nodes = 0;
  std::size_t branching_requests = 0;  // requests left after dominance reduction
  Cost root_bound = 0;
};

/// Exact branch and bound. `hint`, when given, is a per-request decision
/// (nullopt entries allowed) used to seed the incumbent if it is feasible.
Schedule solve_bnb(const SchedulingInstance& instance, BnbStats* stats = nullptr,
                   const std::vector<std::optional<ServingDecision>>* hint = nullptr);

/// Lower bound the branch and bound uses at its root node.
Cost root_lower_bound(const SchedulingInstance& instance);

/// Sum of option costs for the given per-request choices.
Cost schedule_cost(const SchedulingInstance& instance, const std::vector<std::size_t>& choice);

/// Processing load each server carries under `choice`.
std::vector<ProcUnits> schedule_loads(const SchedulingInstance& instance, const std::vector<std::size_t>& choice);

/// True iff `schedule` picks one valid option per request and respects every
/// P_j, and its stated objective matches its choices.
bool schedule_feasible(const SchedulingInstance& instance, const Schedule& schedule);

}  // namespace edgevid
