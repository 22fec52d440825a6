// Online request-scheduling policies and the shared post-decision update.
#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "edgevid/cache.hpp"
#include "edgevid/model.hpp"
#include "edgevid/processing.hpp"

namespace edgevid {

enum class PolicyKind { jccp, cachepro, cocache, offline };

std::string_view to_string(PolicyKind p);
std::optional<PolicyKind> parse_policy(std::string_view name);
/// Comma-separated list of accepted policy names, for error messages.
std::string_view policy_names();

struct JccpOptions {
  /// Also consider transcoding the neighbor's higher variant at the home
  /// server (the w-path) when picking the transcode location.
  bool home_transcode = true;
};

/// Everything a scheduler may read and apply_decision may mutate.
struct SystemState {
  Catalog catalog;
  CostParams params;
  Topology topology;
  std::vector<LruCache> caches;  // caches[j-1] belongs to server j
  ProcessingLedger ledger;

  /// Empty caches of `cache_capacity` bytes and an empty ledger with
  /// `proc_capacity` units at every server.
  SystemState(Catalog catalog, CostParams params, Topology topology, Bytes cache_capacity,
              ProcUnits proc_capacity);

  int num_servers() const { return topology.num_servers(); }
  LruCache& cache(int server) { return caches.at(static_cast<std::size_t>(server - 1)); }
  const LruCache& cache(int server) const { return caches.at(static_cast<std::size_t>(server - 1)); }

  ProcUnits transcode_load(int level) const { return transcode_cost(catalog, params, level); }
};

ServingDecision schedule_jccp(const Request& request, const SystemState& state,
                              const JccpOptions& options = {});
/// Local caching and transcoding only; never looks at neighbor caches.
ServingDecision schedule_cachepro(const Request& request, const SystemState& state);
/// Collaborative caching without transcoding.
ServingDecision schedule_cocache(const Request& request, const SystemState& state);

struct AppliedOutcome {
  Cost cost = 0;
  Micros delay = 0;
  Bytes origin_bytes = 0;
  Bytes internal_bytes = 0;
  InsertStatus home_insert = InsertStatus::inserted;
  std::vector<VariantId> evicted;
};

/// Thrown when state bookkeeping contradicts what a scheduler verified.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Commits `decision` for `request`:
///   * admits p_l at the transcode site (released at departure);
///   * touches the cache entry actually read;
///   * inserts the requested variant into the home cache (LRU);
/// and returns the realized cost, delay and traffic.
AppliedOutcome apply_decision(const Request& request, const ServingDecision& decision,
                              SystemState& state);

/// Cache-side part of apply_decision (touch + home insert), without
/// processing admission. The offline policy manages admission itself.
AppliedOutcome apply_cache_update(const Request& request, const ServingDecision& decision,
                                  SystemState& state);

}  // namespace edgevid
