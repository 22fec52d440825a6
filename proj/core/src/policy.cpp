#include "edgevid/policy.hpp"

#include <array>
#include <string>
#include <tuple>

namespace edgevid {

namespace {

constexpr std::array<std::string_view, 4> kPolicyNames = {"jccp", "cachepro", "cocache", "offline"};

std::optional<ServingDecision> local_branches(const Request& request, const SystemState& state,
                                              bool allow_transcode) {
  const int j = request.home;
  const VariantId& v = request.variant;
  const LruCache& home = state.cache(j);
  if (home.contains(v)) return ServingDecision::local_hit(j);
  if (allow_transcode) {
    if (auto h = home.closest_transcodable(v, state.catalog.num_levels())) {
      if (state.ledger.headroom(j, state.transcode_load(v.level)) >= 0)
        return ServingDecision::local_transcode(j, *h);
    }
  }
  return std::nullopt;
}

// Exact variant at the cheapest neighbor; ties go to the lower index.
std::optional<ServingDecision> neighbor_fetch_branch(const Request& request, const SystemState& state) {
  const int j = request.home;
  int best = 0;
  Micros best_delay = 0;
  for (int k = 1; k <= state.num_servers(); ++k) {
    if (k == j || !state.cache(k).contains(request.variant)) continue;
    const Micros d = state.topology.delay_us(j, k);
    if (best == 0 || d < best_delay) {
      best = k;
      best_delay = d;
    }
  }
  if (best == 0) return std::nullopt;
  return ServingDecision::neighbor_fetch(best);
}

}  // namespace

std::string_view to_string(PolicyKind p) { return kPolicyNames[static_cast<std::size_t>(p)]; }

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (std::size_t i = 0; i < kPolicyNames.size(); ++i)
    if (kPolicyNames[i] == name) return static_cast<PolicyKind>(i);
  return std::nullopt;
}

std::string_view policy_names() { return "jccp, cachepro, cocache, offline"; }

SystemState::SystemState(Catalog catalog_in, CostParams params_in, Topology topology_in,
                         Bytes cache_capacity, ProcUnits proc_capacity)
    : catalog(std::move(catalog_in)),
      params(params_in),
      topology(std::move(topology_in)),
      caches(static_cast<std::size_t>(topology.num_servers()), LruCache(cache_capacity)),
      ledger(std::vector<ProcUnits>(static_cast<std::size_t>(topology.num_servers()), proc_capacity)) {}

ServingDecision schedule_jccp(const Request& request, const SystemState& state, const JccpOptions& options) {
  if (auto local = local_branches(request, state, true)) return *local;
  if (auto fetch = neighbor_fetch_branch(request, state)) return *fetch;

  const int j = request.home;
  const VariantId& v = request.variant;
  const ProcUnits p = state.transcode_load(v.level);
  const int levels = state.catalog.num_levels();

  // Candidates are (holder k, transcode site). Ranked by headroom, then
  // transcode-at-source, then cheaper path, then lower index.
  struct Candidate {
    ProcUnits headroom;
    bool at_source;
    Micros delay;
    int source;
    int from_level;
  };
  std::optional<Candidate> best;
  auto better = [](const Candidate& a, const Candidate& b) {
    return std::tuple(-a.headroom, !a.at_source, a.delay, a.source) <
           std::tuple(-b.headroom, !b.at_source, b.delay, b.source);
  };
  auto offer = [&](const Candidate& c) {
    if (c.headroom < 0) return;
    if (!best || better(c, *best)) best = c;
  };

  const ProcUnits home_headroom = state.ledger.headroom(j, p);
  for (int k = 1; k <= state.num_servers(); ++k) {
    if (k == j) continue;
    auto h = state.cache(k).closest_transcodable(v, levels);
    if (!h) continue;
    const Micros d = state.topology.delay_us(j, k);
    offer(Candidate{state.ledger.headroom(k, p), true, d, k, *h});
    if (options.home_transcode) offer(Candidate{home_headroom, false, d, k, *h});
  }
  if (best) {
    return best->at_source ? ServingDecision::neighbor_transcode_at_source(best->source, best->from_level)
                           : ServingDecision::neighbor_transcode_at_home(best->source, best->from_level);
  }
  return ServingDecision::origin_fetch();
}

ServingDecision schedule_cachepro(const Request& request, const SystemState& state) {
  if (auto local = local_branches(request, state, true)) return *local;
  return ServingDecision::origin_fetch();
}

ServingDecision schedule_cocache(const Request& request, const SystemState& state) {
  if (auto local = local_branches(request, state, false)) return *local;
  if (auto fetch = neighbor_fetch_branch(request, state)) return *fetch;
  return ServingDecision::origin_fetch();
}

AppliedOutcome apply_cache_update(const Request& request, const ServingDecision& decision, SystemState& state) {
  const VariantId& v = request.variant;
  AppliedOutcome out;

  if (decision.kind != DecisionKind::origin_fetch) {
    const VariantId read = decision.is_transcode() ? VariantId{v.video, decision.from_level} : v;
    if (!state.cache(decision.source).touch(read))
      throw ConsistencyError("decision reads " + std::to_string(read.video) + "/" +
                             std::to_string(read.level) + " which server " +
                             std::to_string(decision.source) + " does not hold");
  }

  InsertResult ins = state.cache(request.home).insert_lru(v, state.catalog.variant_size(v.level));
  out.home_insert = ins.status;
  out.evicted = std::move(ins.evicted);

  out.cost = decision_cost(decision, request, state.catalog, state.topology);
  out.delay = access_delay(decision, request, state.topology);
  out.origin_bytes = decision.kind == DecisionKind::origin_fetch ? state.catalog.variant_size(v.level) : 0;
  out.internal_bytes = internal_bytes(decision, request, state.catalog);
  return out;
}

AppliedOutcome apply_decision(const Request& request, const ServingDecision& decision, SystemState& state) {
  if (auto site = decision.transcode_site(request.home)) {
    const ProcUnits p = state.transcode_load(request.variant.level);
    if (!state.ledger.admit(*site, request.id, p, request.departure_time()))
      throw ConsistencyError("transcode admission failed at server " + std::to_string(*site) +
                             " for request " + std::to_string(request.id));
  }
  return apply_cache_update(request, decision, state);
}

}  // namespace edgevid
