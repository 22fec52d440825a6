#include "edgevid/engine.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>

#include "edgevid/offline.hpp"

namespace edgevid {

namespace {

struct Departure {
  double time;
  std::int64_t request_id;

  bool operator>(const Departure& o) const {
    return time != o.time ? time > o.time : request_id > o.request_id;
  }
};

void check_state(const SystemState& state, const char* where) {
  for (int j = 1; j <= state.num_servers(); ++j) {
    const LruCache& c = state.cache(j);
    if (c.used() > c.capacity() || c.recount_used() != c.used())
      throw InvariantViolation(std::string("cache capacity violated at server ") + std::to_string(j) + " after " +
                               where);
    const ProcUnits load = state.ledger.load(j);
    if (load > state.ledger.capacity(j) || load < 0 || state.ledger.recount_load(j) != load)
      throw InvariantViolation(std::string("processing capacity violated at server ") + std::to_string(j) +
                               " after " + where);
  }
}

// In-flight requests known to the offline re-solver, keyed by id so the
// instance order (and hence tie-breaking) is deterministic.
struct ActiveRequest {
  Request request;
  ServingDecision decision;
};

class OfflineScheduler {
 public:
  ServingDecision admit(const Request& r, SystemState& state) {
    active_.emplace(r.id, ActiveRequest{r, ServingDecision::origin_fetch()});

    std::vector<Request> requests;
    std::vector<std::optional<ServingDecision>> hint;
    requests.reserve(active_.size());
    hint.reserve(active_.size());
    std::size_t newcomer = 0;
    for (const auto& [id, a] : active_) {
      if (id == r.id) {
        newcomer = requests.size();
        hint.emplace_back(std::nullopt);
      } else {
        hint.emplace_back(a.decision);
      }
      requests.push_back(a.request);
    }

    const SchedulingInstance inst = make_instance(std::move(requests), state);
    BnbStats stats;
    const Schedule schedule = solve_bnb(inst, &stats, &hint);
    nodes_ += stats.nodes;

    // In-flight requests may be reassigned; the ledger follows the new plan.
    state.ledger.clear();
    std::size_t i = 0;
    for (auto& [id, a] : active_) {
      a.decision = schedule.decisions[i++];
      if (auto site = a.decision.transcode_site(a.request.home)) {
        if (!state.ledger.admit(*site, id, state.transcode_load(a.request.variant.level),
                                a.request.departure_time()))
          throw ConsistencyError("offline schedule exceeds processing capacity at server " +
                                 std::to_string(*site));
      }
    }
    return schedule.decisions[newcomer];
  }

  void depart(std::int64_t id) { active_.erase(id); }
  std::uint64_t nodes() const { return nodes_; }

 private:
  std::map<std::int64_t, ActiveRequest> active_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::vector<double> compute_utilization(const UtilizationAccumulator& acc, double horizon) {
  std::vector<double> out(static_cast<std::size_t>(acc.num_servers()), 0.0);
  if (!(horizon > 0.0)) return out;
  for (int j = 1; j <= acc.num_servers(); ++j) out[static_cast<std::size_t>(j - 1)] = acc.area(j) / horizon;
  return out;
}

RunResult run(const RunConfig& config) {
  const int k = config.num_servers();
  const Catalog& catalog = config.catalog;
  if (config.workload.num_videos != catalog.num_videos() || config.workload.num_levels != catalog.num_levels() ||
      config.workload.video_length_s != catalog.video_length_s())
    throw DomainError("workload parameters disagree with the catalog");
  if (config.cache_capacity < 0 || config.proc_capacity < 0) throw DomainError("capacities must be non-negative");
  if (config.warmup_requests < 0) throw DomainError("warmup_requests must be non-negative");

  RunResult result;
  result.topology = config.topology ? *config.topology : sample_topology(k, config.workload, config.seed);
  if (result.topology.num_servers() != k) throw DomainError("topology server count disagrees with workload");
  const std::vector<Request> trace = config.trace ? *config.trace : generate_trace(config.workload, config.seed);

  SystemState state(catalog, config.cost.value_or(CostParams::matching_bitrate(catalog)), result.topology,
                    config.cache_capacity, config.proc_capacity);
  UtilizationAccumulator util(k);
  OfflineScheduler offline;
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> departures;

  MetricsReport& m = result.metrics;
  double horizon = 0.0;
  double last_arrival = 0.0;

  auto process_departure = [&] {
    const Departure d = departures.top();
    departures.pop();
    util.advance(d.time, state.ledger);
    state.ledger.release(d.request_id);
    if (config.policy == PolicyKind::offline) offline.depart(d.request_id);
    if (config.check_invariants) check_state(state, "departure");
  };

  for (std::size_t n = 0; n < trace.size(); ++n) {
    const Request& r = trace[n];
    if (!result.topology.valid_server(r.home) || !catalog.valid(r.variant))
      throw DomainError("trace request " + std::to_string(r.id) + " is out of range");
    if (r.arrival_time < last_arrival) throw DomainError("trace is not sorted by arrival time");
    last_arrival = r.arrival_time;

    // Departures at the same instant free capacity before the arrival.
    while (!departures.empty() && departures.top().time <= r.arrival_time) process_departure();
    util.advance(r.arrival_time, state.ledger);

    ServingDecision decision;
    AppliedOutcome out;
    switch (config.policy) {
      case PolicyKind::jccp:
        decision = schedule_jccp(r, state, config.jccp);
        break;
      case PolicyKind::cachepro:
        decision = schedule_cachepro(r, state);
        break;
      case PolicyKind::cocache:
        decision = schedule_cocache(r, state);
        break;
      case PolicyKind::offline:
        decision = offline.admit(r, state);
        break;
    }
    validate_decision(decision, r, catalog, result.topology);
    out = config.policy == PolicyKind::offline ? apply_cache_update(r, decision, state)
                                               : apply_decision(r, decision, state);

    if (static_cast<int>(n) >= config.warmup_requests) {
      ++m.requests;
      if (decision.is_hit()) ++m.hits;
      ++m.decision_counts[static_cast<std::size_t>(decision.kind)];
      m.total_delay += out.delay;
      m.external_traffic_bytes += out.origin_bytes;
      m.internal_traffic_bytes += out.internal_bytes;
      m.total_backhaul_cost += out.cost;
      if (config.record_log) {
        result.log.push_back(DecisionRecord{r.id, r.arrival_time, r.home, r.variant, decision,
                                            decision.transcode_site(r.home).value_or(0), out.cost, out.delay,
                                            out.origin_bytes});
      }
    }

    departures.push(Departure{r.departure_time(), r.id});
    horizon = std::max(horizon, r.departure_time());
    if (config.check_invariants) check_state(state, "arrival");
  }
  while (!departures.empty()) process_departure();
  util.advance(horizon, state.ledger);

  std::int64_t total = 0;
  for (auto c : m.decision_counts) total += c;
  if (total != m.requests) throw InvariantViolation("decision counts do not sum to the request count");

  m.hit_ratio = m.requests > 0 ? static_cast<double>(m.hits) / static_cast<double>(m.requests) : 0.0;
  m.avg_access_delay_ms =
      m.requests > 0 ? micros_to_ms(m.total_delay) / static_cast<double>(m.requests) : 0.0;
  m.horizon_s = horizon;
  m.processing_utilization = compute_utilization(util, horizon);
  double sum = 0.0;
  for (double u : m.processing_utilization) sum += u;
  m.mean_processing_utilization = k > 0 ? sum / k : 0.0;
  result.solver_nodes = offline.nodes();
  return result;
}

}  // namespace edgevid
