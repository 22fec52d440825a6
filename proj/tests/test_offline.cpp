#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"

#include "edgevid/instances.hpp"
#include "edgevid/offline.hpp"
#include "edgevid/workload.hpp"

using namespace edgevid;
using fixtures::ms;
using fixtures::request;

namespace {

SchedulingInstance bare_instance(const Topology& t, std::vector<ProcUnits> capacities,
                                 std::vector<Bytes> sizes = {100, 200, 300, 400},
                                 std::vector<ProcUnits> loads = {1, 2, 3, 4}) {
  SchedulingInstance inst;
  inst.topology = t;
  inst.snapshot = CacheSnapshot(t.num_servers());
  inst.capacities = std::move(capacities);
  inst.sizes = std::move(sizes);
  inst.loads = std::move(loads);
  return inst;
}

std::vector<ServingDecision> decisions_of(const std::vector<SchedulingOption>& options) {
  std::vector<ServingDecision> out;
  for (const auto& o : options) out.push_back(o.decision);
  return out;
}

// Requests in order, each taking its cheapest option that still fits.
Cost greedy_objective(const SchedulingInstance& inst) {
  std::vector<ProcUnits> left = inst.capacities;
  Cost total = 0;
  for (const auto& r : inst.requests) {
    auto options = enumerate_options(r, inst);
    std::stable_sort(options.begin(), options.end(),
                     [](const SchedulingOption& a, const SchedulingOption& b) { return a.cost < b.cost; });
    for (const auto& o : options) {
      if (o.site && left[static_cast<std::size_t>(o.site - 1)] < o.load) continue;
      if (o.site) left[static_cast<std::size_t>(o.site - 1)] -= o.load;
      total += o.cost;
      break;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("options: empty snapshot leaves only the origin") {
  auto inst = bare_instance(fixtures::uniform_topology(3, 5, 30, 150), {10, 10, 10});
  inst.requests.push_back(request(0, 1, 1, 2));
  const auto options = enumerate_options(inst.requests[0], inst);
  REQUIRE(options.size() == 1);
  CHECK(options[0].decision == ServingDecision::origin_fetch());
  CHECK(options[0].cost == 200 * ms(150));
  CHECK(options[0].site == 0);
}

TEST_CASE("options: every event the snapshot permits, in fixed order") {
  auto inst = bare_instance(fixtures::uniform_topology(2, 5, 30, 150), {10, 10});
  inst.snapshot.add(1, {1, 2});
  inst.snapshot.add(2, {1, 2});
  inst.snapshot.add(2, {1, 4});
  inst.requests.push_back(request(0, 1, 1, 2));
  const auto options = enumerate_options(inst.requests[0], inst);
  CHECK(decisions_of(options) == std::vector<ServingDecision>{
                                     ServingDecision::local_hit(1), ServingDecision::neighbor_fetch(2),
                                     ServingDecision::neighbor_transcode_at_source(2, 4),
                                     ServingDecision::neighbor_transcode_at_home(2, 4), ServingDecision::origin_fetch()});
  CHECK(options[2].site == 2);
  CHECK(options[2].load == 2);
  CHECK(options[3].site == 1);
  CHECK(options[3].cost == 200 * ms(30));
}

TEST_CASE("options: lower cached levels give nothing") {
  auto inst = bare_instance(fixtures::uniform_topology(1, 5, 30, 150), {10});
  inst.snapshot.add(1, {1, 1});
  inst.requests.push_back(request(0, 1, 1, 3));
  CHECK(decisions_of(enumerate_options(inst.requests[0], inst)) ==
        std::vector<ServingDecision>{ServingDecision::origin_fetch()});
}

TEST_CASE("exhaustive: single request picks the neighbor") {
  auto inst = bare_instance(fixtures::uniform_topology(2, 5, 30, 150), {10, 10}, {100});
  inst.loads = {1};
  inst.snapshot.add(2, {1, 1});
  inst.requests.push_back(request(0, 1, 1, 1));
  const Schedule s = solve_exhaustive(inst);
  CHECK(s.decisions[0] == ServingDecision::neighbor_fetch(2));
  CHECK(cost_to_byte_ms(s.objective) == 3000.0);
  CHECK(cost_to_byte_ms(enumerate_options(inst.requests[0], inst).back().cost) == 15000.0);
}

TEST_CASE("exhaustive: two transcodes compete for one server") {
  // p_3 = 6 and P = 10, so only one of the two can transcode locally.
  auto inst = bare_instance(fixtures::uniform_topology(1, 5, 30, 150), {10}, {100, 200, 300, 400}, {2, 4, 6, 8});
  inst.snapshot.add(1, {1, 4});
  inst.snapshot.add(1, {2, 4});
  inst.requests.push_back(request(0, 1, 1, 3));
  inst.requests.push_back(request(1, 1, 2, 3));

  // The four assignments by hand: both transcode (infeasible), one
  // transcodes and the other goes to the origin (300 * 150 ms), or both
  // go to the origin.
  const Cost origin = 300 * ms(150);
  const Schedule s = solve_exhaustive(inst);
  CHECK(s.objective == origin);
  CHECK(s.decisions[0] == ServingDecision::local_transcode(1, 4));
  CHECK(s.decisions[1] == ServingDecision::origin_fetch());
  CHECK(solve_bnb(inst).objective == origin);
  CHECK(schedule_feasible(inst, s));
}

TEST_CASE("exhaustive: empty instance and the size guard") {
  auto inst = bare_instance(fixtures::uniform_topology(2, 5, 30, 150), {10, 10});
  const Schedule empty = solve_exhaustive(inst);
  CHECK(empty.objective == 0);
  CHECK(empty.decisions.empty());
  CHECK(solve_bnb(inst).objective == 0);

  inst.snapshot.add(2, {1, 1});
  inst.requests.push_back(request(0, 1, 1, 1));
  inst.requests.push_back(request(1, 1, 1, 1));
  CHECK_THROWS_AS(solve_exhaustive(inst, 3), SolverRefusal);
  CHECK_NOTHROW(solve_exhaustive(inst, 4));
}

TEST_CASE("branch and bound: empty caches send everything to the origin") {
  const Topology t = fixtures::make_topology({5, 6}, {{0, 30}, {30, 0}}, {150, 120});
  auto inst = bare_instance(t, {10, 10});
  Cost expected = 0;
  for (int i = 0; i < 12; ++i) {
    const Request r = request(i, 1 + i % 2, i, 1 + i % 4);
    inst.requests.push_back(r);
    expected += inst.size(r.variant.level) * t.origin_us(r.home);
  }
  const Schedule s = solve_bnb(inst);
  CHECK(s.objective == expected);
  for (const auto& d : s.decisions) CHECK(d == ServingDecision::origin_fetch());
}

TEST_CASE("branch and bound beats greedy when two transcodes compete for one slot") {
  // Both requests are homed at 1, which cannot transcode. Server 2 has room
  // for one p = 1 transcode. Request A can also fetch an exact copy from
  // server 3 for a little more; request B can only fall back to the origin.
  const Topology t = fixtures::make_topology({5, 5, 5}, {{0, 30, 35}, {30, 0, 40}, {35, 40, 0}}, {150, 150, 150});
  auto inst = bare_instance(t, {0, 1, 0});
  inst.snapshot.add(2, {1, 2});
  inst.snapshot.add(3, {1, 1});
  inst.snapshot.add(2, {2, 2});
  inst.requests.push_back(request(0, 1, 1, 1));  // A
  inst.requests.push_back(request(1, 1, 2, 1));  // B

  const Cost greedy = greedy_objective(inst);
  CHECK(greedy == 100 * ms(30) + 100 * ms(150));
  const Schedule exact = solve_exhaustive(inst);
  CHECK(exact.objective == 100 * ms(35) + 100 * ms(30));
  const Schedule bnb = solve_bnb(inst);
  CHECK(bnb.objective == exact.objective);
  CHECK(bnb.objective < greedy);
  CHECK(bnb.decisions[0] == ServingDecision::neighbor_fetch(3));
  CHECK(bnb.decisions[1] == ServingDecision::neighbor_transcode_at_source(2, 2));
}

TEST_CASE("branch and bound matches the exhaustive oracle on 200 random instances") {
  int mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const SchedulingInstance inst = random_instance(seed);
    CHECK(inst.num_servers() <= 3);
    CHECK(inst.requests.size() <= 6);
    CHECK(inst.num_levels() <= 3);
    const Schedule exact = solve_exhaustive(inst);
    BnbStats stats;
    const Schedule bnb = solve_bnb(inst, &stats);
    if (bnb.objective != exact.objective) ++mismatches;
    CHECK(schedule_feasible(inst, bnb));
    CHECK(schedule_feasible(inst, exact));
    CHECK(root_lower_bound(inst) <= exact.objective);
    CHECK(stats.root_bound <= exact.objective);
  }
  CHECK(mismatches == 0);
}

TEST_CASE("branch and bound matches the oracle on larger instances and with hints") {
  InstanceLimits limits;
  limits.max_servers = 3;
  limits.max_requests = 8;
  limits.max_levels = 4;
  limits.num_videos = 2;
  for (std::uint64_t seed = 1000; seed < 1060; ++seed) {
    const SchedulingInstance inst = random_instance(seed, limits);
    const Schedule exact = solve_exhaustive(inst);
    CHECK(solve_bnb(inst).objective == exact.objective);

    // Any hint, good or bad, must not change the optimum.
    std::vector<std::optional<ServingDecision>> good, bad;
    for (std::size_t i = 0; i < inst.requests.size(); ++i) {
      good.emplace_back(exact.decisions[i]);
      bad.emplace_back(i % 2 ? std::nullopt : std::optional(ServingDecision::local_hit(inst.requests[i].home)));
    }
    CHECK(solve_bnb(inst, nullptr, &good).objective == exact.objective);
    CHECK(solve_bnb(inst, nullptr, &bad).objective == exact.objective);
  }
}

TEST_CASE("schedule helpers") {
  const SchedulingInstance inst = random_instance(17);
  const Schedule s = solve_bnb(inst);
  CHECK(schedule_cost(inst, s.choice) == s.objective);
  const auto loads = schedule_loads(inst, s.choice);
  for (int j = 1; j <= inst.num_servers(); ++j) CHECK(loads[static_cast<std::size_t>(j - 1)] <= inst.capacity(j));
  Schedule wrong = s;
  wrong.objective += 1;
  CHECK_FALSE(schedule_feasible(inst, wrong));
}

TEST_CASE("snapshot bookkeeping") {
  CacheSnapshot snap(2);
  snap.add(2, {5, 3});
  snap.add(1, {5, 1});
  snap.add(2, {5, 2});
  CHECK(snap.holds(2, {5, 3}));
  CHECK_FALSE(snap.holds(1, {5, 3}));
  CHECK(snap.closest_transcodable(2, {5, 1}) == 2);
  CHECK_FALSE(snap.closest_transcodable(1, {5, 1}).has_value());
  const auto entries = snap.entries();
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == std::pair<int, VariantId>{1, {5, 1}});
  CHECK(entries[2] == std::pair<int, VariantId>{2, {5, 3}});
}

TEST_CASE("optimum is no worse than scheduling the same set one by one with jccp") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomStream rng(seed);
    SystemState state(fixtures::small_catalog(4), fixtures::unit_tau(), fixtures::uniform_topology(3, 5, 30, 150),
                      10'000, rng.between(0, 6));
    for (int j = 1; j <= 3; ++j)
      for (int n = 0; n < 4; ++n) {
        const VariantId v{rng.between(1, 4), rng.between(1, 4)};
        state.cache(j).insert_lru(v, 100 * v.level);
      }
    std::vector<Request> requests;
    for (int i = 0; i < 6; ++i) requests.push_back(request(i, rng.between(1, 3), rng.between(1, 4), rng.between(1, 4)));
    const SchedulingInstance inst = make_instance(requests, state);

    // Online decisions against the same fixed caches, admitting as we go.
    Cost online = 0;
    for (const auto& r : requests) {
      const ServingDecision d = schedule_jccp(r, state);
      if (auto site = d.transcode_site(r.home)) REQUIRE(state.ledger.admit(*site, r.id, state.transcode_load(r.variant.level), 1e9));
      online += decision_cost(d, r, state.catalog, state.topology);
    }
    CHECK(solve_bnb(inst).objective <= online);
  }
}
