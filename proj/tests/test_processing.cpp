#include <stdexcept>

#include "doctest.h"

#include "edgevid/engine.hpp"
#include "edgevid/processing.hpp"
#include "edgevid/workload.hpp"

using namespace edgevid;

TEST_CASE("load sums active transcodes per hosting server") {
  ProcessingLedger l({10, 10});
  CHECK(l.load(1) == 0);
  CHECK(l.admit(1, 1, 3, 5.0));
  CHECK(l.admit(1, 2, 4, 5.0));
  CHECK(l.load(1) == 7);
  // A request homed elsewhere counts at the server doing the work.
  CHECK(l.admit(2, 3, 2, 5.0));
  CHECK(l.load(2) == 2);
  CHECK(l.load(1) == 7);
  CHECK_THROWS(l.load(3));
}

TEST_CASE("headroom") {
  ProcessingLedger l({10});
  CHECK(l.headroom(1, 4) == 6);
  l.admit(1, 1, 8, 1.0);
  CHECK(l.headroom(1, 4) == -2);
  l.release(1);
  l.admit(1, 2, 6, 1.0);
  CHECK(l.headroom(1, 4) == 0);
}

TEST_CASE("admission at and over the boundary") {
  ProcessingLedger l({10});
  REQUIRE(l.admit(1, 1, 6, 1.0));
  CHECK(l.admit(1, 2, 4, 1.0));
  CHECK(l.load(1) == 10);
  CHECK(l.release(2));

  CHECK_FALSE(l.admit(1, 3, 5, 1.0));
  CHECK(l.load(1) == 6);
  CHECK_FALSE(l.active(3));
  CHECK_THROWS_AS(l.admit(1, 1, 1, 1.0), std::logic_error);
}

TEST_CASE("release") {
  ProcessingLedger l({10});
  l.admit(1, 1, 3, 1.0);
  l.admit(1, 2, 5, 1.0);
  CHECK(l.release(1));
  CHECK(l.load(1) == 5);
  CHECK_FALSE(l.release(1));
  CHECK_FALSE(l.release(42));
  CHECK(l.load(1) == 5);
  CHECK(l.active_count() == 1);
  const auto t = l.find(2);
  REQUIRE(t.has_value());
  CHECK(t->load == 5);
  CHECK(t->server == 1);
}

TEST_CASE("incremental load matches a recount under random admit/release") {
  RandomStream rng(7);
  ProcessingLedger l({20, 15, 0});
  std::vector<std::int64_t> live;
  for (std::int64_t id = 0; id < 5000; ++id) {
    if (!live.empty() && rng.below(2) == 0) {
      const auto i = rng.below(live.size());
      const ProcUnits before = l.load(l.find(live[i])->server);
      const ProcUnits p = l.find(live[i])->load;
      const int s = l.find(live[i])->server;
      REQUIRE(l.release(live[i]));
      REQUIRE(l.load(s) == before - p);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      const int s = rng.between(1, 3);
      const ProcUnits p = rng.between(1, 6);
      const ProcUnits before = l.load(s);
      const bool fits = before + p <= l.capacity(s);
      REQUIRE(l.admit(s, id, p, 0.0) == fits);
      REQUIRE(l.load(s) == before + (fits ? p : 0));
      if (fits) live.push_back(id);
    }
    for (int s = 1; s <= 3; ++s) {
      REQUIRE(l.load(s) <= l.capacity(s));
      REQUIRE(l.recount_load(s) == l.load(s));
    }
  }
}

TEST_CASE("utilization: half capacity for half the horizon is a quarter") {
  ProcessingLedger l({10});
  UtilizationAccumulator acc(1);
  acc.advance(0.0, l);
  l.admit(1, 1, 5, 50.0);
  acc.advance(50.0, l);
  l.release(1);
  acc.advance(100.0, l);
  CHECK(compute_utilization(acc, 100.0)[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("utilization is zero without transcodes or capacity") {
  ProcessingLedger l({10, 0});
  UtilizationAccumulator acc(2);
  acc.advance(100.0, l);
  const auto u = compute_utilization(acc, 100.0);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == 0.0);
  CHECK(compute_utilization(acc, 0.0)[0] == 0.0);
}
