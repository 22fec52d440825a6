#include "doctest.h"
#include "fixtures.hpp"

#include "edgevid/workload.hpp"

using namespace edgevid;
using fixtures::ms;

TEST_CASE("variant sizes follow bitrate times length") {
  const Catalog c = default_catalog();
  CHECK(c.variant_size(4) == 123'000'000);
  CHECK(c.variant_size(1) == 67'500'000);
  CHECK(c.variant_size(2) == 82'500'000);
  CHECK(c.variant_size(3) == 100'500'000);
  CHECK(Catalog(1, {8.0}, 1.0).variant_size(1) == 1);
  CHECK(c.library_size() == 1000LL * (67'500'000 + 82'500'000 + 100'500'000 + 123'000'000));
}

TEST_CASE("sizes round half up") {
  CHECK(Catalog(1, {4.0}, 1.0).variant_size(1) == 1);   // 0.5 bytes
  CHECK(Catalog(1, {11.0}, 1.0).variant_size(1) == 1);  // 1.375 bytes
  CHECK(Catalog(1, {12.0}, 1.0).variant_size(1) == 2);  // 1.5 bytes
}

TEST_CASE("catalog rejects bad shapes") {
  CHECK_THROWS_AS(Catalog(1, {2.0, 1.0}, 10.0), DomainError);
  CHECK_THROWS_AS(Catalog(1, {1.0, 1.0}, 10.0), DomainError);
  CHECK_THROWS_AS(Catalog(0, {1.0}, 10.0), DomainError);
  CHECK_THROWS_AS(Catalog(1, {}, 10.0), DomainError);
  CHECK_THROWS_AS(Catalog(1, {8.0, 9.0}, 1.0), DomainError);  // sizes would tie at 1 byte
  const Catalog c = default_catalog();
  CHECK_THROWS_AS(c.variant_size(0), DomainError);
  CHECK_THROWS_AS(c.variant_size(5), DomainError);
}

TEST_CASE("transcode cost scales with the output size") {
  const Catalog c = default_catalog();
  const CostParams matched = CostParams::matching_bitrate(c);
  CHECK(transcode_cost(c, matched, 2) == 1'100'000);  // equals the 1.10 Mb/s output bitrate
  CHECK(transcode_cost(c, matched, 4) == 1'640'000);

  const Catalog hundred(1, {800.0}, 1.0);
  CHECK(hundred.variant_size(1) == 100);
  CHECK(transcode_cost(hundred, CostParams{0.5}, 1) == 50);
  CHECK_THROWS_AS(transcode_cost(hundred, CostParams{0.0}, 1), DomainError);

  for (int l = 2; l <= c.num_levels(); ++l) {
    CHECK(c.variant_size(l) > c.variant_size(l - 1));
    CHECK(transcode_cost(c, matched, l) > transcode_cost(c, matched, l - 1));
  }
}

TEST_CASE("transcodability is same title, strictly higher level") {
  CHECK(transcodable_to({1, 4}, {1, 2}));
  CHECK_FALSE(transcodable_to({1, 2}, {1, 2}));
  CHECK_FALSE(transcodable_to({1, 1}, {1, 2}));
  CHECK_FALSE(transcodable_to({2, 4}, {1, 2}));
}

TEST_CASE("topology validation") {
  CHECK_NOTHROW(fixtures::uniform_topology(3, 5, 30, 150));
  CHECK_THROWS_AS(fixtures::make_topology({5, 5}, {{0, 30}, {31, 0}}, {150, 150}), DomainError);
  CHECK_THROWS_AS(fixtures::make_topology({5, 5}, {{0, 200}, {200, 0}}, {150, 150}), DomainError);
  CHECK_THROWS_AS(fixtures::make_topology({40, 5}, {{0, 30}, {30, 0}}, {150, 150}), DomainError);
  const Topology t = fixtures::make_topology({5, 7}, {{0, 30}, {30, 0}}, {150, 120});
  CHECK(t.delay_us(1, 1) == ms(5));
  CHECK(t.delay_us(2, 2) == ms(7));
  CHECK(t.delay_us(1, 2) == t.delay_us(2, 1));
  CHECK(t.delay_us(2, kOrigin) == ms(120));
  CHECK_THROWS_AS(t.delay_us(3, 1), DomainError);
}

TEST_CASE("decision cost") {
  const Catalog hundred(1, {800.0, 1600.0}, 1.0);  // r_1 = 100, r_2 = 200
  const Topology t = fixtures::uniform_topology(2, 5, 30, 150);
  const Request r = fixtures::request(0, 1, 1, 1);
  // Costs are byte*us internally; 3000 byte*ms == 3'000'000 byte*us.
  CHECK(decision_cost(ServingDecision::local_hit(1), r, hundred, t) == 0);
  CHECK(decision_cost(ServingDecision::local_transcode(1, 2), r, hundred, t) == 0);
  CHECK(decision_cost(ServingDecision::neighbor_transcode_at_source(2, 2), r, hundred, t) == 3'000'000);
  CHECK(cost_to_byte_ms(decision_cost(ServingDecision::neighbor_transcode_at_source(2, 2), r, hundred, t)) == 3000.0);
  CHECK(decision_cost(ServingDecision::neighbor_fetch(2), r, hundred, t) == 3'000'000);
  // The home-transcode path is charged at the requested size, not the shipped one.
  CHECK(decision_cost(ServingDecision::neighbor_transcode_at_home(2, 2), r, hundred, t) == 3'000'000);
  CHECK(internal_bytes(ServingDecision::neighbor_transcode_at_home(2, 2), r, hundred) == 200);
  CHECK(cost_to_byte_ms(decision_cost(ServingDecision::origin_fetch(), r, hundred, t)) == 15000.0);
}

TEST_CASE("origin costs more than any neighbor option, and costs are linear in size") {
  const Catalog c = default_catalog();
  WorkloadParams w;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Topology t = sample_topology(3, w, seed);
    for (int home = 1; home <= 3; ++home) {
      const Request r = fixtures::request(0, home, 1, 1);
      const Request r2 = fixtures::request(0, home, 1, 2);
      const Cost origin = decision_cost(ServingDecision::origin_fetch(), r, c, t);
      for (int k = 1; k <= 3; ++k) {
        if (k == home) continue;
        for (const auto& d : {ServingDecision::neighbor_fetch(k), ServingDecision::neighbor_transcode_at_source(k, 3),
                              ServingDecision::neighbor_transcode_at_home(k, 3)}) {
          const Cost nc = decision_cost(d, r, c, t);
          CHECK(origin > nc);
          CHECK(nc > 0);
          // Cost per byte is the path delay, whatever the level.
          CHECK(nc * c.variant_size(2) == decision_cost(d, r2, c, t) * c.variant_size(1));
        }
      }
    }
  }
}

TEST_CASE("decision validation") {
  const Catalog c = fixtures::small_catalog();
  const Topology t = fixtures::uniform_topology(2, 5, 30, 150);
  const Request r = fixtures::request(0, 1, 1, 2);
  CHECK_NOTHROW(validate_decision(ServingDecision::local_transcode(1, 3), r, c, t));
  CHECK_THROWS_AS(validate_decision(ServingDecision::local_transcode(1, 2), r, c, t), DomainError);
  CHECK_THROWS_AS(validate_decision(ServingDecision::neighbor_fetch(1), r, c, t), DomainError);
  CHECK_THROWS_AS(validate_decision(ServingDecision::neighbor_fetch(3), r, c, t), DomainError);
  CHECK_THROWS_AS(validate_decision(ServingDecision::neighbor_transcode_at_home(2, 5), r, c, t), DomainError);
  CHECK_NOTHROW(validate_decision(ServingDecision::origin_fetch(), r, c, t));
}

TEST_CASE("decision kind names round-trip") {
  for (std::size_t i = 0; i < kDecisionKinds; ++i) {
    const auto k = static_cast<DecisionKind>(i);
    CHECK(parse_decision_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_decision_kind("teleport").has_value());
  CHECK(ServingDecision::neighbor_transcode_at_source(3, 4).transcode_site(1) == 3);
  CHECK(ServingDecision::neighbor_transcode_at_home(3, 4).transcode_site(1) == 1);
  CHECK_FALSE(ServingDecision::neighbor_fetch(3).transcode_site(1).has_value());
}
