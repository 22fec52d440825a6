// Small hand-checkable systems shared by the unit tests.
#pragma once

#include <vector>

#include "edgevid/model.hpp"
#include "edgevid/policy.hpp"

namespace fixtures {

using namespace edgevid;

constexpr Micros ms(std::int64_t x) { return x * 1000; }

/// Every server has the same local, neighbor and origin delay (in ms).
inline Topology uniform_topology(int k, std::int64_t local_ms, std::int64_t pair_ms, std::int64_t origin_ms) {
  const auto n = static_cast<std::size_t>(k);
  std::vector<std::vector<Micros>> pair(n, std::vector<Micros>(n, ms(pair_ms)));
  return Topology(std::vector<Micros>(n, ms(local_ms)), std::move(pair), std::vector<Micros>(n, ms(origin_ms)));
}

/// `pair_ms` is a full symmetric K x K matrix; its diagonal is ignored.
inline Topology make_topology(const std::vector<std::int64_t>& local_ms,
                              const std::vector<std::vector<std::int64_t>>& pair_ms,
                              const std::vector<std::int64_t>& origin_ms) {
  std::vector<Micros> local, origin;
  std::vector<std::vector<Micros>> pair;
  for (auto x : local_ms) local.push_back(ms(x));
  for (auto x : origin_ms) origin.push_back(ms(x));
  for (const auto& row : pair_ms) {
    pair.emplace_back();
    for (auto x : row) pair.back().push_back(ms(x));
  }
  return Topology(std::move(local), std::move(pair), std::move(origin));
}

/// Four levels of 100/200/300/400 bytes.
inline Catalog small_catalog(int videos = 10) { return Catalog(videos, {8.0, 16.0, 24.0, 32.0}, 100.0); }

/// With small_catalog, p_l = l units.
inline CostParams unit_tau() { return CostParams{0.01}; }

inline Request request(std::int64_t id, int home, int video, int level, double t = 0.0, double duration = 100.0) {
  return Request{id, home, VariantId{video, level}, t, duration};
}

}  // namespace fixtures
