#include "edgevid/instances.hpp"

#include <algorithm>

#include "edgevid/workload.hpp"

namespace edgevid {

SchedulingInstance random_instance(std::uint64_t seed, const InstanceLimits& limits) {
  if (limits.max_servers < 1 || limits.max_requests < 1 || limits.max_levels < 1 || limits.num_videos < 1)
    throw DomainError("instance limits must be positive");
  auto rng = RandomStream::derive(seed, RandomStream::Purpose::instances);
  const int k = rng.between(1, limits.max_servers);
  const int levels = rng.between(1, limits.max_levels);
  const int n = rng.between(1, limits.max_requests);

  SchedulingInstance inst;
  Bytes size = 0;
  for (int l = 1; l <= levels; ++l) {
    size += rng.between(1, 50);
    inst.sizes.push_back(size);
    inst.loads.push_back(rng.between(1, 4));
  }

  const auto kk = static_cast<std::size_t>(k);
  std::vector<Micros> local(kk), origin(kk);
  std::vector<std::vector<Micros>> pair(kk, std::vector<Micros>(kk, 0));
  for (auto& d : local) d = rng.between(1, 10);
  for (std::size_t j = 0; j < kk; ++j)
    for (std::size_t m = j + 1; m < kk; ++m) pair[j][m] = pair[m][j] = rng.between(11, 40);
  for (auto& d : origin) d = rng.between(41, 100);
  inst.topology = Topology(std::move(local), std::move(pair), std::move(origin));

  inst.snapshot = CacheSnapshot(k);
  for (int j = 1; j <= k; ++j)
    for (int v = 1; v <= limits.num_videos; ++v)
      for (int l = 1; l <= levels; ++l)
        if (rng.uniform01() < 0.3) inst.snapshot.add(j, VariantId{v, l});

  const ProcUnits max_load = inst.loads.empty() ? 0 : *std::max_element(inst.loads.begin(), inst.loads.end());
  for (int j = 1; j <= k; ++j) inst.capacities.push_back(rng.between(0, static_cast<int>(max_load) * n));

  for (int i = 0; i < n; ++i) {
    Request r;
    r.id = i;
    r.home = rng.between(1, k);
    r.variant = VariantId{rng.between(1, limits.num_videos), rng.between(1, levels)};
    r.arrival_time = static_cast<double>(i);
    r.duration = 100.0;
    inst.requests.push_back(r);
  }
  inst.validate();
  return inst;
}

}  // namespace edgevid
