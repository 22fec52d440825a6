// Seeded random scheduling instances for solver cross-checks and benchmarks.
#pragma once

#include <cstdint>

#include "edgevid/offline.hpp"

namespace edgevid {

struct InstanceLimits {
  int max_servers = 3;
  int max_requests = 6;
  int max_levels = 3;
  int num_videos = 3;  // few titles so requests share cached copies
};

/// Random servers, levels, caches, capacities and requests within `limits`.
/// Capacities range from zero to enough for every request, so instances
/// with binding and slack processing constraints both occur.
SchedulingInstance random_instance(std::uint64_t seed, const InstanceLimits& limits = {});

}  // namespace edgevid
