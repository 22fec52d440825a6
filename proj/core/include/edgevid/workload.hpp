// Seeded request traces and topologies.
//
// Every random quantity comes from its own sub-stream derived from
// (seed, purpose, index), so e.g. changing the arrival rate leaves the
// topology and popularity permutations untouched. Distributions are
// implemented here rather than taken from <random> so traces are identical
// across standard libraries.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "edgevid/model.hpp"

namespace edgevid {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  enum class Purpose : std::uint64_t { topology = 1, permutation, arrivals, videos, levels, instances };

  static RandomStream derive(std::uint64_t seed, Purpose purpose, std::uint64_t index = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1)); }
  double exponential(double mean);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct DelayRange {
  double lo_ms = 0.0;
  double hi_ms = 0.0;
};

struct WorkloadParams {
  int num_videos = 1000;
  int num_levels = 4;
  double zipf_alpha = 0.8;
  /// lambda_j in requests/minute, one entry per server.
  std::vector<double> arrival_rate_per_min = {8.0, 8.0, 8.0};
  int requests_per_server = 10'000;
  double video_length_s = 600.0;
  DelayRange local{5.0, 10.0};
  DelayRange neighbor{20.0, 50.0};
  DelayRange origin{100.0, 200.0};

  int num_servers() const { return static_cast<int>(arrival_rate_per_min.size()); }
  /// Throws DomainError on a malformed parameter set.
  void validate() const;
};

/// q_i = i^-alpha / sum_j j^-alpha for i = 1..V.
std::vector<double> zipf_pmf(int num_videos, double alpha);

/// Inverse-CDF sampler over zipf_pmf; returns ranks 1..V.
class ZipfSampler {
 public:
  ZipfSampler(int num_videos, double alpha);
  int sample(RandomStream& rng) const;

 private:
  std::vector<double> cdf_;
};

/// Random permutation of titles for one server: rank i maps to title perm[i-1].
std::vector<int> popularity_permutation(int num_videos, std::uint64_t seed, int server);

/// Merged, time-ordered trace with ids 0..n-1 in arrival order. Ties are
/// broken by server index, then by per-server sequence number.
std::vector<Request> generate_trace(const WorkloadParams& params, std::uint64_t seed);

/// Uniform delays in the configured ranges, quantized to whole microseconds.
Topology sample_topology(int num_servers, const WorkloadParams& params, std::uint64_t seed);

}  // namespace edgevid
