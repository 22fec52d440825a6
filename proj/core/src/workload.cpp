#include "edgevid/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace edgevid {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::uint64_t seed, Purpose purpose, std::uint64_t index) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(purpose));
  s = splitmix64(s ^ index);
  return RandomStream(s);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw DomainError("below(0) is undefined");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double RandomStream::exponential(double mean) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -mean * std::log(1.0 - uniform01());
}

void WorkloadParams::validate() const {
  if (num_videos < 1) throw DomainError("num_videos must be at least 1");
  if (num_levels < 1) throw DomainError("num_levels must be at least 1");
  if (!(zipf_alpha >= 0.0)) throw DomainError("zipf_alpha must be non-negative");
  if (arrival_rate_per_min.empty()) throw DomainError("need at least one server");
  for (double l : arrival_rate_per_min)
    if (!(l > 0.0)) throw DomainError("arrival rates must be positive");
  if (requests_per_server < 0) throw DomainError("requests_per_server must be non-negative");
  if (!(video_length_s > 0.0)) throw DomainError("video length must be positive");
  for (const DelayRange* r : {&local, &neighbor, &origin})
    if (!(r->lo_ms > 0.0 && r->lo_ms <= r->hi_ms)) throw DomainError("delay ranges must satisfy 0 < lo <= hi");
  if (!(local.hi_ms < neighbor.lo_ms && neighbor.hi_ms < origin.lo_ms))
    throw DomainError("delay ranges must be ordered local < neighbor < origin");
}

std::vector<double> zipf_pmf(int num_videos, double alpha) {
  if (num_videos < 1) throw DomainError("zipf_pmf needs at least one video");
  if (!(alpha >= 0.0)) throw DomainError("zipf skew must be non-negative");
  std::vector<double> w(static_cast<std::size_t>(num_videos));
  for (int i = 1; i <= num_videos; ++i) w[static_cast<std::size_t>(i - 1)] = std::pow(static_cast<double>(i), -alpha);
  // Smallest terms first keeps the normalizer accurate.
  long double total = 0.0L;
  for (auto it = w.rbegin(); it != w.rend(); ++it) total += *it;
  for (double& x : w) x = static_cast<double>(x / total);
  return w;
}

ZipfSampler::ZipfSampler(int num_videos, double alpha) {
  const auto pmf = zipf_pmf(num_videos, alpha);
  cdf_.resize(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf_.begin());
}

int ZipfSampler::sample(RandomStream& rng) const {
  const double u = rng.uniform01() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto rank = std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
  return static_cast<int>(rank) + 1;
}

std::vector<int> popularity_permutation(int num_videos, std::uint64_t seed, int server) {
  std::vector<int> perm(static_cast<std::size_t>(num_videos));
  std::iota(perm.begin(), perm.end(), 1);
  auto rng = RandomStream::derive(seed, RandomStream::Purpose::permutation, static_cast<std::uint64_t>(server));
  for (std::size_t i = perm.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::vector<Request> generate_trace(const WorkloadParams& params, std::uint64_t seed) {
  params.validate();
  const ZipfSampler zipf(params.num_videos, params.zipf_alpha);

  struct Pending {
    double time;
    int server;
    int seq;
    VariantId variant;
  };
  std::vector<Pending> all;
  all.reserve(static_cast<std::size_t>(params.requests_per_server * params.num_servers()));

  for (int j = 1; j <= params.num_servers(); ++j) {
    const auto idx = static_cast<std::uint64_t>(j);
    const auto perm = popularity_permutation(params.num_videos, seed, j);
    auto arrivals = RandomStream::derive(seed, RandomStream::Purpose::arrivals, idx);
    auto videos = RandomStream::derive(seed, RandomStream::Purpose::videos, idx);
    auto levels = RandomStream::derive(seed, RandomStream::Purpose::levels, idx);
    const double mean_gap_s = 60.0 / params.arrival_rate_per_min[static_cast<std::size_t>(j - 1)];
    double t = 0.0;
    for (int n = 0; n < params.requests_per_server; ++n) {
      t += arrivals.exponential(mean_gap_s);
      const int title = perm[static_cast<std::size_t>(zipf.sample(videos) - 1)];
      const int level = levels.between(1, params.num_levels);
      all.push_back({t, j, n, VariantId{title, level}});
    }
  }
  std::sort(all.begin(), all.end(), [](const Pending& a, const Pending& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.server != b.server) return a.server < b.server;
    return a.seq < b.seq;
  });

  std::vector<Request> trace;
  trace.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    trace.push_back(Request{static_cast<std::int64_t>(i), all[i].server, all[i].variant, all[i].time,
                            params.video_length_s});
  return trace;
}

Topology sample_topology(int num_servers, const WorkloadParams& params, std::uint64_t seed) {
  if (num_servers < 1) throw DomainError("topology needs at least one server");
  params.validate();
  auto rng = RandomStream::derive(seed, RandomStream::Purpose::topology);
  auto draw = [&rng](const DelayRange& r) {
    return static_cast<Micros>(std::llround(rng.uniform(r.lo_ms, r.hi_ms) * 1000.0));
  };
  const auto k = static_cast<std::size_t>(num_servers);
  std::vector<Micros> local(k), origin(k);
  std::vector<std::vector<Micros>> pair(k, std::vector<Micros>(k, 0));
  for (std::size_t j = 0; j < k; ++j) local[j] = draw(params.local);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t m = j + 1; m < k; ++m) pair[j][m] = pair[m][j] = draw(params.neighbor);
  for (std::size_t j = 0; j < k; ++j) origin[j] = draw(params.origin);
  return Topology(std::move(local), std::move(pair), std::move(origin));
}

}  // namespace edgevid
