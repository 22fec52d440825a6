// Experiment configuration: a flat `key = value` file with `[a, b, c]` list
// syntax, overridable key by key from the command line.
//
//   policy = [jccp, cachepro, cocache, offline]
//   cache_fraction = [0.05, 0.1, 0.2, 0.3, 0.4]   # list => sweep axis
//   proc_capacity_mbps = 10
//   seeds = [1, 2, 3]
//
// Omitted keys take the reference defaults: 3 servers, 1000 titles, four
// levels at 0.45/0.55/0.67/0.82 of 2 Mb/s, 600 s videos, alpha 0.8,
// 8 requests/minute, 10,000 requests per server, M = 20% of the library,
// P = 10 Mb/s, seeds 1..10.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgevid/engine.hpp"

namespace edgevid {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis { none, cache_fraction, proc_capacity, arrival_rate, zipf_alpha };

std::string_view to_string(SweepAxis axis);
/// Config key that carries the axis values, e.g. "cache_fraction".
std::string_view sweep_key(SweepAxis axis);

struct ExperimentConfig {
  std::vector<PolicyKind> policies = {PolicyKind::jccp, PolicyKind::cachepro, PolicyKind::cocache,
                                      PolicyKind::offline};
  int servers = 3;
  int videos = 1000;
  double base_bitrate_mbps = 2.0;
  std::vector<double> relative_bitrates = {0.45, 0.55, 0.67, 0.82};
  double video_length_s = 600.0;
  double cache_fraction = 0.2;
  std::optional<Bytes> cache_bytes;  // absolute M_j; wins over cache_fraction
  double proc_capacity_mbps = 10.0;
  double arrival_rate = 8.0;                 // requests/minute, every server
  std::vector<double> arrival_rates;         // per-server override
  double zipf_alpha = 0.8;
  int requests_per_server = 10'000;
  std::optional<double> tau;
  DelayRange local_delay{5.0, 10.0};
  DelayRange neighbor_delay{20.0, 50.0};
  DelayRange origin_delay{100.0, 200.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  SweepAxis axis = SweepAxis::none;
  std::vector<double> sweep_values;
  std::string output;
  int warmup_requests = 0;
  bool jccp_home_transcode = true;
  bool check_invariants = false;
  bool record_runtime = false;
  int workers = 0;  // 0 = hardware concurrency

  Catalog catalog() const;
  /// Checks ranges and cross-field consistency. Throws ConfigError.
  void validate() const;
};

/// Parses config text. `source` names the input in error messages.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Applies one `key = value` assignment on top of `config` (command-line
/// overrides). A list value on a sweepable key replaces any existing axis.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Resolves one sweep point into an engine configuration. `axis_value` is
/// ignored when the config has no sweep axis.
RunConfig make_run_config(const ExperimentConfig& config, PolicyKind policy, std::uint64_t seed,
                          std::optional<double> axis_value = std::nullopt);

}  // namespace edgevid
