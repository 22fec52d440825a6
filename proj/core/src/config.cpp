#include "edgevid/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace edgevid {

namespace {

struct Value {
  bool is_list = false;
  std::vector<std::string> items;  // one item for scalars
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

// Drops a trailing `# comment` that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

Value parse_value(std::string_view raw) {
  raw = trim(raw);
  Value v;
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError("unterminated list");
    v.is_list = true;
    std::string_view body = trim(raw.substr(1, raw.size() - 2));
    if (body.empty()) return v;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const auto item = trim(body.substr(start, comma == std::string_view::npos ? body.npos : comma - start));
      if (item.empty()) throw ConfigError("empty list element");
      v.items.push_back(unquote(item));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return v;
  }
  if (raw.empty()) throw ConfigError("missing value");
  v.items.push_back(unquote(raw));
  return v;
}

double to_double(std::string_view s) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(out))
    throw ConfigError("expected a number, got '" + std::string(s) + "'");
  return out;
}

std::int64_t to_int(std::string_view s) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("expected an integer, got '" + std::string(s) + "'");
  return out;
}

bool to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected true or false, got '" + std::string(s) + "'");
}

const std::string& scalar(const Value& v, std::string_view key) {
  if (v.is_list || v.items.size() != 1) throw ConfigError("'" + std::string(key) + "' takes a single value");
  return v.items.front();
}

std::vector<double> doubles(const Value& v) {
  std::vector<double> out;
  for (const auto& s : v.items) out.push_back(to_double(s));
  return out;
}

DelayRange delay_range(const Value& v, std::string_view key) {
  if (!v.is_list || v.items.size() != 2) throw ConfigError("'" + std::string(key) + "' takes [lo, hi] in ms");
  return DelayRange{to_double(v.items[0]), to_double(v.items[1])};
}

PolicyKind policy_named(const std::string& name) {
  if (auto p = parse_policy(name)) return *p;
  throw ConfigError("unknown policy '" + name + "'; valid policies: " + std::string(policy_names()));
}

constexpr std::string_view kKeys[] = {
    "policy", "servers", "videos", "base_bitrate_mbps", "relative_bitrates", "video_length_s",
    "cache_fraction", "cache_bytes", "proc_capacity_mbps", "arrival_rate", "arrival_rates", "zipf_alpha",
    "requests_per_server", "tau", "local_delay_ms", "neighbor_delay_ms", "origin_delay_ms", "seeds",
    "num_seeds", "output", "warmup_requests", "jccp_home_transcode", "check_invariants", "record_runtime",
    "workers",
};

std::optional<SweepAxis> axis_for_key(std::string_view key) {
  if (key == "cache_fraction") return SweepAxis::cache_fraction;
  if (key == "proc_capacity_mbps") return SweepAxis::proc_capacity;
  if (key == "arrival_rate") return SweepAxis::arrival_rate;
  if (key == "zipf_alpha") return SweepAxis::zipf_alpha;
  return std::nullopt;
}

// `strict_axis`: a second list-valued sweep key is an error (file input)
// rather than a replacement (command-line override).
void set_key(ExperimentConfig& c, std::string_view key, const Value& v, bool strict_axis) {
  if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
    throw ConfigError("unknown key '" + std::string(key) + "'");

  if (auto axis = axis_for_key(key)) {
    if (v.is_list) {
      if (v.items.empty()) throw ConfigError("sweep list '" + std::string(key) + "' is empty");
      if (strict_axis && c.axis != SweepAxis::none && c.axis != *axis)
        throw ConfigError("only one sweep axis per invocation; already sweeping '" +
                          std::string(sweep_key(c.axis)) + "'");
      c.axis = *axis;
      c.sweep_values = doubles(v);
      return;
    }
    if (c.axis == *axis) {
      c.axis = SweepAxis::none;
      c.sweep_values.clear();
    }
    const double x = to_double(scalar(v, key));
    switch (*axis) {
      case SweepAxis::cache_fraction: c.cache_fraction = x; break;
      case SweepAxis::proc_capacity: c.proc_capacity_mbps = x; break;
      case SweepAxis::arrival_rate: c.arrival_rate = x; break;
      case SweepAxis::zipf_alpha: c.zipf_alpha = x; break;
      case SweepAxis::none: break;
    }
    return;
  }

  if (key == "policy") {
    c.policies.clear();
    for (const auto& name : v.items) c.policies.push_back(policy_named(name));
  } else if (key == "servers") {
    c.servers = static_cast<int>(to_int(scalar(v, key)));
  } else if (key == "videos") {
    c.videos = static_cast<int>(to_int(scalar(v, key)));
  } else if (key == "base_bitrate_mbps") {
    c.base_bitrate_mbps = to_double(scalar(v, key));
  } else if (key == "relative_bitrates") {
    c.relative_bitrates = doubles(v);
  } else if (key == "video_length_s") {
    c.video_length_s = to_double(scalar(v, key));
  } else if (key == "cache_bytes") {
    c.cache_bytes = to_int(scalar(v, key));
  } else if (key == "arrival_rates") {
    c.arrival_rates = doubles(v);
  } else if (key == "requests_per_server") {
    c.requests_per_server = static_cast<int>(to_int(scalar(v, key)));
  } else if (key == "tau") {
    c.tau = to_double(scalar(v, key));
  } else if (key == "local_delay_ms") {
    c.local_delay = delay_range(v, key);
  } else if (key == "neighbor_delay_ms") {
    c.neighbor_delay = delay_range(v, key);
  } else if (key == "origin_delay_ms") {
    c.origin_delay = delay_range(v, key);
  } else if (key == "seeds") {
    c.seeds.clear();
    for (const auto& s : v.items) {
      const auto x = to_int(s);
      if (x < 0) throw ConfigError("seeds must be non-negative");
      c.seeds.push_back(static_cast<std::uint64_t>(x));
    }
  } else if (key == "num_seeds") {
    const auto n = to_int(scalar(v, key));
    if (n < 1) throw ConfigError("num_seeds must be at least 1");
    c.seeds.clear();
    for (std::int64_t i = 1; i <= n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
  } else if (key == "output") {
    c.output = scalar(v, key);
  } else if (key == "warmup_requests") {
    c.warmup_requests = static_cast<int>(to_int(scalar(v, key)));
  } else if (key == "jccp_home_transcode") {
    c.jccp_home_transcode = to_bool(scalar(v, key));
  } else if (key == "check_invariants") {
    c.check_invariants = to_bool(scalar(v, key));
  } else if (key == "record_runtime") {
    c.record_runtime = to_bool(scalar(v, key));
  } else if (key == "workers") {
    c.workers = static_cast<int>(to_int(scalar(v, key)));
  }
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::cache_fraction: return "cache_fraction";
    case SweepAxis::proc_capacity: return "proc_capacity";
    case SweepAxis::arrival_rate: return "arrival_rate";
    case SweepAxis::zipf_alpha: return "zipf_alpha";
  }
  return "none";
}

std::string_view sweep_key(SweepAxis axis) {
  return axis == SweepAxis::proc_capacity ? std::string_view("proc_capacity_mbps") : to_string(axis);
}

Catalog ExperimentConfig::catalog() const {
  std::vector<double> rates;
  rates.reserve(relative_bitrates.size());
  for (double r : relative_bitrates) rates.push_back(r * base_bitrate_mbps * 1e6);
  return Catalog(videos, std::move(rates), video_length_s);
}

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (servers < 1) throw ConfigError("servers must be at least 1");
  if (videos < 1) throw ConfigError("videos must be at least 1");
  if (requests_per_server < 0) throw ConfigError("requests_per_server must be non-negative");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (warmup_requests < 0) throw ConfigError("warmup_requests must be non-negative");
  if (workers < 0) throw ConfigError("workers must be non-negative");
  if (!arrival_rates.empty() && static_cast<int>(arrival_rates.size()) != servers)
    throw ConfigError("arrival_rates needs one entry per server");
  if (cache_bytes && *cache_bytes <= 0) throw ConfigError("cache capacity must be positive");
  if (tau && !(*tau > 0.0)) throw ConfigError("tau must be positive");
  if (axis != SweepAxis::none && sweep_values.empty()) throw ConfigError("sweep axis without values");

  auto check_point = [&](SweepAxis which, double x) {
    switch (which) {
      case SweepAxis::cache_fraction:
        if (!(x > 0.0)) throw ConfigError("cache capacity must be positive (cache_fraction)");
        break;
      case SweepAxis::proc_capacity:
        if (!(x > 0.0)) throw ConfigError("processing capacity must be positive (proc_capacity_mbps)");
        break;
      case SweepAxis::arrival_rate:
        if (!(x > 0.0)) throw ConfigError("arrival_rate must be positive");
        break;
      case SweepAxis::zipf_alpha:
        if (!(x >= 0.0)) throw ConfigError("zipf_alpha must be non-negative");
        break;
      case SweepAxis::none:
        break;
    }
  };
  for (SweepAxis a : {SweepAxis::cache_fraction, SweepAxis::proc_capacity, SweepAxis::arrival_rate,
                      SweepAxis::zipf_alpha}) {
    if (a == axis) {
      for (double x : sweep_values) check_point(a, x);
    } else {
      check_point(a, a == SweepAxis::cache_fraction  ? cache_fraction
                     : a == SweepAxis::proc_capacity ? proc_capacity_mbps
                     : a == SweepAxis::arrival_rate  ? arrival_rate
                                                     : zipf_alpha);
    }
  }
  try {
    (void)catalog();
    WorkloadParams w;
    w.local = local_delay;
    w.neighbor = neighbor_delay;
    w.origin = origin_delay;
    w.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value', got '" + std::string(body) + "'");
    const std::string key(trim(body.substr(0, eq)));
    if (key.empty()) throw ConfigError(where() + "missing key");
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw ConfigError(where() + "duplicate key '" + key + "'");
    seen.push_back(key);
    try {
      set_key(config, key, parse_value(body.substr(eq + 1)), true);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  try {
    set_key(config, trim(key), parse_value(value), false);
  } catch (const ConfigError& e) {
    throw ConfigError("--set " + std::string(trim(key)) + ": " + e.what());
  }
}

RunConfig make_run_config(const ExperimentConfig& c, PolicyKind policy, std::uint64_t seed,
                          std::optional<double> axis_value) {
  double fraction = c.cache_fraction;
  double mbps = c.proc_capacity_mbps;
  double lambda = c.arrival_rate;
  double alpha = c.zipf_alpha;
  if (c.axis != SweepAxis::none) {
    if (!axis_value) throw ConfigError("sweep point needs an axis value");
    switch (c.axis) {
      case SweepAxis::cache_fraction: fraction = *axis_value; break;
      case SweepAxis::proc_capacity: mbps = *axis_value; break;
      case SweepAxis::arrival_rate: lambda = *axis_value; break;
      case SweepAxis::zipf_alpha: alpha = *axis_value; break;
      case SweepAxis::none: break;
    }
  }

  RunConfig rc;
  rc.policy = policy;
  rc.seed = seed;
  rc.catalog = c.catalog();
  if (c.tau) rc.cost = CostParams{*c.tau};
  rc.workload.num_videos = c.videos;
  rc.workload.num_levels = rc.catalog.num_levels();
  rc.workload.zipf_alpha = alpha;
  rc.workload.requests_per_server = c.requests_per_server;
  rc.workload.video_length_s = c.video_length_s;
  rc.workload.local = c.local_delay;
  rc.workload.neighbor = c.neighbor_delay;
  rc.workload.origin = c.origin_delay;
  if (!c.arrival_rates.empty() && c.axis != SweepAxis::arrival_rate)
    rc.workload.arrival_rate_per_min = c.arrival_rates;
  else
    rc.workload.arrival_rate_per_min.assign(static_cast<std::size_t>(c.servers), lambda);
  rc.cache_capacity = c.cache_bytes && c.axis != SweepAxis::cache_fraction
                          ? *c.cache_bytes
                          : static_cast<Bytes>(std::floor(fraction * static_cast<double>(rc.catalog.library_size())));
  rc.proc_capacity = static_cast<ProcUnits>(std::llround(mbps * 1e6));
  rc.warmup_requests = c.warmup_requests;
  rc.jccp.home_transcode = c.jccp_home_transcode;
  rc.check_invariants = c.check_invariants;
  return rc;
}

}  // namespace edgevid
