#include "edgevid/model.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace edgevid {

namespace {

std::int64_t round_half_up(double x) { return static_cast<std::int64_t>(std::floor(x + 0.5)); }

constexpr std::array<std::string_view, kDecisionKinds> kKindNames = {
    "local_hit",
    "local_transcode",
    "neighbor_fetch",
    "neighbor_transcode_at_source",
    "neighbor_transcode_at_home",
    "origin_fetch",
};

}  // namespace

Catalog::Catalog(int num_videos, std::vector<double> level_bitrates_bps, double video_length_s)
    : num_videos_(num_videos), bitrates_(std::move(level_bitrates_bps)), video_length_s_(video_length_s) {
  if (num_videos_ < 1) throw DomainError("catalog needs at least one video");
  if (bitrates_.empty()) throw DomainError("catalog needs at least one bitrate level");
  if (bitrates_.size() > 63) throw DomainError("at most 63 bitrate levels are supported");
  if (!(video_length_s_ > 0.0)) throw DomainError("video length must be positive");
  sizes_.reserve(bitrates_.size());
  for (std::size_t i = 0; i < bitrates_.size(); ++i) {
    if (!(bitrates_[i] > 0.0)) throw DomainError("bitrates must be positive");
    if (i > 0 && !(bitrates_[i] > bitrates_[i - 1]))
      throw DomainError("level bitrates must be strictly increasing");
    sizes_.push_back(round_half_up(bitrates_[i] * video_length_s_ / 8.0));
    if (i > 0 && sizes_[i] <= sizes_[i - 1])
      throw DomainError("variant sizes must be strictly increasing");
  }
}

void Catalog::check_level(int level) const {
  if (level < 1 || level > num_levels())
    throw DomainError("level " + std::to_string(level) + " outside 1.." + std::to_string(num_levels()));
}

double Catalog::bitrate_bps(int level) const {
  check_level(level);
  return bitrates_[static_cast<std::size_t>(level - 1)];
}

Bytes Catalog::variant_size(int level) const {
  check_level(level);
  return sizes_[static_cast<std::size_t>(level - 1)];
}

Bytes Catalog::library_size() const {
  Bytes per_title = 0;
  for (Bytes s : sizes_) per_title += s;
  return per_title * num_videos_;
}

Catalog default_catalog(int num_videos) {
  constexpr double kBase = 2e6;
  return Catalog(num_videos, {0.45 * kBase, 0.55 * kBase, 0.67 * kBase, 0.82 * kBase}, 600.0);
}

ProcUnits transcode_cost(const Catalog& catalog, const CostParams& params, int level) {
  if (!(params.tau > 0.0)) throw DomainError("tau must be positive");
  return round_half_up(params.tau * static_cast<double>(catalog.variant_size(level)));
}

Topology::Topology(std::vector<Micros> local_us, std::vector<std::vector<Micros>> pair_us,
                   std::vector<Micros> origin_us)
    : local_(std::move(local_us)), pair_(std::move(pair_us)), origin_(std::move(origin_us)) {
  const std::size_t k = local_.size();
  if (k == 0) throw DomainError("topology needs at least one server");
  if (origin_.size() != k || pair_.size() != k) throw DomainError("topology dimensions disagree");
  for (std::size_t j = 0; j < k; ++j) {
    if (pair_[j].size() != k) throw DomainError("pair matrix must be K x K");
    if (local_[j] <= 0) throw DomainError("local delay must be positive");
    if (origin_[j] <= local_[j]) throw DomainError("origin delay must exceed local delay");
    for (std::size_t m = 0; m < k; ++m) {
      if (m == j) continue;
      if (pair_[j][m] != pair_[m][j]) throw DomainError("pair delays must be symmetric");
      if (!(origin_[j] > pair_[j][m] && pair_[j][m] > local_[j]))
        throw DomainError("need d_j0 > d_jk > d_jj for every pair");
    }
  }
}

Micros Topology::delay_us(int home, int source) const {
  if (!valid_server(home)) throw DomainError("server " + std::to_string(home) + " out of range");
  const auto j = static_cast<std::size_t>(home - 1);
  if (source == kOrigin) return origin_[j];
  if (source == home) return local_[j];
  if (!valid_server(source)) throw DomainError("server " + std::to_string(source) + " out of range");
  return pair_[j][static_cast<std::size_t>(source - 1)];
}

std::string_view to_string(DecisionKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<DecisionKind> parse_decision_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<DecisionKind>(i);
  return std::nullopt;
}

std::optional<int> ServingDecision::transcode_site(int home) const {
  switch (kind) {
    case DecisionKind::local_transcode:
    case DecisionKind::neighbor_transcode_at_home:
      return home;
    case DecisionKind::neighbor_transcode_at_source:
      return source;
    default:
      return std::nullopt;
  }
}

void validate_decision(const ServingDecision& d, const Request& request, const Catalog& catalog,
                       const Topology& topology) {
  const int home = request.home;
  if (!topology.valid_server(home)) throw DomainError("request home out of range");
  if (!catalog.valid(request.variant)) throw DomainError("request variant out of range");
  switch (d.kind) {
    case DecisionKind::local_hit:
    case DecisionKind::local_transcode:
      if (d.source != home) throw DomainError("local decision must source from home");
      break;
    case DecisionKind::neighbor_fetch:
    case DecisionKind::neighbor_transcode_at_source:
    case DecisionKind::neighbor_transcode_at_home:
      if (d.source == home || !topology.valid_server(d.source))
        throw DomainError("neighbor decision needs a source distinct from home");
      break;
    case DecisionKind::origin_fetch:
      if (d.source != kOrigin) throw DomainError("origin decision must source from 0");
      break;
  }
  if (d.is_transcode()) {
    if (d.from_level <= request.variant.level || d.from_level > catalog.num_levels())
      throw DomainError("transcode must start from a higher level");
  } else if (d.from_level != 0) {
    throw DomainError("non-transcode decision carries a from_level");
  }
}

Cost decision_cost(const ServingDecision& d, const Request& request, const Catalog& catalog,
                   const Topology& topology) {
  switch (d.kind) {
    case DecisionKind::local_hit:
    case DecisionKind::local_transcode:
      return 0;
    case DecisionKind::neighbor_fetch:
    case DecisionKind::neighbor_transcode_at_source:
    case DecisionKind::neighbor_transcode_at_home:
    case DecisionKind::origin_fetch:
      break;
  }
  return catalog.variant_size(request.variant.level) * topology.delay_us(request.home, d.source);
}

Micros access_delay(const ServingDecision& d, const Request& request, const Topology& topology) {
  return topology.delay_us(request.home, d.source);
}

Bytes internal_bytes(const ServingDecision& d, const Request& request, const Catalog& catalog) {
  switch (d.kind) {
    case DecisionKind::neighbor_fetch:
    case DecisionKind::neighbor_transcode_at_source:
      return catalog.variant_size(request.variant.level);
    case DecisionKind::neighbor_transcode_at_home:
      return catalog.variant_size(d.from_level);
    default:
      return 0;
  }
}

}  // namespace edgevid
