// Domain types shared by the cache, processing, policy and offline modules.
//
// Conventions used throughout edgevid:
//   * servers are numbered 1..K; index 0 denotes the origin content server;
//   * video titles are numbered 1..V and bitrate levels 1..L, where a higher
//     level means a higher bitrate (a level can only be transcoded downward);
//   * sizes are whole bytes, delays are whole microseconds, and backhaul cost
//     is bytes x microseconds, so every sum the solvers compare is exact.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgevid {

using Bytes = std::int64_t;
/// Transcoding capacity units. With the default tau these are bits/second of
/// encoded output.
using ProcUnits = std::int64_t;
using Micros = std::int64_t;
/// Backhaul cost in bytes x microseconds of path delay.
using Cost = std::int64_t;

inline constexpr int kOrigin = 0;

inline double micros_to_ms(Micros us) { return static_cast<double>(us) / 1000.0; }
inline double cost_to_byte_ms(Cost c) { return static_cast<double>(c) / 1000.0; }

/// Raised for out-of-range indices and malformed model parameters.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct VariantId {
  int video = 0;
  int level = 0;

  friend auto operator<=>(const VariantId&, const VariantId&) = default;
};

struct VariantIdHash {
  std::size_t operator()(const VariantId& v) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(v.video) << 8) ^
                                      static_cast<std::uint64_t>(v.level));
  }
};

/// True iff `from` can be transcoded down to `to`: same title, strictly
/// higher level.
inline bool transcodable_to(const VariantId& from, const VariantId& to) {
  return from.video == to.video && from.level > to.level;
}

class Catalog {
 public:
  /// `level_bitrates_bps[i]` is the bitrate of level i+1; must be strictly
  /// increasing. Throws DomainError otherwise.
  Catalog(int num_videos, std::vector<double> level_bitrates_bps, double video_length_s);

  int num_videos() const { return num_videos_; }
  int num_levels() const { return static_cast<int>(bitrates_.size()); }
  double video_length_s() const { return video_length_s_; }
  double bitrate_bps(int level) const;

  /// r_l: bitrate x length / 8, rounded half up to whole bytes.
  Bytes variant_size(int level) const;
  /// Sum of all variant sizes over all titles and levels.
  Bytes library_size() const;

  bool valid(const VariantId& v) const {
    return v.video >= 1 && v.video <= num_videos_ && v.level >= 1 && v.level <= num_levels();
  }

 private:
  void check_level(int level) const;

  int num_videos_;
  std::vector<double> bitrates_;
  std::vector<Bytes> sizes_;
  double video_length_s_;
};

/// The reference catalog: V titles, four levels at 0.45/0.55/0.67/0.82 of
/// a 2 Mb/s original, 600 s long.
Catalog default_catalog(int num_videos = 1000);

struct CostParams {
  /// Processing units consumed per byte of output variant.
  double tau = 0.0;

  /// tau such that p_l in bits/second equals the output variant's bitrate.
  static CostParams matching_bitrate(const Catalog& catalog) {
    return CostParams{8.0 / catalog.video_length_s()};
  }
};

/// p_l = tau * r_l, rounded half up. Independent of the source level.
ProcUnits transcode_cost(const Catalog& catalog, const CostParams& params, int level);

/// Symmetric backhaul delay/cost matrix between K edge servers and the origin.
class Topology {
 public:
  Topology() = default;
  /// `local_us[j-1]` = d_jj, `origin_us[j-1]` = d_j0, `pair_us` is K x K
  /// (diagonal ignored). Validates symmetry and d_j0 > d_jk > d_jj > 0.
  Topology(std::vector<Micros> local_us, std::vector<std::vector<Micros>> pair_us,
           std::vector<Micros> origin_us);

  int num_servers() const { return static_cast<int>(local_.size()); }

  /// Delay of fetching into `home` from `source` (0 = origin, home = local).
  Micros delay_us(int home, int source) const;
  double delay_ms(int home, int source) const { return micros_to_ms(delay_us(home, source)); }

  Micros local_us(int j) const { return delay_us(j, j); }
  Micros origin_us(int j) const { return delay_us(j, kOrigin); }

  bool valid_server(int j) const { return j >= 1 && j <= num_servers(); }

 private:
  std::vector<Micros> local_;
  std::vector<std::vector<Micros>> pair_;
  std::vector<Micros> origin_;
};

struct Request {
  std::int64_t id = 0;
  int home = 1;
  VariantId variant;
  double arrival_time = 0.0;
  double duration = 0.0;

  double departure_time() const { return arrival_time + duration; }
};

enum class DecisionKind : std::uint8_t {
  local_hit,
  local_transcode,
  neighbor_fetch,
  neighbor_transcode_at_source,
  neighbor_transcode_at_home,
  origin_fetch,
};

inline constexpr std::size_t kDecisionKinds = 6;

std::string_view to_string(DecisionKind kind);
std::optional<DecisionKind> parse_decision_kind(std::string_view name);

/// One of the six mutually exclusive ways a request can be served.
///
/// `source` is the server whose cache supplies the content (home for the two
/// local kinds, 0 for origin). `from_level` is the cached level being
/// transcoded, 0 for non-transcoding kinds.
struct ServingDecision {
  DecisionKind kind = DecisionKind::origin_fetch;
  int source = kOrigin;
  int from_level = 0;

  static ServingDecision local_hit(int home) { return {DecisionKind::local_hit, home, 0}; }
  static ServingDecision local_transcode(int home, int from) {
    return {DecisionKind::local_transcode, home, from};
  }
  static ServingDecision neighbor_fetch(int k) { return {DecisionKind::neighbor_fetch, k, 0}; }
  static ServingDecision neighbor_transcode_at_source(int k, int from) {
    return {DecisionKind::neighbor_transcode_at_source, k, from};
  }
  static ServingDecision neighbor_transcode_at_home(int k, int from) {
    return {DecisionKind::neighbor_transcode_at_home, k, from};
  }
  static ServingDecision origin_fetch() { return {DecisionKind::origin_fetch, kOrigin, 0}; }

  bool is_transcode() const {
    return kind == DecisionKind::local_transcode ||
           kind == DecisionKind::neighbor_transcode_at_source ||
           kind == DecisionKind::neighbor_transcode_at_home;
  }
  bool is_hit() const { return kind != DecisionKind::origin_fetch; }

  /// Server hosting the transcode, or nullopt for non-transcoding decisions.
  std::optional<int> transcode_site(int home) const;

  friend bool operator==(const ServingDecision&, const ServingDecision&) = default;
};

/// Checks the structural invariants of a decision for `request` (source
/// distinct from home for neighbor kinds, from_level above the requested
/// level for transcodes). Throws DomainError on violation.
void validate_decision(const ServingDecision& decision, const Request& request,
                       const Catalog& catalog, const Topology& topology);

/// D_j(v_l): 0 for local kinds, r_l * d_jk for every neighbor kind (the
/// home-transcode path included), r_l * d_j0 for origin.
Cost decision_cost(const ServingDecision& decision, const Request& request,
                   const Catalog& catalog, const Topology& topology);

/// Delay of the fetch path: d_jj, d_jk or d_j0. Transcoding adds nothing.
Micros access_delay(const ServingDecision& decision, const Request& request,
                    const Topology& topology);

/// Bytes actually carried between edge servers (r_l, or r_h when the higher
/// variant is shipped to the home server for transcoding).
Bytes internal_bytes(const ServingDecision& decision, const Request& request,
                     const Catalog& catalog);

}  // namespace edgevid
