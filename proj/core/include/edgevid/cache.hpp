// Byte-capacity LRU cache holding whole video variants.
#pragma once

#include <iosfwd>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "edgevid/model.hpp"

namespace edgevid {

struct CacheEntry {
  VariantId variant;
  Bytes size = 0;
};

enum class InsertStatus {
  inserted,    // new entry, possibly after evictions
  refreshed,   // already present; recency updated only
  uncacheable, // larger than the whole cache; nothing changed
};

struct InsertResult {
  InsertStatus status = InsertStatus::inserted;
  std::vector<VariantId> evicted;  // in eviction order

  bool cached() const { return status != InsertStatus::uncacheable; }
};

class LruCache {
 public:
  explicit LruCache(Bytes capacity = 0);

  Bytes capacity() const { return capacity_; }
  Bytes used() const { return used_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Membership probe; does not update recency.
  bool contains(const VariantId& v) const { return index_.contains(v); }

  /// Smallest cached level h > v.level of the same title, or nullopt.
  /// Does not update recency.
  std::optional<int> closest_transcodable(const VariantId& v, int num_levels) const;

  /// Makes `v` most recently used. Returns false if absent.
  bool touch(const VariantId& v);

  /// Inserts `v` as most recently used, evicting least recently used entries
  /// until the capacity holds. Re-inserting a present variant only touches it.
  InsertResult insert_lru(const VariantId& v, Bytes size);

  /// Entries, most recently used first.
  const std::list<CacheEntry>& entries() const { return entries_; }

  /// Recomputes the byte total from the entry list.
  Bytes recount_used() const;

 private:
  Bytes capacity_;
  Bytes used_ = 0;
  std::list<CacheEntry> entries_;
  std::unordered_map<VariantId, std::list<CacheEntry>::iterator, VariantIdHash> index_;
};

/// Debug dump: one `video level size` line per entry, MRU first.
void dump(std::ostream& os, const LruCache& cache);

}  // namespace edgevid
