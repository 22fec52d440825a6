#include "edgevid/cache.hpp"

#include <ostream>

namespace edgevid {

LruCache::LruCache(Bytes capacity) : capacity_(capacity) {
  if (capacity_ < 0) throw DomainError("cache capacity must be non-negative");
}

std::optional<int> LruCache::closest_transcodable(const VariantId& v, int num_levels) const {
  for (int h = v.level + 1; h <= num_levels; ++h)
    if (index_.contains(VariantId{v.video, h})) return h;
  return std::nullopt;
}

bool LruCache::touch(const VariantId& v) {
  auto it = index_.find(v);
  if (it == index_.end()) return false;
  entries_.splice(entries_.begin(), entries_, it->second);
  return true;
}

InsertResult LruCache::insert_lru(const VariantId& v, Bytes size) {
  InsertResult result;
  if (touch(v)) {
    result.status = InsertStatus::refreshed;
    return result;
  }
  if (size > capacity_ || size < 0) {
    result.status = InsertStatus::uncacheable;
    return result;
  }
  while (used_ + size > capacity_) {
    const CacheEntry& victim = entries_.back();
    result.evicted.push_back(victim.variant);
    used_ -= victim.size;
    index_.erase(victim.variant);
    entries_.pop_back();
  }
  entries_.push_front(CacheEntry{v, size});
  index_.emplace(v, entries_.begin());
  used_ += size;
  return result;
}

Bytes LruCache::recount_used() const {
  Bytes total = 0;
  for (const auto& e : entries_) total += e.size;
  return total;
}

void dump(std::ostream& os, const LruCache& cache) {
  for (const auto& e : cache.entries()) os << e.variant.video << ' ' << e.variant.level << ' ' << e.size << '\n';
}

}  // namespace edgevid
