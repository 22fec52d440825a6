#include "edgevid/processing.hpp"

#include <algorithm>
#include <string>

namespace edgevid {

ProcessingLedger::ProcessingLedger(std::vector<ProcUnits> capacities)
    : capacity_(std::move(capacities)), load_(capacity_.size(), 0) {
  for (ProcUnits p : capacity_)
    if (p < 0) throw DomainError("processing capacity must be non-negative");
}

std::size_t ProcessingLedger::slot(int server) const {
  if (server < 1 || server > num_servers())
    throw DomainError("server " + std::to_string(server) + " out of range");
  return static_cast<std::size_t>(server - 1);
}

bool ProcessingLedger::admit(int server, std::int64_t request_id, ProcUnits p, double release_time) {
  const std::size_t s = slot(server);
  if (p < 0) throw DomainError("transcode load must be non-negative");
  if (active_.contains(request_id))
    throw std::logic_error("request " + std::to_string(request_id) + " already holds a transcode");
  if (load_[s] + p > capacity_[s]) return false;
  active_.emplace(request_id, ActiveTranscode{request_id, server, p, release_time});
  load_[s] += p;
  return true;
}

bool ProcessingLedger::release(std::int64_t request_id) {
  auto it = active_.find(request_id);
  if (it == active_.end()) return false;
  load_[slot(it->second.server)] -= it->second.load;
  active_.erase(it);
  return true;
}

void ProcessingLedger::clear() {
  active_.clear();
  std::fill(load_.begin(), load_.end(), 0);
}

std::optional<ActiveTranscode> ProcessingLedger::find(std::int64_t request_id) const {
  auto it = active_.find(request_id);
  if (it == active_.end()) return std::nullopt;
  return it->second;
}

ProcUnits ProcessingLedger::recount_load(int server) const {
  slot(server);
  ProcUnits total = 0;
  for (const auto& [id, t] : active_)
    if (t.server == server) total += t.load;
  return total;
}

void UtilizationAccumulator::advance(double now, const ProcessingLedger& ledger) {
  if (now < last_) throw std::logic_error("utilization clock moved backwards");
  const double dt = now - last_;
  if (dt > 0.0) {
    for (int j = 1; j <= num_servers(); ++j) {
      const ProcUnits cap = ledger.capacity(j);
      if (cap > 0)
        area_[static_cast<std::size_t>(j - 1)] +=
            dt * static_cast<double>(ledger.load(j)) / static_cast<double>(cap);
    }
  }
  last_ = now;
}

}  // namespace edgevid
