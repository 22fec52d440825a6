#include "edgevid/offline.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <string>

#include "edgevid/policy.hpp"

namespace edgevid {

// ---------------------------------------------------------------------------
// CacheSnapshot

void CacheSnapshot::add(int server, const VariantId& v) {
  if (server < 1 || server > num_servers_) throw DomainError("snapshot server out of range");
  if (v.level < 1 || v.level > 63) throw DomainError("snapshot level out of range");
  auto& masks = levels_[v.video];
  if (masks.empty()) masks.assign(static_cast<std::size_t>(num_servers_), 0);
  masks[static_cast<std::size_t>(server - 1)] |= std::uint64_t{1} << v.level;
}

std::uint64_t CacheSnapshot::mask(int server, int video) const {
  auto it = levels_.find(video);
  if (it == levels_.end()) return 0;
  return it->second[static_cast<std::size_t>(server - 1)];
}

bool CacheSnapshot::holds(int server, const VariantId& v) const {
  return (mask(server, v.video) >> v.level) & 1U;
}

std::optional<int> CacheSnapshot::closest_transcodable(int server, const VariantId& v) const {
  if (v.level >= 63) return std::nullopt;
  const std::uint64_t above = mask(server, v.video) & (~std::uint64_t{0} << (v.level + 1));
  if (above == 0) return std::nullopt;
  return std::countr_zero(above);
}

std::vector<std::pair<int, VariantId>> CacheSnapshot::entries() const {
  std::vector<std::pair<int, VariantId>> out;
  for (const auto& [video, masks] : levels_) {
    for (std::size_t s = 0; s < masks.size(); ++s) {
      for (std::uint64_t m = masks[s]; m != 0; m &= m - 1)
        out.emplace_back(static_cast<int>(s + 1), VariantId{video, std::countr_zero(m)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Instances and options

void SchedulingInstance::validate() const {
  const int k = num_servers();
  if (static_cast<int>(capacities.size()) != k) throw DomainError("instance needs one capacity per server");
  if (snapshot.num_servers() != k) throw DomainError("snapshot server count disagrees with topology");
  if (sizes.empty() || sizes.size() != loads.size()) throw DomainError("instance level tables disagree");
  for (const auto& r : requests) {
    if (!topology.valid_server(r.home)) throw DomainError("request home out of range");
    if (r.variant.level < 1 || r.variant.level > num_levels()) throw DomainError("request level out of range");
  }
}

SchedulingInstance make_instance(std::vector<Request> requests, const SystemState& state) {
  SchedulingInstance inst;
  inst.topology = state.topology;
  const int k = state.num_servers();
  const int levels = state.catalog.num_levels();
  inst.snapshot = CacheSnapshot(k);
  for (const auto& r : requests) {
    for (int s = 1; s <= k; ++s) {
      const LruCache& cache = state.cache(s);
      for (int l = r.variant.level; l <= levels; ++l) {
        const VariantId v{r.variant.video, l};
        if (cache.contains(v)) inst.snapshot.add(s, v);
      }
    }
  }
  inst.requests = std::move(requests);
  for (int s = 1; s <= k; ++s) inst.capacities.push_back(state.ledger.capacity(s));
  for (int l = 1; l <= levels; ++l) {
    inst.sizes.push_back(state.catalog.variant_size(l));
    inst.loads.push_back(state.transcode_load(l));
  }
  return inst;
}

std::vector<SchedulingOption> enumerate_options(const Request& request, const SchedulingInstance& inst) {
  std::vector<SchedulingOption> out;
  out.reserve(static_cast<std::size_t>(3 * inst.num_servers()));
  const int j = request.home;
  const VariantId& v = request.variant;
  const Bytes r = inst.size(v.level);
  const ProcUnits p = inst.load(v.level);
  const CacheSnapshot& snap = inst.snapshot;

  if (snap.holds(j, v)) out.push_back({ServingDecision::local_hit(j), 0, 0, 0});
  if (auto h = snap.closest_transcodable(j, v)) out.push_back({ServingDecision::local_transcode(j, *h), 0, j, p});
  for (int k = 1; k <= inst.num_servers(); ++k) {
    if (k == j) continue;
    const Cost c = r * inst.topology.delay_us(j, k);
    if (snap.holds(k, v)) out.push_back({ServingDecision::neighbor_fetch(k), c, 0, 0});
    if (auto h = snap.closest_transcodable(k, v)) {
      out.push_back({ServingDecision::neighbor_transcode_at_source(k, *h), c, k, p});
      out.push_back({ServingDecision::neighbor_transcode_at_home(k, *h), c, j, p});
    }
  }
  out.push_back({ServingDecision::origin_fetch(), r * inst.topology.origin_us(j), 0, 0});
  return out;
}

namespace {

__extension__ typedef __int128 Wide;  // overflow-free products of costs and loads

std::vector<std::vector<SchedulingOption>> all_options(const SchedulingInstance& inst) {
  std::vector<std::vector<SchedulingOption>> opts;
  opts.reserve(inst.requests.size());
  for (const auto& r : inst.requests) opts.push_back(enumerate_options(r, inst));
  return opts;
}

Schedule make_schedule(const std::vector<std::vector<SchedulingOption>>& opts, std::vector<std::size_t> choice) {
  Schedule s;
  s.decisions.reserve(choice.size());
  for (std::size_t i = 0; i < choice.size(); ++i) {
    const auto& o = opts[i][choice[i]];
    s.decisions.push_back(o.decision);
    s.objective += o.cost;
  }
  s.choice = std::move(choice);
  return s;
}

// A transcoding alternative that beats the request's best non-processing
// option. Only the cheapest such alternative per host site is kept: every
// transcode of a request costs the same p_l, so pricier ones at the same
// site are dominated.
struct Candidate {
  int site;
  Cost cost;
  std::size_t option;
};

struct Item {
  std::size_t request;
  Cost base_cost;
  ProcUnits load;
  Cost priority;
  std::vector<Candidate> cands;  // cost ascending
};

struct Reduction {
  std::vector<std::vector<SchedulingOption>> options;
  std::vector<std::size_t> base_choice;  // per request
  Cost fixed_cost = 0;                   // base cost of requests that never branch
  std::vector<Item> items;               // search order
};

Reduction reduce(const SchedulingInstance& inst) {
  Reduction red;
  red.options = all_options(inst);
  const int k = inst.num_servers();
  red.base_choice.resize(inst.requests.size());

  for (std::size_t i = 0; i < red.options.size(); ++i) {
    const auto& opts = red.options[i];
    std::size_t base = opts.size();
    Cost cheapest = std::numeric_limits<Cost>::max();
    for (std::size_t o = 0; o < opts.size(); ++o) {
      cheapest = std::min(cheapest, opts[o].cost);
      if (opts[o].site == 0 && (base == opts.size() || opts[o].cost < opts[base].cost)) base = o;
    }
    red.base_choice[i] = base;
    const Cost base_cost = opts[base].cost;

    std::vector<std::optional<Candidate>> per_site(static_cast<std::size_t>(k));
    for (std::size_t o = 0; o < opts.size(); ++o) {
      const auto& opt = opts[o];
      if (opt.site == 0 || opt.cost >= base_cost) continue;
      auto& slot = per_site[static_cast<std::size_t>(opt.site - 1)];
      if (!slot || opt.cost < slot->cost) slot = Candidate{opt.site, opt.cost, o};
    }
    Item item{i, base_cost, inst.load(inst.requests[i].variant.level),
              opts.back().cost - cheapest, {}};
    for (auto& c : per_site)
      if (c) item.cands.push_back(*c);
    if (item.cands.empty()) {
      red.fixed_cost += base_cost;
      continue;
    }
    std::stable_sort(item.cands.begin(), item.cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
    red.items.push_back(std::move(item));
  }
  std::stable_sort(red.items.begin(), red.items.end(),
                   [](const Item& a, const Item& b) { return a.priority > b.priority; });
  return red;
}

class BranchAndBound {
 public:
  BranchAndBound(const Reduction& red, const SchedulingInstance& inst)
      : items_(red.items), fixed_cost_(red.fixed_cost), by_site_(static_cast<std::size_t>(inst.num_servers())) {
    const std::size_t m = items_.size();
    for (int s = 1; s <= inst.num_servers(); ++s) remaining_.push_back(inst.capacity(s));
    suffix_base_.assign(m + 1, 0);
    for (std::size_t d = m; d-- > 0;) suffix_base_[d] = suffix_base_[d + 1] + items_[d].base_cost;

    for (std::size_t d = 0; d < m; ++d)
      for (const auto& c : items_[d].cands)
        by_site_[static_cast<std::size_t>(c.site - 1)].push_back({d, items_[d].base_cost - c.cost, items_[d].load});
    for (auto& list : by_site_) {
      std::stable_sort(list.begin(), list.end(), [](const Ratio& a, const Ratio& b) {
        return static_cast<Wide>(a.saving) * b.load > static_cast<Wide>(b.saving) * a.load;
      });
    }
    current_.assign(m, -1);
    best_.assign(m, -1);
  }

  Cost bound(std::size_t depth, Cost acc) const {
    // Savings over the base options still available to unassigned items,
    // bounded two ways: each item at its best site that still has room, and
    // a fractional knapsack per site that ignores the one-site-per-item rule.
    Cost best_each = 0;
    for (std::size_t d = depth; d < items_.size(); ++d) {
      const Item& it = items_[d];
      for (const auto& c : it.cands) {
        if (it.load <= remaining_[static_cast<std::size_t>(c.site - 1)]) {
          best_each += it.base_cost - c.cost;
          break;
        }
      }
    }
    Cost knapsack = 0;
    for (std::size_t s = 0; s < by_site_.size() && knapsack < best_each; ++s) {
      ProcUnits cap = remaining_[s];
      for (const Ratio& e : by_site_[s]) {
        if (e.depth < depth) continue;
        if (e.load <= cap) {
          knapsack += e.saving;
          cap -= e.load;
        } else {
          if (cap > 0) {
            const Wide num = static_cast<Wide>(e.saving) * cap;
            knapsack += static_cast<Cost>((num + e.load - 1) / e.load);
          }
          break;
        }
      }
    }
    return acc + suffix_base_[depth] - std::min(best_each, knapsack);
  }

  void seed(const std::vector<int>& assignment) {
    Cost acc = fixed_cost_;
    std::vector<ProcUnits> rem = remaining_;
    for (std::size_t d = 0; d < items_.size(); ++d) {
      const Item& it = items_[d];
      const int c = assignment[d];
      if (c < 0) {
        acc += it.base_cost;
        continue;
      }
      auto& r = rem[static_cast<std::size_t>(it.cands[static_cast<std::size_t>(c)].site - 1)];
      if (it.load > r) return;
      r -= it.load;
      acc += it.cands[static_cast<std::size_t>(c)].cost;
    }
    if (!have_incumbent_ || acc < incumbent_) {
      incumbent_ = acc;
      best_ = assignment;
      have_incumbent_ = true;
    }
  }

  std::vector<int> greedy() const {
    std::vector<ProcUnits> rem = remaining_;
    std::vector<int> out(items_.size(), -1);
    for (std::size_t d = 0; d < items_.size(); ++d) {
      const Item& it = items_[d];
      for (std::size_t c = 0; c < it.cands.size(); ++c) {
        auto& r = rem[static_cast<std::size_t>(it.cands[c].site - 1)];
        if (it.load <= r) {
          r -= it.load;
          out[d] = static_cast<int>(c);
          break;
        }
      }
    }
    return out;
  }

  void run() { dfs(0, fixed_cost_); }

  Cost root_bound() const { return bound(0, fixed_cost_); }
  const std::vector<int>& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  struct Ratio {
    std::size_t depth;
    Cost saving;
    ProcUnits load;
  };

  void dfs(std::size_t depth, Cost acc) {
    ++nodes_;
    if (depth == items_.size()) {
      if (acc < incumbent_) {
        incumbent_ = acc;
        best_ = current_;
      }
      return;
    }
    if (bound(depth, acc) >= incumbent_) return;
    const Item& it = items_[depth];
    for (std::size_t c = 0; c < it.cands.size(); ++c) {
      auto& r = remaining_[static_cast<std::size_t>(it.cands[c].site - 1)];
      if (it.load > r) continue;
      r -= it.load;
      current_[depth] = static_cast<int>(c);
      dfs(depth + 1, acc + it.cands[c].cost);
      r += it.load;
    }
    current_[depth] = -1;
    dfs(depth + 1, acc + it.base_cost);
  }

  const std::vector<Item>& items_;
  Cost fixed_cost_;
  std::vector<ProcUnits> remaining_;
  std::vector<Cost> suffix_base_;
  std::vector<std::vector<Ratio>> by_site_;
  std::vector<int> current_;
  std::vector<int> best_;
  Cost incumbent_ = std::numeric_limits<Cost>::max();
  bool have_incumbent_ = false;
  std::uint64_t nodes_ = 0;
};

// Maps a hinted decision onto the reduced item: the identical candidate if
// it survived reduction, else the candidate at the same site (no pricier,
// same load), else the base option.
int hint_to_candidate(const Item& item, const std::vector<SchedulingOption>& opts, const ServingDecision& hint,
                      int home) {
  const auto site = hint.transcode_site(home);
  if (!site) return -1;
  for (std::size_t c = 0; c < item.cands.size(); ++c)
    if (opts[item.cands[c].option].decision == hint) return static_cast<int>(c);
  for (std::size_t c = 0; c < item.cands.size(); ++c)
    if (item.cands[c].site == *site) return static_cast<int>(c);
  return -1;
}

}  // namespace

Cost schedule_cost(const SchedulingInstance& inst, const std::vector<std::size_t>& choice) {
  Cost total = 0;
  for (std::size_t i = 0; i < choice.size(); ++i) total += enumerate_options(inst.requests[i], inst).at(choice[i]).cost;
  return total;
}

std::vector<ProcUnits> schedule_loads(const SchedulingInstance& inst, const std::vector<std::size_t>& choice) {
  std::vector<ProcUnits> loads(static_cast<std::size_t>(inst.num_servers()), 0);
  for (std::size_t i = 0; i < choice.size(); ++i) {
    const auto opt = enumerate_options(inst.requests[i], inst).at(choice[i]);
    if (opt.site != 0) loads[static_cast<std::size_t>(opt.site - 1)] += opt.load;
  }
  return loads;
}

bool schedule_feasible(const SchedulingInstance& inst, const Schedule& schedule) {
  if (schedule.choice.size() != inst.requests.size() || schedule.decisions.size() != inst.requests.size())
    return false;
  Cost total = 0;
  std::vector<ProcUnits> loads(static_cast<std::size_t>(inst.num_servers()), 0);
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const auto opts = enumerate_options(inst.requests[i], inst);
    if (schedule.choice[i] >= opts.size()) return false;
    const auto& opt = opts[schedule.choice[i]];
    if (!(opt.decision == schedule.decisions[i])) return false;
    total += opt.cost;
    if (opt.site != 0) loads[static_cast<std::size_t>(opt.site - 1)] += opt.load;
  }
  for (int s = 1; s <= inst.num_servers(); ++s)
    if (loads[static_cast<std::size_t>(s - 1)] > inst.capacity(s)) return false;
  return total == schedule.objective;
}

Schedule solve_exhaustive(const SchedulingInstance& inst, std::uint64_t max_combinations) {
  inst.validate();
  const auto opts = all_options(inst);
  const std::size_t n = opts.size();
  if (n == 0) return Schedule{};

  std::uint64_t product = 1;
  for (const auto& o : opts) {
    if (product > max_combinations / o.size())
      throw SolverRefusal("exhaustive search over more than " + std::to_string(max_combinations) +
                          " combinations refused");
    product *= o.size();
  }

  const auto k = static_cast<std::size_t>(inst.num_servers());
  std::vector<std::size_t> idx(n, 0);
  std::vector<std::size_t> best;
  Cost best_cost = std::numeric_limits<Cost>::max();
  std::vector<ProcUnits> loads(k);
  // Odometer with the last request varying fastest: lexicographic order.
  while (true) {
    std::fill(loads.begin(), loads.end(), 0);
    Cost cost = 0;
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& o = opts[i][idx[i]];
      cost += o.cost;
      if (o.site != 0) {
        auto& l = loads[static_cast<std::size_t>(o.site - 1)];
        l += o.load;
        if (l > inst.capacity(o.site)) feasible = false;
      }
    }
    if (feasible && cost < best_cost) {
      best_cost = cost;
      best = idx;
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < opts[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) {
        pos = n;
        break;
      }
    }
    if (pos == n) break;
  }
  if (best.empty()) throw InfeasibleSchedule("no schedule satisfies the processing capacities");
  return make_schedule(opts, std::move(best));
}

Schedule solve_bnb(const SchedulingInstance& inst, BnbStats* stats,
                   const std::vector<std::optional<ServingDecision>>* hint) {
  inst.validate();
  const Reduction red = reduce(inst);
  BranchAndBound search(red, inst);

  search.seed(search.greedy());
  if (hint && hint->size() == inst.requests.size()) {
    std::vector<int> assignment(red.items.size(), -1);
    for (std::size_t d = 0; d < red.items.size(); ++d) {
      const Item& it = red.items[d];
      if (const auto& h = (*hint)[it.request])
        assignment[d] = hint_to_candidate(it, red.options[it.request], *h, inst.requests[it.request].home);
    }
    search.seed(assignment);
  }
  if (stats) {
    stats->root_bound = search.root_bound();
    stats->branching_requests = red.items.size();
  }
  search.run();
  if (stats) stats->nodes = search.nodes();

  std::vector<std::size_t> choice = red.base_choice;
  const auto& best = search.best();
  for (std::size_t d = 0; d < red.items.size(); ++d) {
    const Item& it = red.items[d];
    if (best[d] >= 0) choice[it.request] = it.cands[static_cast<std::size_t>(best[d])].option;
  }
  return make_schedule(red.options, std::move(choice));
}

Cost root_lower_bound(const SchedulingInstance& inst) {
  inst.validate();
  const Reduction red = reduce(inst);
  return BranchAndBound(red, inst).root_bound();
}

}  // namespace edgevid
