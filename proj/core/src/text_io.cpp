#include "edgevid/text_io.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace edgevid {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw TextFormatError("line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

template <typename T>
T number(std::string_view s, int line_no) {
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) fail(line_no, "bad number '" + std::string(s) + "'");
  return out;
}

// Yields (line number, content) for non-blank, non-comment lines.
template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    f(line_no, body);
  }
}

DecisionKind kind_named(std::string_view name, int line_no) {
  if (auto k = parse_decision_kind(name)) return *k;
  fail(line_no, "unknown decision type '" + std::string(name) + "'");
}

constexpr std::string_view kTraceHeader = "arrival_time_s,server,video,level";
constexpr std::string_view kLogHeader =
    "request_id,time,server,video,level,decision_type,source,from_level,transcode_site,cost,delay_ms,origin_bytes";

}  // namespace

std::string format_shortest(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::logic_error("to_chars failed");
  return std::string(buf, ptr);
}

std::string format_fixed(double x, int decimals) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  if (n < 0 || n >= static_cast<int>(sizeof buf)) throw std::logic_error("value too wide to format");
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_milli(std::int64_t thousandths) {
  const bool negative = thousandths < 0;
  const std::uint64_t mag =
      negative ? static_cast<std::uint64_t>(-(thousandths + 1)) + 1 : static_cast<std::uint64_t>(thousandths);
  char frac[4];
  std::snprintf(frac, sizeof frac, "%03u", static_cast<unsigned>(mag % 1000));
  return (negative ? "-" : "") + std::to_string(mag / 1000) + "." + frac;
}

std::int64_t parse_milli(std::string_view text) {
  std::string_view s = trim(text);
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() || frac.size() > 3) throw TextFormatError("bad milli decimal '" + std::string(text) + "'");
  std::int64_t w = 0;
  auto r = std::from_chars(whole.data(), whole.data() + whole.size(), w);
  if (r.ec != std::errc{} || r.ptr != whole.data() + whole.size())
    throw TextFormatError("bad milli decimal '" + std::string(text) + "'");
  std::int64_t f = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    f *= 10;
    if (i < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') throw TextFormatError("bad milli decimal '" + std::string(text) + "'");
      f += frac[i] - '0';
    }
  }
  const std::int64_t v = w * 1000 + f;
  return negative ? -v : v;
}

void write_trace(std::ostream& out, const std::vector<Request>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace)
    out << format_shortest(r.arrival_time) << ',' << r.home << ',' << r.variant.video << ',' << r.variant.level
        << '\n';
}

std::vector<Request> read_trace(std::istream& in, double duration_s) {
  std::vector<Request> trace;
  double last = 0.0;
  for_each_line(in, [&](int line_no, std::string_view body) {
    if (body == kTraceHeader) return;
    const auto f = split_csv(body);
    if (f.size() != 4) fail(line_no, "expected 4 fields, got " + std::to_string(f.size()));
    Request r;
    r.id = static_cast<std::int64_t>(trace.size());
    r.arrival_time = number<double>(f[0], line_no);
    r.home = number<int>(f[1], line_no);
    r.variant = VariantId{number<int>(f[2], line_no), number<int>(f[3], line_no)};
    r.duration = duration_s;
    if (r.arrival_time < last) fail(line_no, "arrival times must be non-decreasing");
    last = r.arrival_time;
    trace.push_back(r);
  });
  return trace;
}

void write_decision_log(std::ostream& out, const std::vector<DecisionRecord>& log) {
  out << kLogHeader << '\n';
  for (const auto& d : log) {
    out << d.request_id << ',' << format_shortest(d.time) << ',' << d.server << ',' << d.variant.video << ','
        << d.variant.level << ',' << to_string(d.decision.kind) << ',' << d.decision.source << ','
        << d.decision.from_level << ',' << d.transcode_site << ',' << format_milli(d.cost) << ','
        << format_milli(d.delay) << ',' << d.origin_bytes << '\n';
  }
}

std::vector<DecisionRecord> read_decision_log(std::istream& in) {
  std::vector<DecisionRecord> log;
  for_each_line(in, [&](int line_no, std::string_view body) {
    if (body == kLogHeader) return;
    const auto f = split_csv(body);
    if (f.size() != 12) fail(line_no, "expected 12 fields, got " + std::to_string(f.size()));
    DecisionRecord d;
    d.request_id = number<std::int64_t>(f[0], line_no);
    d.time = number<double>(f[1], line_no);
    d.server = number<int>(f[2], line_no);
    d.variant = VariantId{number<int>(f[3], line_no), number<int>(f[4], line_no)};
    d.decision.kind = kind_named(f[5], line_no);
    d.decision.source = number<int>(f[6], line_no);
    d.decision.from_level = number<int>(f[7], line_no);
    d.transcode_site = number<int>(f[8], line_no);
    try {
      d.cost = parse_milli(f[9]);
      d.delay = parse_milli(f[10]);
    } catch (const TextFormatError& e) {
      fail(line_no, e.what());
    }
    d.origin_bytes = number<std::int64_t>(f[11], line_no);
    log.push_back(d);
  });
  return log;
}

void write_instance(std::ostream& out, const SchedulingInstance& inst) {
  const int k = inst.num_servers();
  out << "instance " << k << ' ' << inst.num_levels() << '\n';
  for (int j = 1; j <= k; ++j) out << "capacity " << j << ' ' << inst.capacity(j) << '\n';
  for (int l = 1; l <= inst.num_levels(); ++l) out << "level " << l << ' ' << inst.size(l) << ' ' << inst.load(l) << '\n';
  for (int j = 1; j <= k; ++j) out << "local " << j << ' ' << inst.topology.local_us(j) << '\n';
  for (int j = 1; j <= k; ++j)
    for (int m = j + 1; m <= k; ++m) out << "pair " << j << ' ' << m << ' ' << inst.topology.delay_us(j, m) << '\n';
  for (int j = 1; j <= k; ++j) out << "origin " << j << ' ' << inst.topology.origin_us(j) << '\n';
  for (const auto& [j, v] : inst.snapshot.entries()) out << "cached " << j << ' ' << v.video << ' ' << v.level << '\n';
  for (const auto& r : inst.requests)
    out << "request " << r.id << ' ' << r.home << ' ' << r.variant.video << ' ' << r.variant.level << ' '
        << format_shortest(r.arrival_time) << ' ' << format_shortest(r.duration) << '\n';
  out << "end\n";
}

SchedulingInstance read_instance(std::istream& in) {
  int k = -1;
  int levels = -1;
  std::vector<ProcUnits> capacities;
  std::vector<Bytes> sizes;
  std::vector<ProcUnits> loads;
  std::vector<Micros> local;
  std::vector<Micros> origin;
  std::vector<std::vector<Micros>> pair;
  std::vector<std::pair<int, VariantId>> cached;
  std::vector<Request> requests;
  bool ended = false;

  std::string line;
  int line_no = 0;
  while (!ended && std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream ss{std::string(body)};
    std::string tag;
    ss >> tag;
    auto read = [&](auto& x) {
      if (!(ss >> x)) fail(line_no, "truncated '" + tag + "' line");
    };
    auto server = [&] {
      int j = 0;
      read(j);
      if (j < 1 || j > k) fail(line_no, "server " + std::to_string(j) + " out of range");
      return static_cast<std::size_t>(j - 1);
    };
    if (tag != "instance" && k < 0) fail(line_no, "expected 'instance' header first");
    if (tag == "instance") {
      read(k);
      read(levels);
      if (k < 1 || levels < 1) fail(line_no, "instance needs at least one server and level");
      capacities.assign(static_cast<std::size_t>(k), 0);
      local.assign(static_cast<std::size_t>(k), 0);
      origin.assign(static_cast<std::size_t>(k), 0);
      pair.assign(static_cast<std::size_t>(k), std::vector<Micros>(static_cast<std::size_t>(k), 0));
      sizes.assign(static_cast<std::size_t>(levels), 0);
      loads.assign(static_cast<std::size_t>(levels), 0);
    } else if (tag == "capacity") {
      const auto j = server();
      read(capacities[j]);
    } else if (tag == "level") {
      int l = 0;
      read(l);
      if (l < 1 || l > levels) fail(line_no, "level out of range");
      read(sizes[static_cast<std::size_t>(l - 1)]);
      read(loads[static_cast<std::size_t>(l - 1)]);
    } else if (tag == "local") {
      const auto j = server();
      read(local[j]);
      pair[j][j] = local[j];
    } else if (tag == "pair") {
      const auto a = server();
      const auto b = server();
      Micros d = 0;
      read(d);
      pair[a][b] = pair[b][a] = d;
    } else if (tag == "origin") {
      const auto j = server();
      read(origin[j]);
    } else if (tag == "cached") {
      const auto j = server();
      VariantId v;
      read(v.video);
      read(v.level);
      cached.emplace_back(static_cast<int>(j + 1), v);
    } else if (tag == "request") {
      Request r;
      read(r.id);
      read(r.home);
      read(r.variant.video);
      read(r.variant.level);
      read(r.arrival_time);
      read(r.duration);
      requests.push_back(r);
    } else if (tag == "end") {
      ended = true;
    } else {
      fail(line_no, "unknown record '" + tag + "'");
    }
    std::string extra;
    if (ss >> extra) fail(line_no, "trailing text '" + extra + "'");
  }
  if (!ended) throw TextFormatError("instance is missing its 'end' line");

  SchedulingInstance inst;
  try {
    inst.topology = Topology(local, pair, origin);
    inst.snapshot = CacheSnapshot(k);
    for (const auto& [j, v] : cached) inst.snapshot.add(j, v);
    inst.requests = std::move(requests);
    inst.capacities = std::move(capacities);
    inst.sizes = std::move(sizes);
    inst.loads = std::move(loads);
    inst.validate();
  } catch (const DomainError& e) {
    throw TextFormatError(std::string("invalid instance: ") + e.what());
  }
  return inst;
}

void write_schedule(std::ostream& out, const SchedulingInstance& instance, const Schedule& schedule) {
  out << "objective " << schedule.objective << '\n';
  for (std::size_t i = 0; i < instance.requests.size(); ++i) {
    const auto& d = schedule.decisions.at(i);
    out << "decision " << instance.requests[i].id << ' ' << to_string(d.kind) << ' ' << d.source << ' '
        << d.from_level << '\n';
  }
}

Schedule read_schedule(std::istream& in, const SchedulingInstance& instance) {
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < instance.requests.size(); ++i) index[instance.requests[i].id] = i;

  Schedule s;
  s.choice.assign(instance.requests.size(), SIZE_MAX);
  s.decisions.resize(instance.requests.size());
  std::optional<Cost> stated;
  for_each_line(in, [&](int line_no, std::string_view body) {
    std::istringstream ss{std::string(body)};
    std::string tag;
    ss >> tag;
    if (tag == "objective") {
      Cost c = 0;
      if (!(ss >> c)) fail(line_no, "bad objective");
      stated = c;
      return;
    }
    if (tag != "decision") fail(line_no, "unknown record '" + tag + "'");
    std::int64_t id = 0;
    std::string kind;
    ServingDecision d;
    if (!(ss >> id >> kind >> d.source >> d.from_level)) fail(line_no, "truncated decision");
    d.kind = kind_named(kind, line_no);
    const auto it = index.find(id);
    if (it == index.end()) fail(line_no, "request " + std::to_string(id) + " is not in the instance");
    if (s.choice[it->second] != SIZE_MAX) fail(line_no, "request " + std::to_string(id) + " decided twice");
    const auto options = enumerate_options(instance.requests[it->second], instance);
    for (std::size_t o = 0; o < options.size(); ++o) {
      if (options[o].decision == d) {
        s.choice[it->second] = o;
        s.decisions[it->second] = d;
        return;
      }
    }
    fail(line_no, "decision for request " + std::to_string(id) + " is not an available option");
  });
  for (std::size_t i = 0; i < s.choice.size(); ++i)
    if (s.choice[i] == SIZE_MAX)
      throw TextFormatError("no decision for request " + std::to_string(instance.requests[i].id));
  s.objective = schedule_cost(instance, s.choice);
  if (stated && *stated != s.objective)
    throw TextFormatError("stated objective " + std::to_string(*stated) + " differs from recomputed " +
                          std::to_string(s.objective));
  return s;
}

void write_option_table(std::ostream& out, const SchedulingInstance& instance) {
  for (const auto& r : instance.requests) {
    out << "request " << r.id << " home=" << r.home << " video=" << r.variant.video << " level=" << r.variant.level
        << '\n';
    for (const auto& o : enumerate_options(r, instance)) {
      out << "  " << to_string(o.decision.kind) << " source=" << o.decision.source;
      if (o.decision.from_level) out << " from=" << o.decision.from_level;
      out << " cost=" << o.cost;
      if (o.site) out << " site=" << o.site << " load=" << o.load;
      out << '\n';
    }
  }
}

}  // namespace edgevid
