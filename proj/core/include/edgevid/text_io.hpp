// Line-oriented text formats: traces, decision logs, scheduling instances
// and schedules. Readers throw TextFormatError with the offending line.
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgevid/engine.hpp"
#include "edgevid/offline.hpp"

namespace edgevid {

class TextFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that reads back to the same double.
std::string format_shortest(double x);
std::string format_fixed(double x, int decimals);
/// Integer thousandths as an exact decimal, e.g. 12345 -> "12.345".
std::string format_milli(std::int64_t thousandths);
std::int64_t parse_milli(std::string_view text);

/// `arrival_time_s,server,video,level` per line after a header.
void write_trace(std::ostream& out, const std::vector<Request>& trace);
/// Ids are assigned 0..n-1 in file order; every request lasts `duration_s`.
std::vector<Request> read_trace(std::istream& in, double duration_s);

/// CSV with columns request_id,time,server,video,level,decision_type,source,
/// from_level,transcode_site,cost,delay_ms,origin_bytes. Cost is in byte*ms
/// and delay in ms, both written exactly.
void write_decision_log(std::ostream& out, const std::vector<DecisionRecord>& log);
std::vector<DecisionRecord> read_decision_log(std::istream& in);

void write_instance(std::ostream& out, const SchedulingInstance& instance);
SchedulingInstance read_instance(std::istream& in);

void write_schedule(std::ostream& out, const SchedulingInstance& instance, const Schedule& schedule);
/// Maps each decision back to its option index; the objective is recomputed
/// and must match the stated one.
Schedule read_schedule(std::istream& in, const SchedulingInstance& instance);

/// Human-readable option list per request (debugging aid).
void write_option_table(std::ostream& out, const SchedulingInstance& instance);

}  // namespace edgevid
