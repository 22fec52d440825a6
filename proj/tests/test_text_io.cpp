#include <sstream>

#include "doctest.h"

#include "edgevid/instances.hpp"
#include "edgevid/text_io.hpp"

using namespace edgevid;

TEST_CASE("milli decimals are exact") {
  CHECK(format_milli(0) == "0.000");
  CHECK(format_milli(12345) == "12.345");
  CHECK(format_milli(-5) == "-0.005");
  CHECK(format_milli(1'000) == "1.000");
  CHECK(format_milli(std::numeric_limits<std::int64_t>::min()) == "-9223372036854775.808");
  for (std::int64_t x : {0LL, 1LL, -1LL, 999LL, 123456789012345LL, -42000LL})
    CHECK(parse_milli(format_milli(x)) == x);
  CHECK(parse_milli("12.3") == 12300);
  CHECK(parse_milli("7") == 7000);
  CHECK_THROWS_AS(parse_milli("1.2345"), TextFormatError);
  CHECK_THROWS_AS(parse_milli("abc"), TextFormatError);
}

TEST_CASE("shortest doubles round-trip") {
  for (double x : {0.1, 7.5, 1.0 / 3.0, 1e-300, 123456.789})
    CHECK(std::stod(format_shortest(x)) == x);
  CHECK(format_shortest(0.2) == "0.2");
  CHECK(format_fixed(0.5, 3) == "0.500");
}

TEST_CASE("trace round trip") {
  WorkloadParams w;
  w.requests_per_server = 200;
  const auto trace = generate_trace(w, 4);
  std::stringstream s;
  write_trace(s, trace);
  const auto back = read_trace(s, 600.0);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(back[i].id == trace[i].id);
    CHECK(back[i].home == trace[i].home);
    CHECK(back[i].variant == trace[i].variant);
    CHECK(back[i].arrival_time == trace[i].arrival_time);
    CHECK(back[i].duration == 600.0);
  }
}

TEST_CASE("trace parse errors carry the line") {
  std::istringstream bad("arrival_time_s,server,video,level\n1.0,1,2\n");
  try {
    read_trace(bad, 1.0);
    FAIL("expected an error");
  } catch (const TextFormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream unsorted("2,1,1,1\n1,1,1,1\n");
  CHECK_THROWS_AS(read_trace(unsorted, 1.0), TextFormatError);
}

TEST_CASE("decision log round trip") {
  RunConfig rc;
  rc.workload.requests_per_server = 300;
  rc.cache_capacity = rc.catalog.library_size() / 5;
  rc.proc_capacity = 10'000'000;
  rc.record_log = true;
  const auto result = run(rc);
  std::stringstream s;
  write_decision_log(s, result.log);
  const std::string text = s.str();
  CHECK(text.rfind("request_id,time,server,video,level,decision_type,source,from_level,transcode_site,cost,delay_ms,"
                   "origin_bytes\n",
                   0) == 0);
  const auto back = read_decision_log(s);
  CHECK(back == result.log);
}

TEST_CASE("instance and schedule round trip") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const SchedulingInstance inst = random_instance(seed);
    std::stringstream s;
    write_instance(s, inst);
    const SchedulingInstance back = read_instance(s);
    std::stringstream again;
    write_instance(again, back);
    std::stringstream first;
    write_instance(first, inst);
    CHECK(again.str() == first.str());

    const Schedule sched = solve_bnb(inst);
    std::stringstream ss;
    write_schedule(ss, inst, sched);
    const Schedule read = read_schedule(ss, back);
    CHECK(read.objective == sched.objective);
    CHECK(read.decisions == sched.decisions);
    CHECK(read.choice == sched.choice);
  }
}

TEST_CASE("schedule reader rejects inconsistent input") {
  const SchedulingInstance inst = random_instance(3);
  const Schedule sched = solve_bnb(inst);
  std::stringstream good;
  write_schedule(good, inst, sched);
  std::string text = good.str();

  std::istringstream wrong_objective("objective " + std::to_string(sched.objective + 1) +
                                     text.substr(text.find('\n')));
  CHECK_THROWS_AS(read_schedule(wrong_objective, inst), TextFormatError);

  std::istringstream missing("objective 0\n");
  if (!inst.requests.empty()) CHECK_THROWS_AS(read_schedule(missing, inst), TextFormatError);

  std::istringstream unknown("decision 999 origin_fetch 0 0\n");
  CHECK_THROWS_AS(read_schedule(unknown, inst), TextFormatError);
}

TEST_CASE("instance reader errors") {
  std::istringstream no_header("capacity 1 5\n");
  CHECK_THROWS_AS(read_instance(no_header), TextFormatError);
  std::istringstream no_end("instance 1 1\ncapacity 1 5\nlevel 1 10 1\nlocal 1 5\norigin 1 100\n");
  CHECK_THROWS_AS(read_instance(no_end), TextFormatError);
  std::istringstream bad_topology("instance 1 1\ncapacity 1 5\nlevel 1 10 1\nlocal 1 500\norigin 1 100\nend\n");
  CHECK_THROWS_AS(read_instance(bad_topology), TextFormatError);
  std::istringstream junk("instance 1 1\nwhat 1\nend\n");
  CHECK_THROWS_AS(read_instance(junk), TextFormatError);
}

TEST_CASE("option table lists every option") {
  const SchedulingInstance inst = random_instance(5);
  std::ostringstream out;
  write_option_table(out, inst);
  std::size_t origin_lines = 0;
  for (std::size_t p = out.str().find("origin_fetch"); p != std::string::npos; p = out.str().find("origin_fetch", p + 1))
    ++origin_lines;
  CHECK(origin_lines == inst.requests.size());
}
