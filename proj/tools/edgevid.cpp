// edgevid: run, sweep, validate and trace the edge caching simulator.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgevid/config.hpp"
#include "edgevid/engine.hpp"
#include "edgevid/instances.hpp"
#include "edgevid/offline.hpp"
#include "edgevid/sweep.hpp"
#include "edgevid/text_io.hpp"

namespace fs = std::filesystem;
using namespace edgevid;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> settings;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;
  int workers = -1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "Experiment config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.settings, "Override a config key, e.g. --set cache_fraction=0.3")
      ->type_name("KEY=VALUE")
      ->allow_extra_args(false);
  cmd->add_option("-p,--policy", o.policies, "Policies to run (jccp, cachepro, cocache, offline)")
      ->allow_extra_args(false);
  cmd->add_option("-s,--seed", o.seeds, "Seeds to run")->allow_extra_args(false);
}

// File first, then --set in order, then the dedicated flags.
ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig c = o.config_path.empty() ? parse_config("") : parse_config_file(o.config_path);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.policies.empty()) {
    c.policies.clear();
    for (const auto& name : o.policies) {
      const auto p = parse_policy(name);
      if (!p) throw ConfigError("unknown policy '" + name + "'; valid policies: " + std::string(policy_names()));
      c.policies.push_back(*p);
    }
  }
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.workers >= 0) c.workers = o.workers;
  c.validate();
  return c;
}

// Explicit path, else the config's output key, else `fallback` inside
// $EDGEVID_OUTPUT_DIR. Relative paths are taken inside $EDGEVID_OUTPUT_DIR
// when it is set. Empty means stdout.
std::string output_path(const std::string& flag, const std::string& from_config, const char* fallback) {
  const char* dir = std::getenv("EDGEVID_OUTPUT_DIR");
  std::string path = !flag.empty() ? flag : from_config;
  if (path.empty()) {
    if (!dir || !*dir || !fallback) return {};
    path = fallback;
  }
  if (path == "-") return {};
  fs::path p(path);
  if (p.is_relative() && dir && *dir && flag.empty()) p = fs::path(dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

template <typename F>
void with_output(const std::string& path, F&& f) {
  if (path.empty()) {
    f(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  f(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void require_single_point(const ExperimentConfig& c, const char* verb) {
  if (c.axis != SweepAxis::none)
    throw ConfigError(std::string(verb) + " runs a single point; '" + std::string(sweep_key(c.axis)) +
                      "' is a list (use sweep)");
}

int cmd_run(const CommonOptions& o) {
  ExperimentConfig c = resolve(o);
  require_single_point(c, "run");
  if (o.seeds.empty()) c.seeds.resize(1);
  c.check_invariants = true;
  const SweepResult result = run_sweep(c);

  std::cout << std::left << std::setw(10) << "policy" << std::right << std::setw(6) << "seed" << std::setw(11)
            << "hit_ratio" << std::setw(14) << "avg_delay_ms" << std::setw(13) << "external_TB" << std::setw(24)
            << "backhaul_cost" << std::setw(11) << "proc_util" << '\n';
  for (const auto& r : result.rows) {
    std::cout << std::left << std::setw(10) << to_string(r.policy) << std::right << std::setw(6) << r.seed;
    if (!r.ok) {
      std::cout << "  error: " << r.error << '\n';
      continue;
    }
    const auto& m = r.metrics;
    std::cout << std::setw(11) << format_fixed(m.hit_ratio, 4) << std::setw(14) << format_fixed(m.avg_access_delay_ms, 3)
              << std::setw(13) << format_fixed(m.external_traffic_tb(), 4) << std::setw(24)
              << format_milli(m.total_backhaul_cost) << std::setw(11) << format_fixed(m.mean_processing_utilization, 4)
              << '\n';
  }
  return result.error_count() == 0 ? 0 : 1;
}

int cmd_sweep(const CommonOptions& o, const std::string& out_flag, bool quiet) {
  const ExperimentConfig c = resolve(o);
  const std::string path = output_path(out_flag, c.output, "sweep.csv");
  SweepProgress progress;
  if (!quiet) {
    progress = [](const SweepRow& r, std::size_t done, std::size_t total) {
      std::cerr << '[' << done << '/' << total << "] " << to_string(r.policy) << " seed=" << r.seed;
      if (r.axis_value) std::cerr << " value=" << format_shortest(*r.axis_value);
      if (!r.ok) std::cerr << " error: " << r.error;
      std::cerr << '\n';
    };
  }
  const SweepResult result = run_sweep(c, progress);
  with_output(path, [&](std::ostream& out) { write_csv(out, result); });
  if (!path.empty() && !quiet) std::cerr << "wrote " << path << '\n';
  return result.error_count() == 0 ? 0 : 1;
}

int cmd_trace(const CommonOptions& o, const std::string& out_flag, const std::string& export_trace,
              const std::string& import_trace) {
  ExperimentConfig c = resolve(o);
  require_single_point(c, "trace");
  if (c.policies.size() != 1) throw ConfigError("trace needs exactly one policy (use --policy)");
  RunConfig rc = make_run_config(c, c.policies.front(), c.seeds.front());
  rc.record_log = true;
  if (!import_trace.empty()) {
    std::ifstream in(import_trace);
    if (!in) throw std::runtime_error("cannot read '" + import_trace + "'");
    rc.trace = read_trace(in, rc.catalog.video_length_s());
  }
  if (!export_trace.empty()) {
    std::ofstream out(export_trace);
    if (!out) throw std::runtime_error("cannot write '" + export_trace + "'");
    write_trace(out, rc.trace ? *rc.trace : generate_trace(rc.workload, rc.seed));
  }
  const RunResult result = run(rc);
  with_output(output_path(out_flag, {}, "decisions.csv"),
              [&](std::ostream& out) { write_decision_log(out, result.log); });
  return 0;
}

struct ValidateOptions {
  int instances = 200;
  std::uint64_t seed = 1;
  int requests_per_server = 1000;
  std::string instance_path;
};

// Recomputes each logged cost from sizes and delays alone.
Cost replay_cost(const std::vector<DecisionRecord>& log, const Catalog& catalog, const Topology& topology) {
  Cost total = 0;
  for (const auto& d : log) {
    if (d.decision.kind == DecisionKind::local_hit || d.decision.kind == DecisionKind::local_transcode) continue;
    total += catalog.variant_size(d.variant.level) * topology.delay_us(d.server, d.decision.source);
  }
  return total;
}

int cmd_validate(const ValidateOptions& v) {
  if (!v.instance_path.empty()) {
    std::ifstream in(v.instance_path);
    if (!in) throw std::runtime_error("cannot read '" + v.instance_path + "'");
    const SchedulingInstance inst = read_instance(in);
    write_option_table(std::cout, inst);
    BnbStats stats;
    const Schedule s = solve_bnb(inst, &stats);
    std::cout << "# branch and bound: " << stats.nodes << " nodes, root bound " << stats.root_bound << '\n';
    write_schedule(std::cout, inst, s);
    return schedule_feasible(inst, s) ? 0 : 1;
  }

  bool all_ok = true;
  auto report = [&](bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    all_ok = all_ok && ok;
  };

  int mismatches = 0;
  int infeasible = 0;
  for (int i = 0; i < v.instances; ++i) {
    const SchedulingInstance inst = random_instance(v.seed + static_cast<std::uint64_t>(i));
    const Schedule exact = solve_exhaustive(inst);
    const Schedule bnb = solve_bnb(inst);
    if (bnb.objective != exact.objective) ++mismatches;
    if (!schedule_feasible(inst, bnb)) ++infeasible;
  }
  report(mismatches == 0 && infeasible == 0, "solver",
         std::to_string(v.instances) + " random instances, " + std::to_string(mismatches) + " objective mismatches, " +
             std::to_string(infeasible) + " infeasible schedules");

  ExperimentConfig c;
  c.requests_per_server = v.requests_per_server;
  for (PolicyKind p : {PolicyKind::jccp, PolicyKind::cachepro, PolicyKind::cocache, PolicyKind::offline}) {
    RunConfig rc = make_run_config(c, p, v.seed);
    rc.check_invariants = true;
    rc.record_log = true;
    try {
      const RunResult r = run(rc);
      const Cost replayed = replay_cost(r.log, rc.catalog, r.topology);
      report(replayed == r.metrics.total_backhaul_cost, std::string("engine ") + std::string(to_string(p)),
             "invariants held over " + std::to_string(r.metrics.requests) + " requests; logged cost " +
                 format_milli(r.metrics.total_backhaul_cost) + " byte*ms, replayed " + format_milli(replayed));
    } catch (const std::exception& e) {
      report(false, std::string("engine ") + std::string(to_string(p)), e.what());
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge video caching and transcoding simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, trace_opts;
  std::string sweep_out, trace_out, export_trace, import_trace;
  bool quiet = false;
  ValidateOptions validate_opts;

  auto* run_cmd = app.add_subcommand("run", "Run each configured policy once and print its metrics");
  add_common(run_cmd, run_opts);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every (policy, sweep value, seed) point and write CSV");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("-o,--output", sweep_out, "CSV path ('-' for stdout)");
  sweep_cmd->add_option("-j,--workers", sweep_opts.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_flag("-q,--quiet", quiet, "No progress on stderr");

  auto* trace_cmd = app.add_subcommand("trace", "Write the per-request decision log of one run");
  add_common(trace_cmd, trace_opts);
  trace_cmd->add_option("-o,--output", trace_out, "Decision log path ('-' for stdout)");
  trace_cmd->add_option("--export-trace", export_trace, "Also write the request trace here");
  trace_cmd->add_option("--import-trace", import_trace, "Replay this request trace instead of generating one")
      ->check(CLI::ExistingFile);

  auto* validate_cmd = app.add_subcommand("validate", "Cross-check the solvers and engine invariants");
  validate_cmd->add_option("-n,--instances", validate_opts.instances, "Random solver instances")
      ->check(CLI::NonNegativeNumber);
  validate_cmd->add_option("-s,--seed", validate_opts.seed, "First seed");
  validate_cmd->add_option("--requests-per-server", validate_opts.requests_per_server,
                           "Requests per server in the engine checks")
      ->check(CLI::PositiveNumber);
  validate_cmd->add_option("--instance", validate_opts.instance_path, "Solve one instance file and print the schedule")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, sweep_out, quiet);
    if (*trace_cmd) return cmd_trace(trace_opts, trace_out, export_trace, import_trace);
    if (*validate_cmd) return cmd_validate(validate_opts);
  } catch (const std::exception& e) {
    std::cerr << "edgevid: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
