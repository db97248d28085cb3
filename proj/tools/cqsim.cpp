// cqsim: run, sweep and estimate from the command line.
//
// Exit codes: 0 success, 1 verification or runtime failure, 2 bad config.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cq/config_io.hpp"
#include "cq/errors.hpp"
#include "cq/estimator.hpp"
#include "cq/harness.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int to_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw cq::ConfigError(std::string("bad ") + what + " '" + s + "'");
  return v;
}

cq::LayoutConfig parse_layout(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw cq::ConfigError("--layout expects key_bits,value_bits");
  cq::LayoutConfig l;
  l.key_bits = to_int(parts[0], "key_bits");
  l.value_bits = to_int(parts[1], "value_bits");
  return l;
}

cq::ScheduleConfig parse_schedule(const std::string& s) {
  cq::ScheduleConfig sc;
  for (const auto& st : split(s, ',')) {
    const auto gm = split(st, ':');
    if (gm.size() != 2) throw cq::ConfigError("--schedule expects gap:matchers[,gap:matchers...]");
    sc.stages.push_back({to_int(gm[0], "gap_in"), to_int(gm[1], "matchers")});
  }
  return sc;
}

int cmd_run(const std::string& config_path, bool oracle_check, const std::string& trace_dir) {
  cq::RunConfig cfg = cq::load_run_config(config_path);
  if (!trace_dir.empty()) {
    std::filesystem::create_directories(trace_dir);
    const std::filesystem::path dir(trace_dir);
    cfg.dumps.stage_trace_csv = (dir / "stages.csv").string();
    cfg.dumps.command_trace_csv = (dir / "commands.csv").string();
    cfg.dumps.input_trace_bin = (dir / "input.bin").string();
    if (cfg.dumps.memory_csv.empty()) cfg.dumps.memory_csv = (dir / "memory.csv").string();
    if (cfg.dumps.snapshot_csv.empty() && !cfg.snapshot_script.empty())
      cfg.dumps.snapshot_csv = (dir / "snapshot.csv").string();
  }
  const cq::RunResult r = cq::run_sim(cfg, {oracle_check});
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  cq::Json out = cq::to_json(r.metrics);
  if (r.oracle) out["oracle"] = cq::to_json(*r.oracle);
  std::cout << out.dump(2) << '\n';
  return r.oracle && !r.oracle->ok() ? 1 : 0;
}

int cmd_sweep(const std::string& path, bool oracle_check) {
  const auto configs = cq::load_sweep_configs(path);
  const auto rows = cq::sweep(configs, {oracle_check});
  std::cout << cq::sweep_csv(rows);
  for (const auto& row : rows)
    if (!row.ok) return 1;
  return 0;
}

int cmd_estimate(const std::string& layout, const std::string& schedule, int w, int limit, bool json) {
  const auto l = parse_layout(layout);
  const auto s = parse_schedule(schedule);
  cq::validate_schedule(s);
  const auto t = cq::compare_report(l, s, w, limit);
  if (!json) {
    std::cout << cq::format_table(t);
    return 0;
  }
  cq::Json rows = cq::Json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"option", r.option},
                    {"luts", r.cost.luts},
                    {"ffs", r.cost.ffs},
                    {"dsps", r.cost.dsps},
                    {"brams", r.cost.brams},
                    {"cited", r.cited},
                    {"notes", r.cost.notes}});
  const cq::Json out = {{"rows", rows},
                        {"luts_per_dsp", t.luts_per_dsp},
                        {"ffs_per_dsp", t.ffs_per_dsp},
                        {"overhead_factor", t.overhead_factor}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conflation queue simulator"};
  app.require_subcommand(1);

  std::string config_path, trace_dir, sweep_path;
  bool oracle_check = false, sweep_oracle = false;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("--config", config_path, "run config (JSON)")->required();
  run->add_flag("--oracle-check", oracle_check, "compare memory with the sequential histogram");
  run->add_option("--trace-dir", trace_dir, "write stage, command and input traces here");

  auto* sw = app.add_subcommand("sweep", "simulate many configurations");
  sw->add_option("--configs", sweep_path, "sweep file (JSON)")->required();
  sw->add_flag("--oracle-check", sweep_oracle, "verify every run");

  std::string layout = "24,10", schedule = "0:6,6:244";
  int w = 5, limit = 42;
  bool json = false;
  auto* est = app.add_subcommand("estimate", "resource estimates");
  est->add_option("--layout", layout, "key_bits,value_bits");
  est->add_option("--schedule", schedule, "gap:matchers,...");
  est->add_option("--slice-width", w, "RAM-CAM slice width");
  est->add_option("--segment-limit", limit, "DSP cascade segment length");
  est->add_flag("--json", json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path, oracle_check, trace_dir);
    if (*sw) return cmd_sweep(sweep_path, sweep_oracle);
    if (*est) return cmd_estimate(layout, schedule, w, limit, json);
  } catch (const cq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cq::TraceParseError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
    return 2;
  } catch (const cq::OverflowingLayout& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
