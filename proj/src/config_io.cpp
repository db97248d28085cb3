#include "cq/config_io.hpp"

#include <fstream>
#include <set>

#include "cq/errors.hpp"

namespace cq {

namespace {

// Reads the fields of one JSON object, rejecting unknown names.
class Fields {
 public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  ~Fields() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where_ + ": unknown field '" + k + "'");
  }

  template <class T>
  void get(const char* name, T& out) {
    seen_.insert(name);
    const auto it = j_.find(name);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(where_ + "." + name + ": " + e.what());
    }
  }

  const Json* sub(const char* name) {
    seen_.insert(name);
    const auto it = j_.find(name);
    return it == j_.end() ? nullptr : &*it;
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_layout(const Json& j, LayoutConfig& l) {
  Fields f(j, "layout");
  f.get("key_bits", l.key_bits);
  f.get("value_bits", l.value_bits);
  f.get("lanes", l.lanes);
  f.get("bus_bits", l.bus_bits);
}

void read_schedule(const Json& j, ScheduleConfig& s) {
  Fields f(j, "schedule");
  if (const Json* st = f.sub("stages")) {
    if (!st->is_array()) throw ConfigError("schedule.stages: expected an array");
    s.stages.clear();
    for (const auto& e : *st) {
      StageConfig c;
      Fields g(e, "schedule.stages[]");
      g.get("gap_in", c.gap_in);
      g.get("matchers", c.matchers);
      s.stages.push_back(c);
    }
  }
}

void read_memory(const Json& j, MemoryConfig& m) {
  Fields f(j, "memory");
  f.get("user_clock_hz", m.user_clock_hz);
  f.get("app_clock_hz", m.app_clock_hz);
  f.get("lanes_per_user_tick", m.lanes_per_user_tick);
  f.get("banks", m.banks);
  f.get("bank_cycle_ticks", m.bank_cycle_ticks);
  f.get("turnaround_ticks", m.turnaround_ticks);
  f.get("base_read_latency_app_cycles", m.base_read_latency_app_cycles);
  f.get("refresh_interval_ticks", m.refresh_interval_ticks);
  f.get("refresh_penalty_ticks", m.refresh_penalty_ticks);
}

void read_source(const Json& j, SourceSpec& s) {
  Fields f(j, "source");
  std::string kind = to_string(s.kind);
  f.get("kind", kind);
  s.kind = source_kind_from_string(kind);
  f.get("key_space", s.key_space);
  f.get("count", s.count);
  f.get("seed", s.seed);
  f.get("exponent", s.exponent);
  f.get("key", s.key);
  f.get("period", s.period);
  f.get("width", s.width);
  f.get("path", s.path);
  f.get("duty", s.duty);
}

void read_dumps(const Json& j, DumpPaths& d) {
  Fields f(j, "dumps");
  f.get("memory_csv", d.memory_csv);
  f.get("metrics_json", d.metrics_json);
  f.get("snapshot_csv", d.snapshot_csv);
  f.get("oracle_json", d.oracle_json);
  f.get("stage_trace_csv", d.stage_trace_csv);
  f.get("command_trace_csv", d.command_trace_csv);
  f.get("input_trace_bin", d.input_trace_bin);
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  Fields f(j, "config");
  if (const Json* s = f.sub("layout")) read_layout(*s, c.layout);
  if (const Json* s = f.sub("schedule")) read_schedule(*s, c.schedule);
  if (const Json* s = f.sub("memory")) read_memory(*s, c.memory);
  if (const Json* s = f.sub("source")) read_source(*s, c.source);
  if (const Json* s = f.sub("dumps")) read_dumps(*s, c.dumps);
  f.get("block_size", c.block_size);
  f.get("snapshot_script", c.snapshot_script);
  f.get("max_cycles", c.max_cycles);
  f.get("conservation_interval", c.conservation_interval);
  return c;
}

Json to_json(const RunConfig& c) {
  Json stages = Json::array();
  for (const auto& s : c.schedule.stages) stages.push_back({{"gap_in", s.gap_in}, {"matchers", s.matchers}});
  const auto& m = c.memory;
  const auto& s = c.source;
  const auto& d = c.dumps;
  return {
      {"layout",
       {{"key_bits", c.layout.key_bits},
        {"value_bits", c.layout.value_bits},
        {"lanes", c.layout.lanes},
        {"bus_bits", c.layout.bus_bits}}},
      {"schedule", {{"stages", stages}}},
      {"memory",
       {{"user_clock_hz", m.user_clock_hz},
        {"app_clock_hz", m.app_clock_hz},
        {"lanes_per_user_tick", m.lanes_per_user_tick},
        {"banks", m.banks},
        {"bank_cycle_ticks", m.bank_cycle_ticks},
        {"turnaround_ticks", m.turnaround_ticks},
        {"base_read_latency_app_cycles", m.base_read_latency_app_cycles},
        {"refresh_interval_ticks", m.refresh_interval_ticks},
        {"refresh_penalty_ticks", m.refresh_penalty_ticks}}},
      {"source",
       {{"kind", to_string(s.kind)},
        {"key_space", s.key_space},
        {"count", s.count},
        {"seed", s.seed},
        {"exponent", s.exponent},
        {"key", s.key},
        {"period", s.period},
        {"width", s.width},
        {"path", s.path},
        {"duty", s.duty}}},
      {"block_size", c.block_size},
      {"snapshot_script", c.snapshot_script},
      {"dumps",
       {{"memory_csv", d.memory_csv},
        {"metrics_json", d.metrics_json},
        {"snapshot_csv", d.snapshot_csv},
        {"oracle_json", d.oracle_json},
        {"stage_trace_csv", d.stage_trace_csv},
        {"command_trace_csv", d.command_trace_csv},
        {"input_trace_bin", d.input_trace_bin}}},
      {"max_cycles", c.max_cycles},
      {"conservation_interval", c.conservation_interval},
  };
}

Json to_json(const Metrics& m) {
  const auto& mm = m.memory;
  return {
      {"cycles", m.cycles},
      {"events_in", m.events_in},
      {"reads", m.reads},
      {"writes", m.writes},
      {"conflations", m.conflations},
      {"stalls", m.stalls},
      {"touches", m.touches},
      {"hazards", m.hazards},
      {"duplicate_pending", m.duplicate_pending},
      {"snapshots", m.snapshots},
      {"source_exhausted_cycle", m.source_exhausted_cycle},
      {"effective_rate", m.effective_rate},
      {"comparisons_per_second_equivalent", m.comparisons_per_second_equivalent},
      {"peak_demand_mts", m.peak_demand_mts},
      {"peak_rate", m.peak_rate},
      {"user_ticks", mm.user_ticks},
      {"completed_reads", mm.completed_reads},
      {"completed_writes", mm.completed_writes},
      {"turnaround_count", mm.turnaround_count},
      {"refresh_stall_ticks", mm.refresh_stall_ticks},
      {"rejected", mm.rejected},
  };
}

Json to_json(const OracleReport& r) {
  Json mism = Json::array();
  for (const auto& x : r.mismatches)
    mism.push_back({{"key", x.key}, {"memory", x.memory}, {"in_flight", x.in_flight}, {"expected", x.expected}});
  return {{"ok", r.ok()}, {"keys_checked", r.keys_checked}, {"mismatches", mism}};
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(read_file(path)); }

std::vector<RunConfig> sweep_configs_from_json(const Json& j) {
  std::vector<RunConfig> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(run_config_from_json(e));
  } else if (j.is_object()) {
    const Json base = j.value("base", Json::object());
    const auto runs = j.find("runs");
    if (runs == j.end() || !runs->is_array()) throw ConfigError("sweep: 'runs' must be an array");
    for (const auto& key : j.items())
      if (key.key() != "base" && key.key() != "runs")
        throw ConfigError("sweep: unknown field '" + key.key() + "'");
    for (const auto& r : *runs) {
      Json merged = base;
      merged.merge_patch(r);
      out.push_back(run_config_from_json(merged));
    }
  } else {
    throw ConfigError("sweep: expected an array or an object");
  }
  if (out.empty()) throw ConfigError("sweep needs at least one config");
  return out;
}

std::vector<RunConfig> load_sweep_configs(const std::string& path) {
  return sweep_configs_from_json(read_file(path));
}

}  // namespace cq
