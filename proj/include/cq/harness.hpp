#pragma once

// End-to-end wiring: source -> routing -> cascade -> RMW engine -> command
// scheduler -> arbiter -> memory, plus metrics, dumps and parameter sweeps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cq/conflation.hpp"
#include "cq/datapath.hpp"
#include "cq/memory.hpp"
#include "cq/source.hpp"
#include "cq/stats.hpp"

namespace cq {

/// Output files; an empty path disables that dump.
struct DumpPaths {
  std::string memory_csv;         // key,master,shadow
  std::string metrics_json;
  std::string snapshot_csv;       // key,count of the last completed snapshot
  std::string oracle_json;
  std::string stage_trace_csv;    // cycle,stage,in_valid,in_key,out_valid,out_key,matched,admitted
  std::string command_trace_csv;  // user_tick,lane,kind,address,data_master,data_shadow
  std::string input_trace_bin;    // packed words of every consumed input slot
};

struct RunConfig {
  LayoutConfig layout;
  ScheduleConfig schedule = ScheduleConfig::standard();
  MemoryConfig memory;
  SourceSpec source;
  int block_size = 16;
  std::vector<std::uint64_t> snapshot_script;  // app cycles at which a snapshot starts
  DumpPaths dumps;
  std::uint64_t max_cycles = 0;                 // 0: no limit
  std::uint64_t conservation_interval = 4096;   // 0: never
};

/// Throws ConfigError (or OverflowingLayout) for an unusable configuration.
/// Returns warnings for legal but questionable settings.
std::vector<std::string> validate_run(const RunConfig& config);

struct Metrics {
  std::uint64_t cycles = 0;
  std::uint64_t events_in = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t conflations = 0;
  std::uint64_t stalls = 0;
  std::uint64_t touches = 0;  // zero-increment merge updates injected by snapshots
  std::uint64_t hazards = 0;
  std::uint64_t duplicate_pending = 0;
  std::uint64_t snapshots = 0;
  std::uint64_t source_exhausted_cycle = 0;  // first cycle with no source input left
  double effective_rate = 0.0;
  double comparisons_per_second_equivalent = 0.0;
  double peak_demand_mts = 0.0;
  double peak_rate = 0.0;  // memory transactions per second
  MemoryMetrics memory;
};

struct RunResult {
  Metrics metrics;
  std::optional<OracleReport> oracle;
  std::vector<SnapshotTable> snapshots;
  std::map<Key, StoredCounter> storage;
  std::vector<std::string> warnings;
};

struct RunOptions {
  bool oracle_check = false;
};

RunResult run_sim(const RunConfig& config, const RunOptions& options = {});
/// Runs already-generated events instead of `config.source`.
RunResult run_events(const RunConfig& config, const EventStream& events,
                     const RunOptions& options = {});

struct SweepRow {
  std::size_t index = 0;
  bool ok = false;
  std::string error;
  Metrics metrics;
  bool oracle_ok = true;
};

/// Runs every config independently, concurrently where possible. Rows come
/// back in config order. A failing run is recorded in its row.
std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, const RunOptions& options = {},
                            unsigned max_parallel = 0);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes memory dump CSV (key,master,shadow).
void write_memory_csv(const std::string& path, const std::map<Key, StoredCounter>& storage);
void write_snapshot_csv(const std::string& path, const SnapshotTable& table);

}  // namespace cq
