#include "cq/harness.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "cq/config_io.hpp"
#include "cq/errors.hpp"
#include "cq/rmw.hpp"

namespace cq {

std::vector<std::string> validate_run(const RunConfig& c) {
  validate_layout(c.layout);
  validate_schedule(c.schedule);
  validate_memory(c.memory);
  if (c.block_size < 1) throw ConfigError("block_size must be >= 1");
  if (c.source.key_space == 0) throw ConfigError("key_space must be >= 1");
  if (c.source.key_space > c.layout.key_limit())
    throw ConfigError("key_space " + std::to_string(c.source.key_space) + " exceeds the " +
                      std::to_string(c.layout.key_bits) + "-bit key field");
  if (!c.snapshot_script.empty() && c.layout.lanes < 2)
    throw ConfigError("snapshots need the shadow lane (lanes = 2)");

  std::vector<std::string> warnings;
  const Cascade probe(c.schedule, c.layout);
  if (static_cast<std::uint64_t>(probe.latency()) < c.memory.base_read_latency_app_cycles)
    warnings.push_back("cascade latency " + std::to_string(probe.latency()) +
                       " is below the read latency " +
                       std::to_string(c.memory.base_read_latency_app_cycles) +
                       " app cycles; expect stalls");
  return warnings;
}

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  return os;
}

const char* kind_name(OpKind k) { return k == OpKind::read ? "R" : "W"; }

}  // namespace

void write_memory_csv(const std::string& path, const std::map<Key, StoredCounter>& storage) {
  auto os = open_out(path);
  os << "key,master,shadow\n";
  for (const auto& [k, v] : storage) os << k << ',' << v.master << ',' << v.shadow << '\n';
}

void write_snapshot_csv(const std::string& path, const SnapshotTable& table) {
  auto os = open_out(path);
  os << "key,count\n";
  for (const auto& [k, v] : table) os << k << ',' << v << '\n';
}

RunResult run_sim(const RunConfig& config, const RunOptions& options) {
  return run_events(config, gen_events(config.source), options);
}

RunResult run_events(const RunConfig& cfg, const EventStream& events, const RunOptions& options) {
  RunResult res;
  res.warnings = validate_run(cfg);
  for (const auto& e : events)
    if (e && *e >= cfg.source.key_space)
      throw ConfigError("event key " + std::to_string(*e) + " outside the key space");

  Cascade cascade(cfg.schedule, cfg.layout);
  RmwEngine engine;
  CommandScheduler sched(cfg.block_size);
  MemoryModel mem(cfg.memory);
  SnapshotController snap(cfg.source.key_space, cascade.latency());
  OracleHistogram oracle;

  std::vector<std::uint64_t> script = cfg.snapshot_script;
  std::sort(script.begin(), script.end());
  std::size_t script_i = 0;

  const auto& d = cfg.dumps;
  std::ofstream stage_os, cmd_os;
  if (!d.stage_trace_csv.empty()) {
    stage_os = open_out(d.stage_trace_csv);
    stage_os << "cycle,stage,in_valid,in_key,out_valid,out_key,matched,admitted\n";
  }
  if (!d.command_trace_csv.empty()) {
    cmd_os = open_out(d.command_trace_csv);
    cmd_os << "user_tick,lane,kind,address,data_master,data_shadow\n";
  }
  std::vector<PackedWord> input_words;
  const bool keep_inputs = !d.input_trace_bin.empty();

  Metrics& m = res.metrics;
  std::uint64_t master_routed = 0;
  std::uint64_t committed_master = 0;
  std::size_t src_i = 0;
  bool exhausted = events.empty();
  std::uint64_t next_tick = 0;
  std::uint64_t snapshots_seen = 0;

  using u128 = unsigned __int128;
  const u128 app_hz = cfg.memory.app_clock_hz;
  const u128 user_hz = cfg.memory.user_clock_hz;
  const auto lanes = static_cast<std::size_t>(cfg.memory.lanes_per_user_tick);

  for (std::uint64_t c = 0;; ++c) {
    if (cfg.max_cycles != 0 && c >= cfg.max_cycles)
      throw InternalConsistency("run did not drain within " + std::to_string(cfg.max_cycles) +
                                " cycles");

    for (const auto& r : mem.collect_replies(c)) {
      if (r.source == Requester::app)
        engine.deliver(r);
      else
        snap.on_reply(r);
    }
    while (script_i < script.size() && script[script_i] <= c) {
      snap.start(master_routed);
      ++script_i;
    }
    snap.update(committed_master);
    if (snap.completed() != snapshots_seen) {
      snapshots_seen = snap.completed();
      res.snapshots.push_back(snap.table());
    }

    if (engine.blocks(cascade.exiting())) {
      ++m.stalls;
    } else {
      Slot in;
      if (auto touch = snap.next_touch()) {
        in = *touch;
      } else if (src_i < events.size()) {
        if (const auto& e = events[src_i++]) {
          in = route_event(*e, snap.phase());
          ++m.events_in;
          oracle.add(*e);
          if (snap.idle()) ++master_routed;
        }
        if (src_i == events.size() && !exhausted) {
          exhausted = true;
          m.source_exhausted_cycle = c + 1;
        }
      }
      if (keep_inputs) input_words.push_back(pack_slot(in, cfg.layout));

      const CascadeOutput out = cascade.step(in);
      m.conflations += static_cast<std::uint64_t>(out.conflations);
      m.hazards += static_cast<std::uint64_t>(out.hazards);
      if (stage_os.is_open()) {
        const auto ins = cascade.last_inputs();
        const auto outs = cascade.last_outputs();
        for (std::size_t s = 0; s < outs.size(); ++s) {
          stage_os << c << ',' << s << ',' << ins[s].valid << ',';
          if (ins[s].valid) stage_os << ins[s].key;
          stage_os << ',' << outs[s].out.valid << ',';
          if (outs[s].out.valid) stage_os << outs[s].out.key;
          stage_os << ',' << outs[s].matched << ',' << outs[s].admitted << '\n';
        }
      }

      RmwResult r = engine.step(out, std::nullopt, snap.folds(), c);
      if (r.backpressure) throw InternalConsistency("write-back without a reply after stall check");
      for (auto& op : r.ops) {
        ++(op.is_read() ? m.reads : m.writes);
        sched.push(std::move(op));
      }
      snap.on_unstalled_cycle();
    }

    // User-clock ticks due by the end of this app cycle.
    while (u128{next_tick} * app_hz <= u128{c} * user_hz) {
      const std::uint64_t u = next_tick++;
      const auto app_ops = sched.select(lanes);
      const auto admin_ops = snap.admin_candidates(lanes - std::min(lanes, app_ops.size()));
      const auto arb = arbiter_step(app_ops, admin_ops, lanes);
      const std::size_t accepted = mem.submit(arb.merged, u);
      const std::size_t app_accepted = std::min(accepted, arb.app_count);
      sched.commit(app_accepted);
      snap.admin_accepted(accepted - app_accepted);
      for (std::size_t i = 0; i < app_accepted; ++i)
        if (!arb.merged[i].is_read()) committed_master += arb.merged[i].inc_master;
      if (cmd_os.is_open()) {
        for (std::size_t i = 0; i < accepted; ++i) {
          const auto& op = arb.merged[i];
          cmd_os << u << ',' << i << ',' << kind_name(op.kind) << ',' << op.address << ',';
          if (op.data) cmd_os << op.data->master << ',' << op.data->shadow;
          else cmd_os << ',';
          cmd_os << '\n';
        }
      }
    }

    if (cfg.conservation_interval != 0 && c % cfg.conservation_interval == 0) {
      const std::uint64_t held = mem.total() + cascade.inflight_total() + sched.queued_increments();
      if (held != oracle.total())
        throw InternalConsistency("count conservation broken at cycle " + std::to_string(c) +
                                  ": " + std::to_string(held) + " held, " +
                                  std::to_string(oracle.total()) + " routed");
    }

    if (src_i >= events.size() && script_i == script.size() && cascade.empty() && engine.idle() &&
        sched.empty() && !mem.has_pending_replies() && snap.idle()) {
      m.cycles = c + 1;
      break;
    }
  }

  if (mem.total() != oracle.total())
    throw InternalConsistency("drained memory holds " + std::to_string(mem.total()) +
                              " counts, oracle " + std::to_string(oracle.total()));

  mem.account_ticks(next_tick);
  m.touches = snap.touches();
  m.snapshots = snap.completed();
  m.duplicate_pending = engine.duplicate_pending();
  m.memory = mem.metrics();
  m.effective_rate = effective_rate(m.memory);
  m.comparisons_per_second_equivalent = static_cast<double>(cfg.schedule.total_matchers()) *
                                        static_cast<double>(cfg.memory.app_clock_hz);
  m.peak_demand_mts = 2.0 * static_cast<double>(cfg.memory.app_clock_hz) / 1e6;
  m.peak_rate = cfg.memory.peak_rate();
  res.storage = mem.storage();

  if (options.oracle_check || !d.oracle_json.empty())
    res.oracle = verify_against_oracle(mem.storage(), {}, oracle);

  if (!d.memory_csv.empty()) write_memory_csv(d.memory_csv, res.storage);
  if (!d.snapshot_csv.empty())
    write_snapshot_csv(d.snapshot_csv, res.snapshots.empty() ? SnapshotTable{} : res.snapshots.back());
  if (!d.metrics_json.empty()) open_out(d.metrics_json) << to_json(m).dump(2) << '\n';
  if (!d.oracle_json.empty()) open_out(d.oracle_json) << to_json(*res.oracle).dump(2) << '\n';
  if (keep_inputs) {
    auto os = open_out(d.input_trace_bin, true);
    write_packed_trace(os, input_words);
  }
  return res;
}

std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, const RunOptions& options,
                            unsigned max_parallel) {
  if (configs.empty()) throw ConfigError("sweep needs at least one config");
  if (max_parallel == 0) max_parallel = std::max(1u, std::thread::hardware_concurrency());

  auto run_one = [&options](std::size_t index, const RunConfig& cfg) {
    SweepRow row;
    row.index = index;
    try {
      const RunResult r = run_sim(cfg, options);
      row.metrics = r.metrics;
      row.oracle_ok = !r.oracle || r.oracle->ok();
      row.ok = row.oracle_ok;
      if (!row.oracle_ok) row.error = "oracle mismatch";
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  };

  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (std::size_t base = 0; base < configs.size(); base += max_parallel) {
    std::vector<std::future<SweepRow>> batch;
    const std::size_t end = std::min(configs.size(), base + max_parallel);
    for (std::size_t i = base; i < end; ++i)
      batch.push_back(std::async(std::launch::async, run_one, i, std::cref(configs[i])));
    for (auto& f : batch) rows.push_back(f.get());
  }
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.index < b.index; });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "index,ok,cycles,events_in,reads,writes,conflations,stalls,hazards,effective_rate,"
        "comparisons_per_second_equivalent,peak_demand_mts,error\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << r.index << ',' << r.ok << ',' << m.cycles << ',' << m.events_in << ',' << m.reads << ','
       << m.writes << ',' << m.conflations << ',' << m.stalls << ',' << m.hazards << ','
       << m.effective_rate << ',' << m.comparisons_per_second_equivalent << ','
       << m.peak_demand_mts << ",\"" << err << "\"\n";
  }
  return os.str();
}

}  // namespace cq
