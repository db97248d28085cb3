// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cq/conflation.hpp"
#include "cq/errors.hpp"
#include "cq/estimator.hpp"
#include "cq/harness.hpp"
#include "cq/memory.hpp"
#include "support/oracles.hpp"

using namespace cq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

MemoryConfig unconstrained(std::uint64_t latency) {
  MemoryConfig m;
  m.turnaround_ticks = 0;
  m.refresh_interval_ticks = 0;
  m.bank_cycle_ticks = 1;
  m.base_read_latency_app_cycles = latency;
  return m;
}

// Results of the randomized end-to-end runs, shared by criteria 1 and 2.
struct RandomRuns {
  int runs = 0;
  int exact = 0;
  int errors = 0;
  int reply_mismatch = 0;
  std::uint64_t duplicate_pending = 0;
  std::uint64_t hazards = 0;
  std::uint64_t events = 0;
  std::string first_error;
};

RandomRuns random_runs(int n) {
  const std::vector<ScheduleConfig> schedules{
      ScheduleConfig::standard(),
      ScheduleConfig{{{0, 4}, {4, 60}}},
      ScheduleConfig{{{0, 2}, {2, 30}}},
      ScheduleConfig{{{0, 8}, {8, 120}}},
      ScheduleConfig{{{0, 3}, {3, 20}, {20, 100}}},
  };
  const SourceKind kinds[] = {SourceKind::uniform, SourceKind::zipf, SourceKind::constant_key,
                              SourceKind::burst};
  std::mt19937_64 rng(20240601);
  RandomRuns out;
  for (int i = 0; i < n; ++i) {
    RunConfig c;
    c.source.kind = kinds[i % 4];
    c.source.exponent = 1.0;
    c.source.key_space = Key{1} << (8 + rng() % 9);
    c.source.key = rng() % c.source.key_space;
    c.source.period = 16 + rng() % 100;
    c.source.width = 1 + rng() % c.source.period;
    c.source.seed = rng();
    // log-uniform event count in [1e4, 1e6]
    const double e = 4.0 + 2.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    c.source.count = static_cast<std::uint64_t>(std::pow(10.0, e));
    c.memory.base_read_latency_app_cycles = 50 + rng() % 351;
    c.schedule = schedules[rng() % schedules.size()];
    ++out.runs;
    out.events += c.source.count;
    try {
      const auto r = run_sim(c, {true});
      out.exact += r.oracle->ok() ? 1 : 0;
      out.duplicate_pending += r.metrics.duplicate_pending;
      out.hazards += r.metrics.hazards;
    } catch (const ReplyKeyMismatch& ex) {
      ++out.reply_mismatch;
      if (out.first_error.empty()) out.first_error = ex.what();
    } catch (const std::exception& ex) {
      ++out.errors;
      if (out.first_error.empty()) out.first_error = ex.what();
    }
  }
  return out;
}

// Valid output slots of a reference stage fed `in` and flushed.
std::vector<Slot> ref_outputs(int depth, const std::vector<Slot>& in) {
  RefStage st(depth);
  std::vector<Slot> out;
  for (const auto& s : in) out.push_back(st.step(s).out);
  for (int i = 0; i <= depth; ++i) out.push_back(st.step(Slot::empty()).out);
  return out;
}

Outcome spacing_lemma() {
  std::uint64_t streams = 0, violations = 0;
  const Slot alphabet[3] = {Slot::empty(), Slot::event(1, 1), Slot::event(2, 1)};
  for (int n = 1; n <= 8; ++n) {
    std::vector<Slot> in(12);
    for (int code = 0; code < 531441; ++code) {  // 3^12
      int x = code;
      for (auto& s : in) {
        s = alphabet[x % 3];
        x /= 3;
      }
      const auto gap = min_key_gap(ref_outputs(n, in));
      ++streams;
      if (gap && *gap < static_cast<std::size_t>(n)) ++violations;
    }
  }
  std::mt19937_64 rng(99);
  for (int n : {16, 64, 250}) {
    for (int trial = 0; trial < 40; ++trial) {
      const Key keys = 1 + rng() % 6;
      std::vector<Slot> in(4000);
      for (auto& s : in)
        if (rng() % 5) s = Slot::event(rng() % keys, 1);
      const auto gap = min_key_gap(ref_outputs(n, in));
      ++streams;
      if (gap && *gap < static_cast<std::size_t>(n)) ++violations;
    }
  }
  return {violations == 0,
          std::to_string(streams) + " streams, " + std::to_string(violations) + " violations"};
}

std::vector<Slot> spaced_stream(std::mt19937_64& rng, std::size_t len, int gap) {
  std::vector<Slot> s;
  for (std::size_t i = 0; i < len; ++i) {
    Slot x = Slot::empty();
    if (rng() % 5) {
      const Key k = rng() % static_cast<Key>(gap + 4);
      bool ok = true;
      for (int d = 1; d <= gap && d <= static_cast<int>(i); ++d)
        if (s[i - d].valid && s[i - d].key == k) ok = false;
      if (ok) x = Slot::event(k, 1);
    }
    s.push_back(x);
  }
  return s;
}

Outcome dsp_equivalence() {
  std::mt19937_64 rng(7);
  int cases = 0, mismatched = 0, hazards_seen = 0;
  for (int g = 0; g <= 6; ++g) {
    for (int n : {1, 3, 8, 25}) {
      const auto in = spaced_stream(rng, 10'000, g);
      RefStage ref(g + n);
      DspStage dsp({g, n});
      std::vector<Slot> r, d;
      for (std::size_t t = 0; t < in.size() + 64; ++t) {
        const Slot s = t < in.size() ? in[t] : Slot::empty();
        r.push_back(ref.step(s).out);
        const auto o = dsp.step(s);
        d.push_back(o.out);
        hazards_seen += o.hazard;
      }
      ++cases;
      const auto c = static_cast<std::size_t>(DspStage::kExtraRegisters);
      bool same = true;
      for (std::size_t t = 0; t + c < d.size(); ++t) same &= d[t + c] == r[t];
      mismatched += same ? 0 : 1;
    }
  }
  // spacing violated by one slot for g = 2
  auto hazard_of = [](std::vector<Slot> in) {
    DspStage st({2, 4});
    int h = 0;
    for (const auto& s : in) h += st.step(s).hazard;
    for (int i = 0; i < 10; ++i) h += st.step(Slot::empty()).hazard;
    return h > 0;
  };
  const bool aa = hazard_of({Slot::event(1, 1), Slot::event(1, 1)});
  const bool axa = hazard_of({Slot::event(1, 1), Slot::event(2, 1), Slot::event(1, 1)});
  const bool ok = mismatched == 0 && hazards_seen == 0 && aa && axa;
  return {ok, std::to_string(cases - mismatched) + "/" + std::to_string(cases) +
                  " streams bit-exact at offset " + std::to_string(DspStage::kExtraRegisters) +
                  ", hazard flagged for A,A: " + (aa ? "yes" : "no") +
                  ", A,x,A: " + (axa ? "yes" : "no")};
}

Outcome reference_numbers() {
  std::vector<std::string> bad;
  auto expect = [&](bool c, const std::string& what) {
    if (!c) bad.push_back(what);
  };
  auto round1 = [](double x) { return std::round(x * 10.0) / 10.0; };
  expect(round1(cam_overhead_factor(5)) == 6.4, "overhead(5)");
  expect(round1(cam_overhead_factor(9)) == 56.9, "overhead(9)");
  expect(ram_cam_cost(24, 244, 5, true).luts == 2928, "ram_cam_cost");
  expect(ram_cam_tag_luts(24, 244, 5) == 1220, "tag term");
  expect(dsp_chain_cost(ScheduleConfig::standard(), 42).dsps == 257, "dsp chain");

  RunConfig c;
  c.source.count = 1000;
  const auto m = run_sim(c).metrics;
  expect(m.comparisons_per_second_equivalent == 93.75e9, "comparisons/s");
  expect(m.peak_demand_mts == 750.0, "peak demand");
  expect(std::lround(m.peak_demand_mts * 1e6 / c.memory.peak_rate() * 100.0) == 70, "70% of peak");
  std::string detail = "6.4, 56.9, 2928/1220 LUTs, 257 DSPs, 93.75e9 cmp/s, 750 MT/s = 70%";
  if (!bad.empty()) {
    detail = "mismatch:";
    for (const auto& b : bad) detail += " " + b;
  }
  return {bad.empty(), detail};
}

Outcome memory_schedule() {
  const MemoryConfig cfg;
  MemoryModel mem(cfg);
  std::deque<MemOp> backlog;
  const std::uint64_t ticks = 100'000;
  const auto lanes = static_cast<std::size_t>(cfg.lanes_per_user_tick);
  for (std::uint64_t u = 0; u < ticks; ++u) {
    while (backlog.size() < 2 * lanes) {
      for (int j = 0; j < 16; ++j) backlog.push_back(MemOp::read(static_cast<Key>(j)));
      for (int j = 0; j < 16; ++j) backlog.push_back(MemOp::write(static_cast<Key>(j), {1, 0}));
    }
    std::vector<MemOp> offer(backlog.begin(), backlog.begin() + static_cast<std::ptrdiff_t>(lanes));
    const auto n = mem.submit(offer, u);
    backlog.erase(backlog.begin(), backlog.begin() + static_cast<std::ptrdiff_t>(n));
  }
  mem.account_ticks(ticks);
  const double sim = effective_rate(mem.metrics());
  const double closed = oracle::block_schedule_rate(16, cfg.banks, cfg.bank_cycle_ticks, cfg.turnaround_ticks,
                                                    cfg.refresh_interval_ticks, cfg.refresh_penalty_ticks);
  const double rel = std::abs(sim - closed) / closed;
  char buf[160];
  std::snprintf(buf, sizeof buf, "simulated %.4f, closed form %.4f, difference %.2f%%", sim, closed,
                rel * 100.0);
  return {sim < 0.60 && rel < 0.02, buf};
}

Outcome full_bandwidth() {
  RunConfig c;
  c.source.kind = SourceKind::sequential;
  c.source.count = 200'000;
  c.memory = unconstrained(220);
  const auto r = run_sim(c, {true});
  const auto& m = r.metrics;
  const bool ok = m.stalls == 0 && m.source_exhausted_cycle == c.source.count &&
                  m.reads == c.source.count && r.oracle->ok();
  return {ok, std::to_string(m.events_in) + " events in " + std::to_string(m.source_exhausted_cycle) +
                  " cycles, " + std::to_string(m.stalls) + " stalls, cascade latency " +
                  std::to_string(Cascade(c.schedule).latency()) + " >= 220"};
}

Outcome snapshot_consistency() {
  RunConfig c;
  c.source.key_space = 4;
  c.snapshot_script = {600};
  EventStream ev(800);
  ev[0] = ev[1] = ev[2] = 1;  // drained long before the snapshot
  ev[601] = ev[602] = 1;      // arrive while the readout is in progress
  const auto r = run_events(c, ev, {true});
  const bool one = r.snapshots.size() == 1;
  const std::uint64_t snap = one && r.snapshots[0].count(1) ? r.snapshots[0].at(1) : 0;
  const auto cell = r.storage.count(1) ? r.storage.at(1) : StoredCounter{};
  const bool ok = one && snap == 3 && r.snapshots[0].size() == 1 && cell.master == 5 &&
                  cell.shadow == 0 && r.oracle->ok();
  return {ok, "snapshot[1] = " + std::to_string(snap) + ", after merge master = " +
                  std::to_string(cell.master) + ", shadow = " + std::to_string(cell.shadow)};
}

}  // namespace

int main() {
  RandomRuns rr;
  report(1, "oracle equivalence", [&] {
    rr = random_runs(100);
    return Outcome{rr.exact == rr.runs && rr.errors == 0 && rr.reply_mismatch == 0,
                   std::to_string(rr.exact) + "/" + std::to_string(rr.runs) + " runs exact, " +
                       std::to_string(rr.events) + " events" +
                       (rr.first_error.empty() ? "" : ", first error: " + rr.first_error)};
  });
  report(2, "hazard freedom", [&] {
    return Outcome{rr.runs == 100 && rr.duplicate_pending == 0 && rr.reply_mismatch == 0 && rr.hazards == 0,
                   std::to_string(rr.duplicate_pending) + " duplicate pending reads, " +
                       std::to_string(rr.reply_mismatch) + " reply mismatches, " +
                       std::to_string(rr.hazards) + " stage hazards"};
  });
  report(3, "spacing lemma", spacing_lemma);
  report(4, "dsp/reference equivalence", dsp_equivalence);
  report(5, "reference numbers", reference_numbers);
  report(6, "memory schedule", memory_schedule);
  report(7, "full bandwidth", full_bandwidth);
  report(8, "snapshot consistency", snapshot_consistency);
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
