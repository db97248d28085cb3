#include <doctest.h>

#include <random>
#include <vector>

#include "cq/errors.hpp"
#include "cq/harness.hpp"
#include "cq/stats.hpp"
#include "support/oracles.hpp"

using namespace cq;

namespace {

RunConfig snapshot_config(Key key_space) {
  RunConfig c;
  c.source.key_space = key_space;
  c.schedule = ScheduleConfig{{{0, 4}, {4, 40}}};
  c.memory.base_read_latency_app_cycles = 30;
  return c;
}

EventStream keys_at(std::vector<std::pair<std::uint64_t, Key>> at, std::size_t len) {
  EventStream ev(len);
  for (auto [c, k] : at) ev[c] = k;
  return ev;
}

}  // namespace

TEST_CASE("routing follows the snapshot phase") {
  CHECK(route_event(4, SnapshotPhase::idle) == Slot::event(4, 1, 0));
  CHECK(route_event(4, SnapshotPhase::reading) == Slot::event(4, 0, 1));
  CHECK(route_event(4, SnapshotPhase::draining) == Slot::event(4, 0, 1));
  CHECK(route_event(4, SnapshotPhase::merging) == Slot::event(4, 0, 1));
}

TEST_CASE("controller phases") {
  SnapshotController s(3, 5);
  CHECK(s.idle());
  CHECK(s.folds());
  s.start(2);
  CHECK(s.phase() == SnapshotPhase::draining);
  CHECK_FALSE(s.folds());
  CHECK_THROWS_AS(s.start(0), SnapshotOverlap);
  CHECK(s.admin_candidates(8).empty());
  s.update(1);
  CHECK(s.phase() == SnapshotPhase::draining);
  s.update(2);
  CHECK(s.phase() == SnapshotPhase::reading);
  auto ops = s.admin_candidates(2);
  REQUIRE(ops.size() == 2);
  CHECK(ops[0].address == 0);
  CHECK(ops[1].source == Requester::admin);
  s.admin_accepted(2);
  ops = s.admin_candidates(8);
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].address == 2);
  s.admin_accepted(1);
  s.on_reply({0, 0, 0, 0, Requester::admin});
  s.on_reply({1, 7, 1, 0, Requester::admin});
  s.update(2);
  CHECK(s.phase() == SnapshotPhase::reading);
  s.on_reply({2, 0, 0, 0, Requester::admin});
  s.update(2);
  CHECK(s.phase() == SnapshotPhase::merging);
  CHECK(s.folds());
  CHECK(s.table().at(1) == 7);
  CHECK(s.table().count(0) == 0);
  for (Key k = 0; k < 3; ++k) CHECK(s.next_touch()->key == k);
  CHECK_FALSE(s.next_touch().has_value());
  for (int i = 0; i < 4; ++i) {
    s.on_unstalled_cycle();
    CHECK_FALSE(s.idle());
  }
  s.on_unstalled_cycle();
  CHECK(s.idle());
  CHECK(s.completed() == 1);
  CHECK_THROWS_AS(s.on_reply({0, 0, 0, 0, Requester::admin}), InternalConsistency);
}

TEST_CASE("oracle histogram and verification") {
  OracleHistogram h;
  h.add(1);
  h.add(1);
  h.add(5, 3);
  CHECK(h.count(1) == 2);
  CHECK(h.count(2) == 0);
  CHECK(h.total() == 5);
  std::map<Key, StoredCounter> mem{{1, {1, 0}}, {5, {2, 1}}};
  std::vector<Slot> flight{Slot::event(1, 1)};
  CHECK(verify_against_oracle(mem, flight, h).ok());
  const auto bad = verify_against_oracle(mem, {}, h);
  REQUIRE(bad.mismatches.size() == 1);
  CHECK(bad.mismatches[0].key == 1);
  CHECK(bad.mismatches[0].expected == 2);
  mem[9] = {1, 0};
  CHECK_FALSE(verify_against_oracle(mem, flight, h).ok());
}

TEST_CASE("snapshot with no events reads all zeros") {
  auto c = snapshot_config(8);
  c.snapshot_script = {10};
  const auto r = run_events(c, EventStream(20));
  REQUIRE(r.snapshots.size() == 1);
  CHECK(r.snapshots[0].empty());
  CHECK(r.metrics.touches == 8);
}

TEST_CASE("snapshot after five drained events") {
  auto c = snapshot_config(4);
  c.snapshot_script = {400};
  const auto r = run_events(c, keys_at({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}}, 500), {true});
  REQUIRE(r.snapshots.size() == 1);
  CHECK(r.snapshots[0].at(1) == 5);
  CHECK(r.oracle->ok());
}

TEST_CASE("snapshot: three drained, two during readout") {
  auto c = snapshot_config(4);
  c.snapshot_script = {400};
  const auto r = run_events(c, keys_at({{0, 1}, {1, 1}, {2, 1}, {401, 1}, {402, 1}}, 500), {true});
  REQUIRE(r.snapshots.size() == 1);
  CHECK(r.snapshots[0].at(1) == 3);
  CHECK(r.storage.at(1).master == 5);
  CHECK(r.storage.at(1).shadow == 0);
  CHECK(r.oracle->ok());
}

TEST_CASE("snapshot cut consistency on random streams without stalls") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    auto c = snapshot_config(64);
    c.memory.turnaround_ticks = 0;
    c.memory.refresh_interval_ticks = 0;
    c.memory.bank_cycle_ticks = 1;
    EventStream ev(3000);
    for (auto& e : ev)
      if (rng() % 3) e = rng() % 64;
    const std::uint64_t cut = 200 + rng() % 2000;
    c.snapshot_script = {cut};
    const auto r = run_events(c, ev, {true});
    CHECK(r.metrics.stalls == 0);
    REQUIRE(r.snapshots.size() == 1);
    const auto want = oracle::histogram(ev, 0, cut);
    CHECK(r.snapshots[0] == SnapshotTable(want.begin(), want.end()));
    CHECK(r.oracle->ok());
    for (const auto& [k, v] : r.storage) CHECK(v.shadow == 0);
  }
}

TEST_CASE("overlapping snapshot requests are rejected") {
  auto c = snapshot_config(1 << 12);
  c.snapshot_script = {10, 12};
  CHECK_THROWS_AS(run_events(c, EventStream(50)), SnapshotOverlap);
}
