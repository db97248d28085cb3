#include "cq/stats.hpp"

#include <algorithm>
#include <set>

#include "cq/errors.hpp"

namespace cq {

const char* to_string(SnapshotPhase p) {
  switch (p) {
    case SnapshotPhase::idle: return "idle";
    case SnapshotPhase::draining: return "draining";
    case SnapshotPhase::reading: return "reading";
    case SnapshotPhase::merging: return "merging";
  }
  return "?";
}

Slot route_event(Key key, SnapshotPhase phase) {
  return phase == SnapshotPhase::idle ? Slot::event(key, 1, 0) : Slot::event(key, 0, 1);
}

SnapshotController::SnapshotController(Key key_space, int cascade_latency)
    : key_space_(key_space), cascade_latency_(cascade_latency) {}

void SnapshotController::start(std::uint64_t master_routed_before_cut) {
  if (phase_ != SnapshotPhase::idle)
    throw SnapshotOverlap(std::string("snapshot requested while ") + to_string(phase_));
  phase_ = SnapshotPhase::draining;
  cut_master_ = master_routed_before_cut;
  read_cursor_ = 0;
  outstanding_ = 0;
  building_.clear();
}

void SnapshotController::update(std::uint64_t committed_master) {
  if (phase_ == SnapshotPhase::draining && committed_master >= cut_master_)
    phase_ = SnapshotPhase::reading;
  if (phase_ == SnapshotPhase::reading && read_cursor_ == key_space_ && outstanding_ == 0) {
    table_ = std::move(building_);
    building_.clear();
    ++completed_;
    phase_ = SnapshotPhase::merging;
    touch_cursor_ = 0;
    settle_ = cascade_latency_;
  }
}

std::vector<MemOp> SnapshotController::admin_candidates(std::size_t n) const {
  std::vector<MemOp> ops;
  if (phase_ != SnapshotPhase::reading) return ops;
  for (Key k = read_cursor_; k < key_space_ && ops.size() < n; ++k)
    ops.push_back(MemOp::read(k, 0, Requester::admin));
  return ops;
}

void SnapshotController::admin_accepted(std::size_t n) {
  read_cursor_ += n;
  outstanding_ += n;
}

void SnapshotController::on_reply(const MemReply& reply) {
  if (reply.source != Requester::admin || outstanding_ == 0)
    throw InternalConsistency("unexpected admin reply");
  --outstanding_;
  if (reply.master != 0) building_[reply.address] = reply.master;
}

std::optional<Slot> SnapshotController::next_touch() {
  if (phase_ != SnapshotPhase::merging || touch_cursor_ >= key_space_) return std::nullopt;
  ++touches_;
  settle_ = cascade_latency_;
  return Slot::event(touch_cursor_++, 0, 0);
}

void SnapshotController::on_unstalled_cycle() {
  if (phase_ != SnapshotPhase::merging || touch_cursor_ < key_space_) return;
  if (settle_ > 0) --settle_;
  if (settle_ == 0) phase_ = SnapshotPhase::idle;
}

std::uint64_t OracleHistogram::count(Key k) const {
  auto it = counts_.find(k);
  return it == counts_.end() ? 0 : it->second;
}

OracleReport verify_against_oracle(const std::map<Key, StoredCounter>& memory,
                                   std::span<const Slot> in_flight,
                                   const OracleHistogram& oracle) {
  std::map<Key, std::uint64_t> flight;
  for (const auto& s : in_flight)
    if (s.valid) flight[s.key] += std::uint64_t{s.master} + s.shadow;

  std::set<Key> keys;
  for (const auto& [k, v] : memory) keys.insert(k);
  for (const auto& [k, v] : flight) keys.insert(k);
  for (const auto& [k, v] : oracle.counts()) keys.insert(k);

  OracleReport r;
  for (const Key k : keys) {
    ++r.keys_checked;
    const auto mit = memory.find(k);
    const std::uint64_t mem = mit == memory.end() ? 0 : mit->second.master + mit->second.shadow;
    const auto fit = flight.find(k);
    const std::uint64_t fl = fit == flight.end() ? 0 : fit->second;
    const std::uint64_t want = oracle.count(k);
    if (mem + fl != want) r.mismatches.push_back({k, mem, fl, want});
  }
  return r;
}

}  // namespace cq
