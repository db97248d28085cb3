#pragma once

// Event routing into master/shadow lanes, the snapshot protocol and the
// sequential ground-truth histogram.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cq/commands.hpp"
#include "cq/datapath.hpp"
#include "cq/memory.hpp"

namespace cq {

enum class SnapshotPhase : std::uint8_t {
  idle,
  draining,  // cut taken, waiting for master-routed increments to reach memory
  reading,   // low-priority readout of master counts in ascending key order
  merging,   // folding shadow into master for every key
};

const char* to_string(SnapshotPhase p);

/// Valid slot carrying one count: master while idle, shadow otherwise.
Slot route_event(Key key, SnapshotPhase phase);

using SnapshotTable = std::map<Key, std::uint64_t>;  // absent keys read as 0

/// Drives one snapshot at a time.
///
/// Starting a snapshot switches routing to the shadow lane; that instant is
/// the cut. Once every master increment routed before the cut has been
/// committed, master counts are read in ascending key order through the
/// arbiter's idle lanes. When all replies are in, zero-increment touches for
/// every key go through the conflation cascade; write-backs fold shadow into
/// master while the controller is idle or merging, so the fold can never race
/// with an in-flight update of the same key.
class SnapshotController {
 public:
  SnapshotController(Key key_space, int cascade_latency);

  /// Throws SnapshotOverlap unless idle.
  void start(std::uint64_t master_routed_before_cut);

  SnapshotPhase phase() const { return phase_; }
  bool idle() const { return phase_ == SnapshotPhase::idle; }
  bool folds() const { return phase_ == SnapshotPhase::idle || phase_ == SnapshotPhase::merging; }

  /// Moves draining -> reading once `committed_master` covers the cut.
  void update(std::uint64_t committed_master);

  std::vector<MemOp> admin_candidates(std::size_t n) const;
  void admin_accepted(std::size_t n);
  void on_reply(const MemReply& reply);

  /// Next touch to inject into the cascade while merging.
  std::optional<Slot> next_touch();
  /// Counts an unstalled cascade cycle; merging ends one cascade latency
  /// after the last touch.
  void on_unstalled_cycle();

  /// Table of the most recently completed readout.
  const SnapshotTable& table() const { return table_; }
  std::uint64_t completed() const { return completed_; }
  std::uint64_t touches() const { return touches_; }

 private:
  Key key_space_;
  int cascade_latency_;
  SnapshotPhase phase_ = SnapshotPhase::idle;
  std::uint64_t cut_master_ = 0;
  Key read_cursor_ = 0;
  std::uint64_t outstanding_ = 0;
  Key touch_cursor_ = 0;
  int settle_ = 0;
  SnapshotTable building_;
  SnapshotTable table_;
  std::uint64_t completed_ = 0;
  std::uint64_t touches_ = 0;
};

class OracleHistogram {
 public:
  void add(Key k, std::uint64_t n = 1) {
    counts_[k] += n;
    total_ += n;
  }
  std::uint64_t count(Key k) const;
  std::uint64_t total() const { return total_; }
  const std::unordered_map<Key, std::uint64_t>& counts() const { return counts_; }

 private:
  std::unordered_map<Key, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct OracleMismatch {
  Key key = 0;
  std::uint64_t memory = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t expected = 0;
};

struct OracleReport {
  std::uint64_t keys_checked = 0;
  std::vector<OracleMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Compares memory master+shadow plus in-flight increments against the
/// oracle for every key seen by either side.
OracleReport verify_against_oracle(const std::map<Key, StoredCounter>& memory,
                                   std::span<const Slot> in_flight,
                                   const OracleHistogram& oracle);

}  // namespace cq
