#pragma once

// Update-conflation stages: a combinational reference stage, a
// register-accurate DSP-slice stage with pipelined match feedback, and
// cascades of DSP stages.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cq/datapath.hpp"

namespace cq {

struct StageConfig {
  int gap_in = 0;    // input-delay / feedback registers
  int matchers = 1;  // parallel comparators
  constexpr int gap_out() const { return gap_in + matchers; }
  friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

struct ScheduleConfig {
  std::vector<StageConfig> stages;

  int total_matchers() const;
  /// The 0-6-250 schedule: a 6-matcher pre-conflation feeding a 244-matcher
  /// stage with six feedback registers.
  static ScheduleConfig standard();
  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

/// Throws ConfigError unless stage 0 has no feedback delay and every later
/// stage's gap_in is covered by its predecessor's gap_out.
void validate_schedule(const ScheduleConfig& schedule);

struct StageOutput {
  Slot out;              // slot leaving the stage this cycle
  Slot entry;            // entry admitted into the queue this cycle (or empty)
  bool admitted = false;
  bool matched = false;  // the decided input was conflated into a pending entry
  bool hazard = false;   // a key already pending was admitted a second time
  bool multi_match = false;
};

/// Fully combinational conflation queue. Index 0 of the slot array is the
/// newest entry; index depth-1 leaves on the next step. A new key is matched
/// against every pending entry, including the one leaving this cycle.
class RefStage {
 public:
  RefStage(int depth, LayoutConfig layout = {});

  StageOutput step(const Slot& input, bool stall = false);

  int depth() const { return static_cast<int>(slots_.size()); }
  int latency() const { return depth(); }
  std::span<const Slot> slots() const { return slots_; }
  std::uint64_t inflight_total() const;

 private:
  LayoutConfig layout_;
  std::vector<Slot> slots_;
};

/// Register-accurate model of the DSP-slice mapping.
///
/// Registers: `gap_in` input-delay slots, a `gap_in`-deep pipelined OR tree
/// for the match feedback, the P cascade registers P[0..matchers] (P[0] is
/// written by the admission mux), one registered match bit per comparator and
/// the delayed increment V on the A:B path. Comparator j compares the raw
/// input against P[j]; its registered result merges V into the same entry one
/// slice later. The entry in P[matchers] receives its last merge in the
/// trailing slice, whose ALU result is the stage output.
///
/// With at least `gap_in` unrelated slots between identical input keys, the
/// output stream equals RefStage(gap_in + matchers) delayed by
/// kExtraRegisters cycles.
class DspStage {
 public:
  static constexpr int kExtraRegisters = 1;

  DspStage(StageConfig config, LayoutConfig layout = {});

  StageOutput step(const Slot& input, bool stall = false);

  /// Slot the next unstalled step presents at the output.
  Slot exiting() const;

  const StageConfig& config() const { return config_; }
  /// Cycles from input arrival to output for an admitted entry.
  int latency() const { return config_.gap_in + config_.matchers + kExtraRegisters; }
  /// Fan-in of each OR-tree level.
  int tree_fanin() const { return fanin_; }
  std::span<const std::vector<std::uint8_t>> tree_levels() const { return tree_; }

  bool empty() const;
  /// Sum of all count lanes held by this stage, each increment counted once.
  std::uint64_t inflight_total() const;
  /// Valid entries currently in the compared positions P[0..matchers-1].
  std::vector<Slot> pending() const;

 private:
  std::size_t pidx(std::size_t pos) const { return (head_ + pos) % ring_.size(); }
  std::size_t didx(std::size_t pos) const { return (dhead_ + pos) % delay_.size(); }
  static std::uint64_t tag_of(const Slot& s) {
    return s.valid ? (s.key | (std::uint64_t{1} << 63)) : 0;
  }

  StageConfig config_;
  LayoutConfig layout_;
  int fanin_ = 1;

  std::vector<Slot> ring_;            // P[0..N]
  std::vector<std::uint64_t> tags_;   // valid|key mirror of ring_ for comparison
  std::size_t head_ = 0;

  std::vector<Slot> delay_;           // input delay line, delay_[didx(0)] newest
  std::size_t dhead_ = 0;

  std::vector<std::vector<std::uint8_t>> tree_;  // tree_[i] = level i+1 registers
  std::vector<std::uint8_t> hits_;               // combinational compare scratch
  std::vector<std::uint32_t> match_;  // registered match bits, as compared positions
  Slot v_reg_;                        // delayed increment
};

struct CascadeOutput {
  StageOutput final;
  std::optional<Key> read_request;
  int conflations = 0;  // matches across all stages this cycle
  int hazards = 0;
};

/// Chain of DSP stages. Slots flow from stage 0 to the last stage, whose
/// admissions start read-modify-write cycles and whose outputs complete them.
class Cascade {
 public:
  Cascade(const ScheduleConfig& schedule, LayoutConfig layout = {});

  CascadeOutput step(const Slot& input, bool stall = false);
  Slot exiting() const { return stages_.back().exiting(); }

  std::span<const DspStage> stages() const { return stages_; }
  /// Per-stage outputs of the most recent step (for tracing).
  std::span<const StageOutput> last_outputs() const { return last_; }
  std::span<const Slot> last_inputs() const { return last_in_; }

  int latency() const;
  bool empty() const;
  std::uint64_t inflight_total() const;

 private:
  std::vector<DspStage> stages_;
  std::vector<StageOutput> last_;
  std::vector<Slot> last_in_;
};

/// Minimum index distance between two valid slots with the same key, or
/// nullopt when no key repeats.
std::optional<std::size_t> min_key_gap(std::span<const Slot> stream);

}  // namespace cq
