#pragma once

// RLDRAM-like timing model. Time inside the model is counted in memory-clock
// ticks; one transaction can occupy the command bus per tick and
// `lanes_per_user_tick` ticks make up one user-clock tick.

#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <vector>

#include "cq/commands.hpp"

namespace cq {

struct MemoryConfig {
  std::uint64_t user_clock_hz = 133'250'000;
  std::uint64_t app_clock_hz = 375'000'000;
  int lanes_per_user_tick = 8;
  int banks = 16;
  int bank_cycle_ticks = 8;   // tRC
  int turnaround_ticks = 12;  // read<->write bus switch
  std::uint64_t base_read_latency_app_cycles = 220;
  std::uint64_t refresh_interval_ticks = 3900;  // 0 disables refresh
  std::uint64_t refresh_penalty_ticks = 130;

  /// Nominal peak transaction rate in transactions per second.
  double peak_rate() const {
    return static_cast<double>(lanes_per_user_tick) * static_cast<double>(user_clock_hz);
  }
};

void validate_memory(const MemoryConfig& config);

struct MemoryMetrics {
  std::uint64_t user_ticks = 0;
  std::uint64_t completed_reads = 0;
  std::uint64_t completed_writes = 0;
  std::uint64_t turnaround_count = 0;
  std::uint64_t refresh_stall_ticks = 0;
  std::uint64_t rejected = 0;
  int lanes_per_user_tick = 8;

  std::uint64_t completed() const { return completed_reads + completed_writes; }
};

/// Completed transactions over the nominal capacity of the elapsed ticks.
double effective_rate(const MemoryMetrics& m);

struct StoredCounter {
  std::uint64_t master = 0;
  std::uint64_t shadow = 0;
};

class MemoryModel {
 public:
  explicit MemoryModel(MemoryConfig config = {});

  /// Offers `ops` in order during `user_tick`. Accepts the longest prefix
  /// whose bus slots fit in this tick's window; the rest stays with the
  /// caller. Writes update storage on acceptance (posted writes); reads
  /// sample storage on acceptance and reply after the read latency.
  std::size_t submit(std::span<const MemOp> ops, std::uint64_t user_tick);

  /// Advances to the end of `user_tick` and returns replies due by then.
  std::vector<MemReply> tick(std::uint64_t user_tick);

  /// Pops replies available at or before `app_cycle`, in read-issue order.
  std::vector<MemReply> collect_replies(std::uint64_t app_cycle);
  bool has_pending_replies() const { return !replies_.empty(); }

  /// Marks `user_ticks` as elapsed for rate accounting.
  void account_ticks(std::uint64_t user_ticks) { metrics_.user_ticks = user_ticks; }

  const MemoryMetrics& metrics() const { return metrics_; }
  const MemoryConfig& config() const { return config_; }
  const std::map<Key, StoredCounter>& storage() const { return storage_; }
  StoredCounter load(Key k) const;
  /// Sum of master + shadow over all stored counters.
  std::uint64_t total() const { return total_; }

  /// App cycle at which memory tick `t` becomes visible (rounded up).
  std::uint64_t app_cycle_of_mem_tick(std::uint64_t t) const;

 private:
  bool in_refresh(std::uint64_t t) const;
  std::uint64_t refresh_end(std::uint64_t t) const;

  MemoryConfig config_;
  MemoryMetrics metrics_;
  std::map<Key, StoredCounter> storage_;
  std::uint64_t total_ = 0;

  std::uint64_t bus_next_ = 0;  // earliest free command slot
  bool have_last_ = false;
  OpKind last_kind_ = OpKind::read;
  std::vector<std::uint64_t> bank_ready_;
  std::deque<MemReply> replies_;
};

}  // namespace cq
