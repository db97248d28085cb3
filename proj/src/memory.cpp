#include "cq/memory.hpp"

#include <algorithm>
#include <ostream>

#include "cq/errors.hpp"

namespace cq {

std::ostream& operator<<(std::ostream& os, const MemOp& op) {
  os << (op.is_read() ? "R(" : "W(") << op.address;
  if (op.data) os << "," << op.data->master << "," << op.data->shadow;
  return os << ")";
}

void validate_memory(const MemoryConfig& c) {
  if (c.user_clock_hz == 0 || c.app_clock_hz == 0) throw ConfigError("clock rates must be > 0");
  if (c.lanes_per_user_tick < 1) throw ConfigError("lanes_per_user_tick must be >= 1");
  if (c.banks < 1) throw ConfigError("banks must be >= 1");
  if (c.bank_cycle_ticks < 0 || c.turnaround_ticks < 0)
    throw ConfigError("tick counts must be >= 0");
  if (c.refresh_interval_ticks > 0 && c.refresh_penalty_ticks >= c.refresh_interval_ticks)
    throw ConfigError("refresh penalty must be shorter than the refresh interval");
}

double effective_rate(const MemoryMetrics& m) {
  if (m.user_ticks == 0) return 0.0;
  return static_cast<double>(m.completed()) /
         (static_cast<double>(m.user_ticks) * m.lanes_per_user_tick);
}

MemoryModel::MemoryModel(MemoryConfig config) : config_(config) {
  validate_memory(config_);
  bank_ready_.assign(static_cast<std::size_t>(config_.banks), 0);
  metrics_.lanes_per_user_tick = config_.lanes_per_user_tick;
}

StoredCounter MemoryModel::load(Key k) const {
  auto it = storage_.find(k);
  return it == storage_.end() ? StoredCounter{} : it->second;
}

std::uint64_t MemoryModel::app_cycle_of_mem_tick(std::uint64_t t) const {
  using u128 = unsigned __int128;
  const u128 num = u128{t} * config_.app_clock_hz;
  const u128 den = u128{config_.user_clock_hz} * static_cast<unsigned>(config_.lanes_per_user_tick);
  return static_cast<std::uint64_t>((num + den - 1) / den);
}

bool MemoryModel::in_refresh(std::uint64_t t) const {
  const auto iv = config_.refresh_interval_ticks;
  return iv > 0 && t >= iv && (t % iv) < config_.refresh_penalty_ticks;
}

std::uint64_t MemoryModel::refresh_end(std::uint64_t t) const {
  const auto iv = config_.refresh_interval_ticks;
  return t - (t % iv) + config_.refresh_penalty_ticks;
}

std::size_t MemoryModel::submit(std::span<const MemOp> ops, std::uint64_t user_tick) {
  const auto lanes = static_cast<std::uint64_t>(config_.lanes_per_user_tick);
  const std::uint64_t window_start = user_tick * lanes;
  const std::uint64_t window_end = window_start + lanes;

  std::size_t accepted = 0;
  for (const auto& op : ops) {
    std::uint64_t t = std::max(bus_next_, window_start);
    const bool turn = have_last_ && op.kind != last_kind_;
    if (turn) t = std::max(t, bus_next_ + static_cast<std::uint64_t>(config_.turnaround_ticks));
    const auto bank = static_cast<std::size_t>(op.address % static_cast<Key>(config_.banks));
    t = std::max(t, bank_ready_[bank]);
    std::uint64_t refresh_wait = 0;
    while (in_refresh(t)) {
      const auto end = refresh_end(t);
      refresh_wait += end - t;
      t = end;
    }
    if (t >= window_end) break;

    bus_next_ = t + 1;
    bank_ready_[bank] = t + static_cast<std::uint64_t>(config_.bank_cycle_ticks);
    metrics_.refresh_stall_ticks += refresh_wait;
    if (turn) ++metrics_.turnaround_count;
    have_last_ = true;
    last_kind_ = op.kind;

    if (op.is_read()) {
      const auto v = load(op.address);
      replies_.push_back(MemReply{op.address, v.master, v.shadow,
                                  app_cycle_of_mem_tick(t) + config_.base_read_latency_app_cycles,
                                  op.source});
      ++metrics_.completed_reads;
    } else {
      auto& cell = storage_[op.address];
      const CounterWord w = op.data.value_or(CounterWord{});
      total_ -= cell.master + cell.shadow;
      cell.master = w.master;
      cell.shadow = w.shadow;
      total_ += cell.master + cell.shadow;
      ++metrics_.completed_writes;
    }
    ++accepted;
  }
  metrics_.rejected += ops.size() - accepted;
  return accepted;
}

std::vector<MemReply> MemoryModel::collect_replies(std::uint64_t app_cycle) {
  std::vector<MemReply> out;
  while (!replies_.empty() && replies_.front().reply_cycle <= app_cycle) {
    out.push_back(replies_.front());
    replies_.pop_front();
  }
  return out;
}

std::vector<MemReply> MemoryModel::tick(std::uint64_t user_tick) {
  metrics_.user_ticks = std::max(metrics_.user_ticks, user_tick + 1);
  return collect_replies(app_cycle_of_mem_tick((user_tick + 1) *
                                               static_cast<std::uint64_t>(config_.lanes_per_user_tick)));
}

}  // namespace cq
