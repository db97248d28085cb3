#include "cq/rmw.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "cq/errors.hpp"

namespace cq {

void RmwEngine::deliver(const MemReply& reply) { replies_.push_back(reply); }

bool RmwEngine::blocks(const Slot& exit) const { return exit.valid && replies_.empty(); }

RmwResult RmwEngine::step(const CascadeOutput& out, std::optional<MemReply> reply, bool fold,
                          std::uint64_t cycle) {
  if (reply) deliver(*reply);
  RmwResult r;

  const Slot& exit = out.final.out;
  if (exit.valid) {
    if (pending_.empty() || pending_.front() != exit.key)
      throw ReplyKeyMismatch("exit of key " + std::to_string(exit.key) +
                             " does not match the oldest outstanding read");
    if (replies_.empty()) {
      r.backpressure = true;
      return r;
    }
    const MemReply rep = replies_.front();
    if (rep.address != exit.key)
      throw ReplyKeyMismatch("reply for key " + std::to_string(rep.address) +
                             " paired with exit of key " + std::to_string(exit.key));
    replies_.pop_front();

    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    auto add = [](std::uint64_t a, std::uint64_t b) {
      if (a > kMax - b) throw LaneOverflow("stored counter overflow");
      return a + b;
    };
    CounterWord w;
    if (fold) {
      w.master = add(add(add(rep.master, rep.shadow), exit.master), exit.shadow);
    } else {
      w.master = add(rep.master, exit.master);
      w.shadow = add(rep.shadow, exit.shadow);
    }
    MemOp op = MemOp::write(exit.key, w, cycle);
    op.inc_master = exit.master;
    op.inc_shadow = exit.shadow;
    r.ops.push_back(op);
    ++writes_issued_;

    pending_.pop_front();
    pending_view_.erase(pending_view_.begin());
    if (--pending_count_[exit.key] == 0) pending_count_.erase(exit.key);
  }

  if (out.read_request) {
    const Key k = *out.read_request;
    if (pending_count_[k]++ > 0) ++duplicate_pending_;
    pending_.push_back(k);
    pending_view_.push_back(k);
    r.ops.push_back(MemOp::read(k, cycle));
    ++reads_issued_;
  }
  return r;
}

// ---------------------------------------------------------------------------

CommandScheduler::CommandScheduler(int block_size) : block_size_(block_size) {
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
}

void CommandScheduler::push(MemOp op) {
  op.arrival = next_arrival_++;
  if (op.is_read()) {
    reads_.push_back(std::move(op));
  } else {
    queued_inc_ += op.inc_master + op.inc_shadow;
    writes_.push_back(std::move(op));
  }
}

std::optional<OpKind> CommandScheduler::pick(Cursor& c) const {
  const bool write_ok = c.wi < writes_.size();
  const bool read_ok =
      c.ri < reads_.size() && (c.wi >= writes_.size() || reads_[c.ri].arrival < writes_[c.wi].arrival);
  auto take = [&](OpKind k) {
    ++c.in_block;
    (k == OpKind::read ? c.ri : c.wi)++;
    return std::optional<OpKind>(k);
  };

  if (c.in_block < block_size_) {
    if (c.mode == OpKind::write && write_ok) return take(OpKind::write);
    if (c.mode == OpKind::read && read_ok) return take(OpKind::read);
  }
  const OpKind other = c.mode == OpKind::write ? OpKind::read : OpKind::write;
  const bool other_ok = other == OpKind::read ? read_ok : write_ok;
  const bool same_ok = c.mode == OpKind::read ? read_ok : write_ok;
  if (other_ok) {
    c.mode = other;
    c.in_block = 0;
    return take(other);
  }
  if (same_ok) {
    c.in_block = 0;
    return take(c.mode);
  }
  return std::nullopt;
}

std::vector<MemOp> CommandScheduler::select(std::size_t capacity) const {
  std::vector<MemOp> out;
  Cursor c = cur_;
  while (out.size() < capacity) {
    const auto k = pick(c);
    if (!k) break;
    out.push_back(*k == OpKind::read ? reads_[c.ri - 1] : writes_[c.wi - 1]);
  }
  return out;
}

void CommandScheduler::commit(std::size_t n) {
  Cursor c = cur_;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pick(c)) throw InternalConsistency("scheduler commit beyond selection");
  }
  for (std::size_t i = 0; i < c.wi; ++i) queued_inc_ -= writes_[i].inc_master + writes_[i].inc_shadow;
  reads_.erase(reads_.begin(), reads_.begin() + static_cast<std::ptrdiff_t>(c.ri));
  writes_.erase(writes_.begin(), writes_.begin() + static_cast<std::ptrdiff_t>(c.wi));
  cur_ = Cursor{0, 0, c.mode, c.in_block};
}

std::vector<MemOp> CommandScheduler::step(std::size_t capacity) {
  auto ops = select(capacity);
  commit(ops.size());
  return ops;
}

ArbiterResult arbiter_step(std::span<const MemOp> app_ops, std::span<const MemOp> admin_ops,
                           std::size_t capacity) {
  ArbiterResult r;
  for (const auto& op : app_ops) {
    if (r.merged.size() == capacity) break;
    r.merged.push_back(op);
    ++r.app_count;
  }
  for (const auto& op : admin_ops) {
    if (r.merged.size() == capacity) break;
    r.merged.push_back(op);
    ++r.admin_count;
  }
  return r;
}

}  // namespace cq
