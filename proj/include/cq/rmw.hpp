#pragma once

// Read-modify-write engine, kind-grouping command scheduler and the
// priority arbiter in front of the memory controller.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cq/commands.hpp"
#include "cq/conflation.hpp"

namespace cq {

struct RmwResult {
  std::vector<MemOp> ops;
  bool backpressure = false;
};

/// Turns cascade events into memory commands. Reads are issued for keys
/// admitted by the last stage; each valid exit pairs with the oldest
/// outstanding read, whose reply must have arrived before the write-back.
class RmwEngine {
 public:
  /// Queues an app reply. Replies arrive in read-issue order.
  void deliver(const MemReply& reply);

  /// True when `exit` is valid but its reply has not arrived yet.
  bool blocks(const Slot& exit) const;

  /// One app cycle. On backpressure nothing is consumed and the caller must
  /// stall the cascade and present the same output again. With `fold`, the
  /// write-back moves the shadow count into master.
  RmwResult step(const CascadeOutput& out, std::optional<MemReply> reply = std::nullopt,
                 bool fold = false, std::uint64_t cycle = 0);

  std::span<const Key> pending_reads() const { return pending_view_; }
  std::size_t outstanding() const { return pending_.size(); }
  std::size_t buffered_replies() const { return replies_.size(); }
  bool idle() const { return pending_.empty() && replies_.empty(); }

  /// Number of reads issued while the same key was already pending.
  std::uint64_t duplicate_pending() const { return duplicate_pending_; }
  std::uint64_t reads_issued() const { return reads_issued_; }
  std::uint64_t writes_issued() const { return writes_issued_; }

 private:
  std::deque<Key> pending_;
  std::vector<Key> pending_view_;
  std::unordered_map<Key, int> pending_count_;
  std::deque<MemReply> replies_;
  std::uint64_t duplicate_pending_ = 0;
  std::uint64_t reads_issued_ = 0;
  std::uint64_t writes_issued_ = 0;
};

/// Groups commands by kind in blocks of up to `block_size`. A read is never
/// emitted while a write that arrived before it is still queued; writes may
/// pass reads.
class CommandScheduler {
 public:
  explicit CommandScheduler(int block_size = 16);

  void push(MemOp op);

  /// Ops that would be emitted next, without dequeuing them.
  std::vector<MemOp> select(std::size_t capacity) const;
  /// Dequeues the first `n` ops of the last selection.
  void commit(std::size_t n);
  std::vector<MemOp> step(std::size_t capacity);

  bool empty() const { return reads_.empty() && writes_.empty(); }
  std::size_t queued_reads() const { return reads_.size(); }
  std::size_t queued_writes() const { return writes_.size(); }
  /// Increments carried by queued writes.
  std::uint64_t queued_increments() const { return queued_inc_; }
  int block_size() const { return block_size_; }

 private:
  struct Cursor {
    std::size_t ri = 0;
    std::size_t wi = 0;
    OpKind mode = OpKind::write;
    int in_block = 0;
  };
  std::optional<OpKind> pick(Cursor& c) const;

  int block_size_;
  std::deque<MemOp> reads_;
  std::deque<MemOp> writes_;
  Cursor cur_;
  std::uint64_t next_arrival_ = 0;
  std::uint64_t queued_inc_ = 0;
};

struct ArbiterResult {
  std::vector<MemOp> merged;
  std::size_t app_count = 0;
  std::size_t admin_count = 0;
};

/// Application ops always win; admin ops only fill lanes left idle.
ArbiterResult arbiter_step(std::span<const MemOp> app_ops, std::span<const MemOp> admin_ops,
                           std::size_t capacity);

}  // namespace cq
