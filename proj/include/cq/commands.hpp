#pragma once

// Commands and replies crossing the scheduler / memory boundary.

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "cq/datapath.hpp"

namespace cq {

enum class OpKind : std::uint8_t { read, write };
enum class Requester : std::uint8_t { app, admin };

/// Absolute counter values carried by a write.
struct CounterWord {
  std::uint64_t master = 0;
  std::uint64_t shadow = 0;
  friend bool operator==(const CounterWord&, const CounterWord&) = default;
};

struct MemOp {
  OpKind kind = OpKind::read;
  Key address = 0;
  std::optional<CounterWord> data;  // writes only
  std::uint64_t issue_cycle = 0;    // app-clock cycle the op was created
  std::uint64_t arrival = 0;        // scheduler arrival stamp
  Requester source = Requester::app;
  // Increments folded into a write (bookkeeping for conservation checks).
  std::uint64_t inc_master = 0;
  std::uint64_t inc_shadow = 0;

  static MemOp read(Key k, std::uint64_t cycle = 0, Requester src = Requester::app) {
    return MemOp{OpKind::read, k, std::nullopt, cycle, 0, src};
  }
  static MemOp write(Key k, CounterWord w, std::uint64_t cycle = 0,
                     Requester src = Requester::app) {
    return MemOp{OpKind::write, k, w, cycle, 0, src};
  }
  bool is_read() const { return kind == OpKind::read; }
};

struct MemReply {
  Key address = 0;
  std::uint64_t master = 0;
  std::uint64_t shadow = 0;
  std::uint64_t reply_cycle = 0;  // app-clock cycle the data is available
  Requester source = Requester::app;
};

std::ostream& operator<<(std::ostream& os, const MemOp& op);

}  // namespace cq
