#pragma once

// Keys, count lanes, pipeline slots and the 48-bit cascade-bus encoding.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cq {

using Key = std::uint64_t;
using Count = std::uint32_t;

struct LayoutConfig {
  int key_bits = 24;
  int value_bits = 10;  // per count lane
  int lanes = 2;        // 1 (master only) or 2 (master + shadow)
  int bus_bits = 48;

  /// Bits used by valid flag, key and all count lanes.
  constexpr int occupancy() const { return 1 + key_bits + lanes * value_bits; }
  constexpr Count lane_max() const {
    return static_cast<Count>((std::uint64_t{1} << value_bits) - 1);
  }
  constexpr Key key_limit() const { return Key{1} << key_bits; }

  friend bool operator==(const LayoutConfig&, const LayoutConfig&) = default;
};

/// Throws OverflowingLayout (or ConfigError for nonsensical widths) if the
/// layout does not fit the bus.
void validate_layout(const LayoutConfig& layout);

/// One pipeline payload. The canonical empty slot is all zero.
struct Slot {
  bool valid = false;
  Key key = 0;
  Count master = 0;
  Count shadow = 0;

  static constexpr Slot empty() { return {}; }
  static constexpr Slot event(Key k, Count m, Count s = 0) { return {true, k, m, s}; }

  friend bool operator==(const Slot&, const Slot&) = default;
};

std::ostream& operator<<(std::ostream& os, const Slot& s);

/// Lane-wise addition of `inc` into `into`, throwing LaneOverflow when a lane
/// would exceed the layout width.
void merge_lanes(Slot& into, const Slot& inc, const LayoutConfig& layout);

/// A 48-bit word as carried on the DSP cascade bus. Field order, msb to lsb:
/// valid | key | shadow | master, right-aligned to bit 0. With a single lane
/// the shadow field is absent.
struct PackedWord {
  std::uint64_t bits = 0;
  friend bool operator==(const PackedWord&, const PackedWord&) = default;
};

PackedWord pack_slot(const Slot& slot, const LayoutConfig& layout);
Slot unpack_slot(PackedWord word, const LayoutConfig& layout);

/// Binary trace dumps: little-endian 8-byte words, top 16 bits zero.
void write_packed_trace(std::ostream& os, std::span<const PackedWord> words);
std::vector<PackedWord> read_packed_trace(std::istream& is);

}  // namespace cq
