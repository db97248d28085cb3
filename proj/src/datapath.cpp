#include "cq/datapath.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <string>

#include "cq/errors.hpp"

namespace cq {

void validate_layout(const LayoutConfig& layout) {
  if (layout.key_bits < 1 || layout.value_bits < 1)
    throw ConfigError("key_bits and value_bits must be >= 1");
  if (layout.lanes != 1 && layout.lanes != 2)
    throw ConfigError("lanes must be 1 or 2, got " + std::to_string(layout.lanes));
  if (layout.bus_bits < 1 || layout.bus_bits > 64)
    throw ConfigError("bus_bits must be in [1, 64]");
  if (layout.occupancy() > layout.bus_bits)
    throw OverflowingLayout("layout needs " + std::to_string(layout.occupancy()) +
                            " bits but the bus carries " + std::to_string(layout.bus_bits));
}

std::ostream& operator<<(std::ostream& os, const Slot& s) {
  if (!s.valid) return os << "{-}";
  return os << "{k=" << s.key << ",m=" << s.master << ",s=" << s.shadow << "}";
}

void merge_lanes(Slot& into, const Slot& inc, const LayoutConfig& layout) {
  const std::uint64_t m = std::uint64_t{into.master} + inc.master;
  const std::uint64_t s = std::uint64_t{into.shadow} + inc.shadow;
  if (m > layout.lane_max() || s > layout.lane_max())
    throw LaneOverflow("merge of key " + std::to_string(into.key) + " exceeds " +
                       std::to_string(layout.value_bits) + "-bit count lane");
  into.master = static_cast<Count>(m);
  into.shadow = static_cast<Count>(s);
}

PackedWord pack_slot(const Slot& slot, const LayoutConfig& layout) {
  const int kb = layout.key_bits;
  const int vb = layout.value_bits;
  if (slot.key >= layout.key_limit())
    throw FieldOverflow("key " + std::to_string(slot.key) + " exceeds " + std::to_string(kb) +
                        " bits");
  if (slot.master > layout.lane_max() || slot.shadow > layout.lane_max())
    throw FieldOverflow("count exceeds " + std::to_string(vb) + " bits");
  if (layout.lanes == 1 && slot.shadow != 0)
    throw FieldOverflow("single-lane layout cannot carry a shadow count");

  std::uint64_t bits = slot.master;
  int pos = vb;
  if (layout.lanes == 2) {
    bits |= std::uint64_t{slot.shadow} << pos;
    pos += vb;
  }
  bits |= slot.key << pos;
  pos += kb;
  bits |= std::uint64_t{slot.valid} << pos;
  return PackedWord{bits};
}

Slot unpack_slot(PackedWord word, const LayoutConfig& layout) {
  const int occ = layout.occupancy();
  if (occ < 64 && (word.bits >> occ) != 0)
    throw MalformedWord("bits set above the " + std::to_string(occ) + "-bit occupancy");
  const int kb = layout.key_bits;
  const int vb = layout.value_bits;
  const std::uint64_t vmask = (std::uint64_t{1} << vb) - 1;
  const std::uint64_t kmask = (std::uint64_t{1} << kb) - 1;

  Slot s;
  s.master = static_cast<Count>(word.bits & vmask);
  int pos = vb;
  if (layout.lanes == 2) {
    s.shadow = static_cast<Count>((word.bits >> pos) & vmask);
    pos += vb;
  }
  s.key = (word.bits >> pos) & kmask;
  pos += kb;
  s.valid = ((word.bits >> pos) & 1u) != 0;
  return s;
}

void write_packed_trace(std::ostream& os, std::span<const PackedWord> words) {
  std::array<char, 8> buf{};
  for (const auto& w : words) {
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((w.bits >> (8 * i)) & 0xffu);
    os.write(buf.data(), buf.size());
  }
}

std::vector<PackedWord> read_packed_trace(std::istream& is) {
  std::vector<PackedWord> out;
  std::array<unsigned char, 8> buf{};
  while (is.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    out.push_back(PackedWord{v});
  }
  if (is.gcount() != 0) throw MalformedWord("truncated packed trace");
  return out;
}

}  // namespace cq
