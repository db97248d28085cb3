#pragma once

// Independent reference models used only by tests. They share no code with
// the library beyond plain data types.

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace oracle {

struct Item {
  bool valid = false;
  std::uint64_t key = 0;
  std::uint64_t count = 0;
  bool operator==(const Item&) const = default;
};

/// Brute-force sequential conflation queue of fixed depth. Each arriving
/// item is merged into any pending item with the same key (including the one
/// about to leave); otherwise it joins the queue. One item leaves per step.
class SequentialQueue {
 public:
  explicit SequentialQueue(std::size_t depth) : q_(depth) {}

  Item step(const Item& in) {
    bool merged = false;
    if (in.valid) {
      for (auto& e : q_) {
        if (e.valid && e.key == in.key) {
          e.count += in.count;
          merged = true;
          break;
        }
      }
    }
    const Item out = q_.back();
    q_.pop_back();
    q_.push_front(merged ? Item{} : in);
    return out;
  }

 private:
  std::deque<Item> q_;  // front is newest
};

/// Effective rate of a memory serving alternating blocks of `block` reads and
/// `block` writes over `banks` banks round-robin, one command slot per tick.
/// A kind switch idles the bus for `turnaround` ticks; bank reuse inside a
/// block waits for `trc`; refresh removes `penalty` ticks of every `interval`.
inline double block_schedule_rate(int block, int banks, int trc, int turnaround,
                                  std::uint64_t interval, std::uint64_t penalty) {
  const int reuse = std::min(block, banks);
  const double per_op = std::max(1.0, static_cast<double>(trc) / reuse);
  const double busy = 2.0 * block * per_op + 2.0 * turnaround;
  double rate = 2.0 * block / busy;
  if (interval > 0) rate *= 1.0 - static_cast<double>(penalty) / static_cast<double>(interval);
  return rate;
}

/// Probability of the most frequent rank under Zipf(s) on n ranks.
inline double zipf_rank1_mass(std::uint64_t n, double s) {
  double h = 0.0;
  for (std::uint64_t k = 1; k <= n; ++k) h += 1.0 / std::pow(static_cast<double>(k), s);
  return 1.0 / h;
}

/// Histogram of a plain key list.
inline std::map<std::uint64_t, std::uint64_t> histogram(const std::vector<std::optional<std::uint64_t>>& ev,
                                                        std::size_t first = 0,
                                                        std::size_t last = SIZE_MAX) {
  std::map<std::uint64_t, std::uint64_t> h;
  for (std::size_t i = first; i < ev.size() && i < last; ++i)
    if (ev[i]) ++h[*ev[i]];
  return h;
}

}  // namespace oracle
