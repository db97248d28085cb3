#include "cq/conflation.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_map>

#include "cq/errors.hpp"

namespace cq {

int ScheduleConfig::total_matchers() const {
  int n = 0;
  for (const auto& s : stages) n += s.matchers;
  return n;
}

ScheduleConfig ScheduleConfig::standard() { return ScheduleConfig{{{0, 6}, {6, 244}}}; }

void validate_schedule(const ScheduleConfig& schedule) {
  if (schedule.stages.empty()) throw ConfigError("schedule has no stages");
  for (std::size_t i = 0; i < schedule.stages.size(); ++i) {
    const auto& s = schedule.stages[i];
    if (s.matchers < 1)
      throw ConfigError("stage " + std::to_string(i) + ": matchers must be >= 1");
    if (s.gap_in < 0) throw ConfigError("stage " + std::to_string(i) + ": gap_in must be >= 0");
    if (i == 0 && s.gap_in != 0)
      throw ConfigError("stage 0 must have gap_in = 0: raw input carries no spacing guarantee");
    if (i > 0 && s.gap_in > schedule.stages[i - 1].gap_out())
      throw ConfigError("stage " + std::to_string(i) + ": gap_in " + std::to_string(s.gap_in) +
                        " exceeds the previous stage's gap_out " +
                        std::to_string(schedule.stages[i - 1].gap_out()));
  }
}

// ---------------------------------------------------------------------------
// RefStage

RefStage::RefStage(int depth, LayoutConfig layout) : layout_(layout) {
  if (depth < 1) throw ConfigError("reference stage depth must be >= 1");
  slots_.assign(static_cast<std::size_t>(depth), Slot::empty());
}

StageOutput RefStage::step(const Slot& input, bool stall) {
  StageOutput r;
  if (stall) return r;

  Slot entry = Slot::empty();
  if (input.valid) {
    std::size_t hit = slots_.size();
    for (std::size_t j = 0; j < slots_.size(); ++j) {
      if (slots_[j].valid && slots_[j].key == input.key) {
        if (hit != slots_.size())
          throw InternalConsistency("key " + std::to_string(input.key) +
                                    " pending twice in reference stage");
        hit = j;
      }
    }
    if (hit != slots_.size()) {
      merge_lanes(slots_[hit], input, layout_);
      r.matched = true;
    } else {
      entry = input;
    }
  }

  r.out = slots_.back();
  std::copy_backward(slots_.begin(), slots_.end() - 1, slots_.end());
  slots_.front() = entry;
  r.entry = entry;
  r.admitted = entry.valid;
  return r;
}

std::uint64_t RefStage::inflight_total() const {
  std::uint64_t t = 0;
  for (const auto& s : slots_) t += std::uint64_t{s.master} + s.shadow;
  return t;
}

// ---------------------------------------------------------------------------
// DspStage

DspStage::DspStage(StageConfig config, LayoutConfig layout) : config_(config), layout_(layout) {
  if (config.matchers < 1) throw ConfigError("matchers must be >= 1");
  if (config.gap_in < 0) throw ConfigError("gap_in must be >= 0");
  const auto n = static_cast<std::size_t>(config.matchers);
  const auto g = static_cast<std::size_t>(config.gap_in);

  ring_.assign(n + 1, Slot::empty());
  tags_.assign(n + 1, 0);
  hits_.assign(n, 0);
  delay_.assign(g, Slot::empty());

  if (g > 0) {
    // Smallest fan-in whose g-level tree covers all comparators.
    auto covers = [&](std::size_t f) {
      std::size_t reach = 1;
      for (std::size_t i = 0; i < g && reach < n; ++i) reach *= f;
      return reach >= n;
    };
    std::size_t f = 1;
    while (!covers(f)) ++f;
    fanin_ = static_cast<int>(f);
    std::size_t width = n;
    for (std::size_t i = 0; i < g; ++i) {
      width = (width + f - 1) / f;
      tree_.emplace_back(width, 0);
    }
  } else {
    fanin_ = config.matchers;
  }
}

Slot DspStage::exiting() const {
  Slot out = ring_[pidx(ring_.size() - 1)];
  const auto last = static_cast<std::uint32_t>(config_.matchers - 1);
  if (!match_.empty() && match_.back() == last) merge_lanes(out, v_reg_, layout_);
  return out;
}

StageOutput DspStage::step(const Slot& raw_input, bool stall) {
  StageOutput r;
  if (stall) return r;

  const Slot input = raw_input.valid ? raw_input : Slot::empty();
  const std::size_t n = static_cast<std::size_t>(config_.matchers);
  const std::size_t g = static_cast<std::size_t>(config_.gap_in);
  const std::size_t size = ring_.size();

  // Trailing slice: last registered match lands on the leaving entry.
  r.out = exiting();

  // Comparators against P[0..n-1].
  std::vector<std::uint32_t> new_match;
  if (input.valid) {
    const std::uint64_t xt = tag_of(input);
    const std::size_t first = std::min(n, size - head_);
    for (std::size_t i = 0; i < first; ++i) hits_[i] = tags_[head_ + i] == xt;
    for (std::size_t i = first; i < n; ++i) hits_[i] = tags_[i - first] == xt;
    if (std::find(hits_.begin(), hits_.end(), 1) != hits_.end()) {
      for (std::size_t i = 0; i < n; ++i)
        if (hits_[i]) new_match.push_back(static_cast<std::uint32_t>(i));
    }
  } else {
    std::fill(hits_.begin(), hits_.end(), 0);
  }
  r.multi_match = new_match.size() > 1;

  // Admission mux with (possibly pipelined) match feedback.
  bool feedback = false;
  Slot candidate;
  if (g == 0) {
    feedback = !new_match.empty();
    candidate = input;
  } else {
    feedback = tree_[g - 1][0] != 0;
    candidate = delay_[didx(g - 1)];
  }
  const Slot admit = (candidate.valid && !feedback) ? candidate : Slot::empty();
  r.matched = candidate.valid && feedback;
  r.admitted = admit.valid;
  r.entry = admit;
  if (g > 0 && admit.valid) {
    const std::uint64_t at = tag_of(admit);
    for (std::size_t i = 0; i < n; ++i) {
      if (tags_[pidx(i)] == at) {
        r.hazard = true;
        break;
      }
    }
  }

  // Merges registered last cycle, applied in the next slice.
  for (const auto q : match_) {
    if (q + 1 < n) merge_lanes(ring_[pidx(q + 1)], v_reg_, layout_);
  }

  head_ = (head_ + size - 1) % size;
  ring_[head_] = admit;
  tags_[head_] = tag_of(admit);

  match_ = std::move(new_match);
  v_reg_ = input;

  if (g > 0) {
    const auto f = static_cast<std::size_t>(fanin_);
    for (std::size_t lvl = g - 1; lvl >= 1; --lvl) {
      auto& dst = tree_[lvl];
      const auto& src = tree_[lvl - 1];
      for (std::size_t k = 0; k < dst.size(); ++k) {
        std::uint8_t acc = 0;
        for (std::size_t i = k * f; i < std::min(src.size(), (k + 1) * f); ++i) acc |= src[i];
        dst[k] = acc;
      }
    }
    auto& first = tree_[0];
    for (std::size_t k = 0; k < first.size(); ++k) {
      std::uint8_t acc = 0;
      for (std::size_t i = k * f; i < std::min(n, (k + 1) * f); ++i) acc |= hits_[i];
      first[k] = acc;
    }
    dhead_ = (dhead_ + g - 1) % g;
    delay_[dhead_] = input;
  }
  return r;
}

bool DspStage::empty() const {
  auto invalid = [](const Slot& s) { return !s.valid; };
  return std::all_of(ring_.begin(), ring_.end(), invalid) &&
         std::all_of(delay_.begin(), delay_.end(), invalid);
}

std::uint64_t DspStage::inflight_total() const {
  auto lanes = [](const Slot& s) { return std::uint64_t{s.master} + s.shadow; };
  std::uint64_t t = 0;
  for (const auto& s : ring_) t += lanes(s);
  t += match_.size() * lanes(v_reg_);
  for (std::size_t j = 0; j < delay_.size(); ++j) {
    const auto& lvl = tree_[j];
    const bool matched = std::find(lvl.begin(), lvl.end(), 1) != lvl.end();
    if (!matched) t += lanes(delay_[didx(j)]);
  }
  return t;
}

std::vector<Slot> DspStage::pending() const {
  std::vector<Slot> out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(config_.matchers); ++i)
    if (ring_[pidx(i)].valid) out.push_back(ring_[pidx(i)]);
  return out;
}

// ---------------------------------------------------------------------------
// Cascade

Cascade::Cascade(const ScheduleConfig& schedule, LayoutConfig layout) {
  validate_schedule(schedule);
  for (const auto& s : schedule.stages) stages_.emplace_back(s, layout);
  last_.resize(stages_.size());
  last_in_.resize(stages_.size());
}

CascadeOutput Cascade::step(const Slot& input, bool stall) {
  CascadeOutput r;
  Slot x = stall ? Slot::empty() : input;
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    last_in_[i] = x;
    last_[i] = stages_[i].step(x, stall);
    r.conflations += last_[i].matched ? 1 : 0;
    r.hazards += last_[i].hazard ? 1 : 0;
    x = last_[i].out;
  }
  r.final = last_.back();
  if (r.final.admitted) r.read_request = r.final.entry.key;
  return r;
}

int Cascade::latency() const {
  int l = 0;
  for (const auto& s : stages_) l += s.latency();
  return l;
}

bool Cascade::empty() const {
  return std::all_of(stages_.begin(), stages_.end(), [](const DspStage& s) { return s.empty(); });
}

std::uint64_t Cascade::inflight_total() const {
  std::uint64_t t = 0;
  for (const auto& s : stages_) t += s.inflight_total();
  return t;
}

std::optional<std::size_t> min_key_gap(std::span<const Slot> stream) {
  std::unordered_map<Key, std::size_t> last_seen;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!stream[i].valid) continue;
    auto [it, inserted] = last_seen.try_emplace(stream[i].key, i);
    if (!inserted) {
      const std::size_t d = i - it->second;
      if (!best || d < *best) best = d;
      it->second = i;
    }
  }
  return best;
}

}  // namespace cq
