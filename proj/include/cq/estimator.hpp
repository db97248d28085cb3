#pragma once

// Analytical FPGA resource models for three ways of providing the
// associative lookup: a DSP-slice chain, RAM-based CAM emulation and
// (as cited measurements only) plain fabric logic.

#include <cstdint>
#include <string>
#include <vector>

#include "cq/conflation.hpp"
#include "cq/datapath.hpp"

namespace cq {

struct CostReport {
  std::int64_t luts = 0;
  std::int64_t ffs = 0;
  std::int64_t dsps = 0;
  std::int64_t brams = 0;
  std::string notes;
};

/// Storage overhead of slicing keys into w-bit RAM address slices: 2^w / w.
double cam_overhead_factor(int w);

/// Tag LUTRAM alone: ceil(key_width / w) * depth.
std::int64_t ram_cam_tag_luts(int key_width, int depth, int w);

/// RAM-based CAM emulation: tag LUTRAM plus one LUT per entry to complete the
/// match vector, doubled when a second port must be emulated by duplication.
/// Two block RAMs hold the key ring buffer and the increment values.
CostReport ram_cam_cost(int key_width, int depth, int w, bool dual_port);

struct DspChainBreakdown {
  std::int64_t matchers = 0;
  std::int64_t trailing_merges = 0;  // one per stage
  std::int64_t segment_breaks = 0;   // per stage: ceil(matchers / limit) - 1
  std::int64_t total() const { return matchers + trailing_merges + segment_breaks; }
};

DspChainBreakdown dsp_chain_breakdown(const ScheduleConfig& schedule, int segment_limit);
CostReport dsp_chain_cost(const ScheduleConfig& schedule, int segment_limit);

/// Synthesis results quoted for the 0-6-250 schedule. They are measurements,
/// not model output.
struct ReferenceFigures {
  static constexpr std::int64_t mapped_luts_min = 561;
  static constexpr std::int64_t mapped_luts_max = 570;
  static constexpr std::int64_t mapped_ffs_min = 982;
  static constexpr std::int64_t mapped_ffs_max = 1160;
  static constexpr std::int64_t mapped_dsps = 257;
  static constexpr std::int64_t fabric_luts_min = 6128;
  static constexpr std::int64_t fabric_luts_max = 6130;
  static constexpr std::int64_t fabric_ffs = 11406;
  static constexpr std::int64_t freed_luts = 5550;
  static constexpr std::int64_t freed_ffs = 10000;  // lower bound, "more than"
};

struct CompareRow {
  std::string option;
  CostReport cost;
  bool cited = false;  // row reproduces a quoted measurement
};

struct CompareTable {
  std::vector<CompareRow> rows;
  double luts_per_dsp = 0.0;
  double ffs_per_dsp = 0.0;
  double overhead_factor = 0.0;
};

CompareTable compare_report(const LayoutConfig& layout, const ScheduleConfig& schedule, int w,
                            int segment_limit = 42);

std::string format_table(const CompareTable& table);

}  // namespace cq
