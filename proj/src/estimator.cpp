#include "cq/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cq/errors.hpp"

namespace cq {

namespace {
std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }
}  // namespace

double cam_overhead_factor(int w) {
  if (w < 1 || w > 62) throw ConfigError("slice width must be in [1, 62]");
  return std::ldexp(1.0, w) / w;
}

std::int64_t ram_cam_tag_luts(int key_width, int depth, int w) {
  if (key_width < 1 || depth < 1 || w < 1) throw ConfigError("RAM-CAM parameters must be >= 1");
  return ceil_div(key_width, w) * depth;
}

CostReport ram_cam_cost(int key_width, int depth, int w, bool dual_port) {
  CostReport r;
  const std::int64_t single = ram_cam_tag_luts(key_width, depth, w) + depth;
  r.luts = dual_port ? 2 * single : single;
  r.brams = 2;
  r.notes = dual_port ? "tag LUTRAM + match completion, duplicated for second port"
                      : "tag LUTRAM + match completion";
  return r;
}

DspChainBreakdown dsp_chain_breakdown(const ScheduleConfig& schedule, int segment_limit) {
  if (segment_limit < 1) throw ConfigError("segment limit must be >= 1");
  DspChainBreakdown b;
  for (const auto& s : schedule.stages) {
    b.matchers += s.matchers;
    b.trailing_merges += 1;
    b.segment_breaks += ceil_div(s.matchers, segment_limit) - 1;
  }
  return b;
}

CostReport dsp_chain_cost(const ScheduleConfig& schedule, int segment_limit) {
  const auto b = dsp_chain_breakdown(schedule, segment_limit);
  CostReport r;
  r.dsps = b.total();
  r.notes = std::to_string(b.matchers) + " matchers + " + std::to_string(b.trailing_merges) +
            " trailing merges + " + std::to_string(b.segment_breaks) + " segment breaks";
  return r;
}

CompareTable compare_report(const LayoutConfig& layout, const ScheduleConfig& schedule, int w,
                            int segment_limit) {
  validate_layout(layout);
  validate_schedule(schedule);
  CompareTable t;
  t.overhead_factor = cam_overhead_factor(w);

  t.rows.push_back({"dsp-chain (model)", dsp_chain_cost(schedule, segment_limit), false});
  const int depth = schedule.stages.back().matchers;
  t.rows.push_back({"ram-cam (model)", ram_cam_cost(layout.key_bits, depth, w, true), false});

  using R = ReferenceFigures;
  CostReport mapped;
  mapped.luts = R::mapped_luts_max;
  mapped.ffs = R::mapped_ffs_max;
  mapped.dsps = R::mapped_dsps;
  mapped.notes = "measured, " + std::to_string(R::mapped_luts_min) + "-" +
                 std::to_string(R::mapped_luts_max) + " LUTs, " + std::to_string(R::mapped_ffs_min) +
                 "-" + std::to_string(R::mapped_ffs_max) + " FFs over 350-390 MHz";
  t.rows.push_back({"dsp-mapped (cited)", mapped, true});

  CostReport fabric;
  fabric.luts = R::fabric_luts_max;
  fabric.ffs = R::fabric_ffs;
  fabric.notes = "measured, " + std::to_string(R::fabric_luts_min) + "-" +
                 std::to_string(R::fabric_luts_max) + " LUTs over 350-390 MHz";
  t.rows.push_back({"fabric (cited)", fabric, true});

  t.luts_per_dsp = static_cast<double>(R::freed_luts) / R::mapped_dsps;
  t.ffs_per_dsp = static_cast<double>(R::freed_ffs) / R::mapped_dsps;
  return t;
}

std::string format_table(const CompareTable& t) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %8s %8s %6s %6s  %s\n", "option", "LUTs", "FFs", "DSPs",
                "BRAMs", "notes");
  os << line;
  for (const auto& r : t.rows) {
    std::snprintf(line, sizeof line, "%-20s %8lld %8lld %6lld %6lld  %s\n", r.option.c_str(),
                  static_cast<long long>(r.cost.luts), static_cast<long long>(r.cost.ffs),
                  static_cast<long long>(r.cost.dsps), static_cast<long long>(r.cost.brams),
                  r.cost.notes.c_str());
    os << line;
  }
  std::snprintf(line, sizeof line,
                "trade: %.1f LUTs per DSP slice, %.1f FFs per DSP slice; CAM overhead factor %.1fx\n",
                t.luts_per_dsp, t.ffs_per_dsp, t.overhead_factor);
  os << line;
  return os.str();
}

}  // namespace cq
