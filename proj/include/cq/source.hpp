#pragma once

// Deterministic event sources.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cq/datapath.hpp"

namespace cq {

enum class SourceKind { uniform, zipf, constant_key, burst, sequential, trace };

const char* to_string(SourceKind k);
SourceKind source_kind_from_string(const std::string& s);

struct SourceSpec {
  SourceKind kind = SourceKind::uniform;
  Key key_space = Key{1} << 24;
  std::uint64_t count = 0;
  std::uint64_t seed = 1;
  double exponent = 1.0;     // zipf
  Key key = 0;               // constant_key; first key of sequential
  std::uint64_t period = 64;  // burst: every `period` events ...
  std::uint64_t width = 8;    // ... the first `width` share one key
  std::string path;          // trace
  double duty = 1.0;         // fraction of app cycles carrying an event
};

/// One entry per app cycle; nullopt is a cycle without an event.
using EventStream = std::vector<std::optional<Key>>;

EventStream gen_events(const SourceSpec& spec);

/// Trace text: one key per line (decimal or 0x-prefixed hex), `-` for an idle
/// cycle, `#` starts a comment. Throws TraceParseError with the line number.
EventStream parse_trace(std::istream& is, Key key_space);

/// Zipf(s) over ranks 1..n by rejection-inversion; constant time per draw.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double exponent);
  std::uint64_t operator()(std::mt19937_64& rng) const;

  /// Probability mass of rank 1 (for tests).
  static double top_mass(std::uint64_t n, double exponent);

 private:
  double h(double x) const;
  double h_integral(double x) const;
  double h_integral_inverse(double x) const;

  std::uint64_t n_;
  double s_;
  double h_integral_x1_;
  double h_integral_n_;
  double accept_;
};

}  // namespace cq
