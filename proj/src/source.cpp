#include "cq/source.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include "cq/errors.hpp"

namespace cq {

const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::uniform: return "uniform";
    case SourceKind::zipf: return "zipf";
    case SourceKind::constant_key: return "constant_key";
    case SourceKind::burst: return "burst";
    case SourceKind::sequential: return "sequential";
    case SourceKind::trace: return "trace";
  }
  return "?";
}

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "uniform") return SourceKind::uniform;
  if (s == "zipf") return SourceKind::zipf;
  if (s == "constant_key" || s == "constant") return SourceKind::constant_key;
  if (s == "burst") return SourceKind::burst;
  if (s == "sequential") return SourceKind::sequential;
  if (s == "trace") return SourceKind::trace;
  throw ConfigError("unknown source kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Rejection-inversion sampling (Hörmann & Derflinger).

namespace {
double helper1(double x) {
  return std::abs(x) > 1e-8 ? std::log1p(x) / x : 1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
}
double helper2(double x) {
  return std::abs(x) > 1e-8 ? std::expm1(x) / x : 1.0 + x * 0.5 * (1.0 + x / 3.0 * (1.0 + 0.25 * x));
}
}  // namespace

ZipfSampler::ZipfSampler(std::uint64_t n, double exponent) : n_(n), s_(exponent) {
  if (n == 0) throw ConfigError("zipf needs a non-empty key space");
  if (exponent < 0.0) throw ConfigError("zipf exponent must be >= 0");
  h_integral_x1_ = h_integral(1.5) - 1.0;
  h_integral_n_ = h_integral(static_cast<double>(n) + 0.5);
  accept_ = 2.0 - h_integral_inverse(h_integral(2.5) - h(2.0));
}

double ZipfSampler::h(double x) const { return std::exp(-s_ * std::log(x)); }

double ZipfSampler::h_integral(double x) const {
  const double lx = std::log(x);
  return helper2((1.0 - s_) * lx) * lx;
}

double ZipfSampler::h_integral_inverse(double x) const {
  double t = x * (1.0 - s_);
  if (t < -1.0) t = -1.0;
  return std::exp(helper1(t) * x);
}

std::uint64_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double u = h_integral_n_ + unit(rng) * (h_integral_x1_ - h_integral_n_);
    const double x = h_integral_inverse(u);
    auto k = static_cast<std::uint64_t>(x + 0.5);
    if (k < 1) k = 1;
    if (k > n_) k = n_;
    const double kd = static_cast<double>(k);
    if (kd - x <= accept_ || u >= h_integral(kd + 0.5) - h(kd)) return k;
  }
}

double ZipfSampler::top_mass(std::uint64_t n, double exponent) {
  double norm = 0.0;
  for (std::uint64_t r = n; r >= 1; --r) norm += std::pow(static_cast<double>(r), -exponent);
  return 1.0 / norm;
}

// ---------------------------------------------------------------------------

EventStream parse_trace(std::istream& is, Key key_space) {
  EventStream out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(b, e - b + 1);
    if (tok == "-") {
      out.emplace_back(std::nullopt);
      continue;
    }
    std::size_t used = 0;
    Key k = 0;
    try {
      k = std::stoull(tok, &used, 0);
    } catch (const std::exception&) {
      throw TraceParseError("not a key: '" + tok + "'", lineno);
    }
    if (used != tok.size() || tok[0] == '-') throw TraceParseError("not a key: '" + tok + "'", lineno);
    if (k >= key_space) throw TraceParseError("key " + tok + " outside the key space", lineno);
    out.emplace_back(k);
  }
  return out;
}

EventStream gen_events(const SourceSpec& spec) {
  if (spec.key_space == 0) throw ConfigError("key_space must be >= 1");
  if (!(spec.duty > 0.0 && spec.duty <= 1.0)) throw ConfigError("duty must be in (0, 1]");

  std::vector<Key> keys;
  if (spec.kind == SourceKind::trace) {
    std::ifstream in(spec.path);
    if (!in) throw ConfigError("cannot open trace '" + spec.path + "'");
    auto stream = parse_trace(in, spec.key_space);
    if (spec.count > 0) {
      EventStream cut;
      std::uint64_t n = 0;
      for (const auto& e : stream) {
        if (e && n == spec.count) break;
        cut.push_back(e);
        if (e) ++n;
      }
      return cut;
    }
    return stream;
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<Key> uniform(0, spec.key_space - 1);
  keys.reserve(spec.count);
  switch (spec.kind) {
    case SourceKind::uniform:
      for (std::uint64_t i = 0; i < spec.count; ++i) keys.push_back(uniform(rng));
      break;
    case SourceKind::zipf: {
      const ZipfSampler zipf(spec.key_space, spec.exponent);
      for (std::uint64_t i = 0; i < spec.count; ++i) keys.push_back(zipf(rng) - 1);
      break;
    }
    case SourceKind::constant_key:
      if (spec.key >= spec.key_space) throw ConfigError("constant key outside the key space");
      keys.assign(spec.count, spec.key);
      break;
    case SourceKind::burst: {
      if (spec.period == 0 || spec.width > spec.period)
        throw ConfigError("burst needs period >= 1 and width <= period");
      Key burst_key = 0;
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        const auto phase = i % spec.period;
        if (phase == 0) burst_key = uniform(rng);
        keys.push_back(phase < spec.width ? burst_key : uniform(rng));
      }
      break;
    }
    case SourceKind::sequential:
      for (std::uint64_t i = 0; i < spec.count; ++i) keys.push_back((spec.key + i) % spec.key_space);
      break;
    case SourceKind::trace:
      break;
  }

  EventStream out;
  out.reserve(static_cast<std::size_t>(static_cast<double>(keys.size()) / spec.duty) + 1);
  double credit = 0.0;
  for (const Key k : keys) {
    for (;;) {
      credit += spec.duty;
      if (credit >= 1.0 - 1e-12) {
        credit -= 1.0;
        out.emplace_back(k);
        break;
      }
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace cq
