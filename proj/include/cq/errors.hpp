#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cq {

/// Base class of every error raised by the simulator and its tools.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layout does not fit the 48-bit cascade bus.
class OverflowingLayout : public Error {
 public:
  using Error::Error;
};

/// A slot field does not fit its declared width.
class FieldOverflow : public Error {
 public:
  using Error::Error;
};

/// A packed word has bits set above the layout occupancy.
class MalformedWord : public Error {
 public:
  using Error::Error;
};

/// Adding increments exceeded the width of a count lane.
class LaneOverflow : public Error {
 public:
  using Error::Error;
};

/// A memory reply or exiting slot did not pair with the head of the
/// pending-read queue. Ordering is broken.
class ReplyKeyMismatch : public Error {
 public:
  using Error::Error;
};

class SnapshotOverlap : public Error {
 public:
  using Error::Error;
};

/// Invalid run, schedule or memory configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class TraceParseError : public Error {
 public:
  TraceParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An internal invariant was violated (e.g. multiple matches in the
/// reference stage).
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace cq
