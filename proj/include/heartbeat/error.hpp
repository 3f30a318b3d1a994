#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heartbeat {

enum class ErrorKind {
  kInvalidArgument,
  kSignalTooShort,
  kNonFiniteSample,
  kLengthMismatch,
  kMalformedRow,
  kMissingColumn,
  kChannelLengthMismatch,
  kInvalidSampleRate,
  kTruthLengthMismatch,
  kMissingTruth,
  kUndefinedCorrelation,
  kIo,
  kConfig,
  kInvariant,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kSignalTooShort: return "signal too short";
    case ErrorKind::kNonFiniteSample: return "non-finite sample";
    case ErrorKind::kLengthMismatch: return "length mismatch";
    case ErrorKind::kMalformedRow: return "malformed row";
    case ErrorKind::kMissingColumn: return "missing column";
    case ErrorKind::kChannelLengthMismatch: return "channel length mismatch";
    case ErrorKind::kInvalidSampleRate: return "invalid sample rate";
    case ErrorKind::kTruthLengthMismatch: return "truth length mismatch";
    case ErrorKind::kMissingTruth: return "missing truth";
    case ErrorKind::kUndefinedCorrelation: return "undefined correlation";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kInvariant: return "invariant violation";
  }
  return "unknown";
}

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace heartbeat
