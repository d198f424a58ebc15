#include "crisk/error.hpp"

namespace crisk {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyChain: return "EmptyChain";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::OrderExceeded: return "OrderExceeded";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::BracketTooNarrow: return "BracketTooNarrow";
    case ErrorKind::InfeasibleDomain: return "InfeasibleDomain";
    case ErrorKind::BadParameters: return "BadParameters";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace crisk
