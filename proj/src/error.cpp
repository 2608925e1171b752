#include "drs/error.hpp"

namespace drs {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::ZeroOverlap: return "ZeroOverlap";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InfeasibleMarginals: return "InfeasibleMarginals";
    case ErrorCode::EnvelopeFailure: return "EnvelopeFailure";
    case ErrorCode::EmptyTruncation: return "EmptyTruncation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OptimizerFailure: return "OptimizerFailure";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ZeroWithinVariance: return "ZeroWithinVariance";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace drs
