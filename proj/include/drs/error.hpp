#pragma once

#include <stdexcept>
#include <string>

namespace drs {

enum class ErrorCode {
  NegativeCount,
  EmptyTable,
  ZeroOverlap,
  DomainError,
  InfeasibleMarginals,
  EnvelopeFailure,
  EmptyTruncation,
  NoConvergence,
  OptimizerFailure,
  EmptySample,
  ZeroWithinVariance,
  ParseError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace drs
