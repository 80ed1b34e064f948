#pragma once

#include <stdexcept>
#include <string>

namespace mulpart {

// Error categories. The numeric values are part of the C API (mulpart.h).
enum class ErrorCode : int {
  Param = 1,
  Domain = 2,
  Regime = 3,
  NegativeCoefficient = 4,
  Quadrature = 5,
  Convergence = 6,
  Truncation = 7,
  Tail = 8,
  Budget = 9,
  Table = 10,
  FitUnstable = 11,
  UnknownName = 12,
  Config = 13,
  Io = 14,
  Internal = 15,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define MULPART_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

MULPART_DEFINE_ERROR(ParamError, Param)
MULPART_DEFINE_ERROR(DomainError, Domain)
MULPART_DEFINE_ERROR(RegimeError, Regime)
MULPART_DEFINE_ERROR(NegativeCoefficientError, NegativeCoefficient)
MULPART_DEFINE_ERROR(QuadratureError, Quadrature)
MULPART_DEFINE_ERROR(ConvergenceError, Convergence)
MULPART_DEFINE_ERROR(TruncationError, Truncation)
MULPART_DEFINE_ERROR(TailError, Tail)
MULPART_DEFINE_ERROR(TableError, Table)
MULPART_DEFINE_ERROR(UnknownNameError, UnknownName)
MULPART_DEFINE_ERROR(ConfigError, Config)
MULPART_DEFINE_ERROR(IoError, Io)

#undef MULPART_DEFINE_ERROR

// Raised when the rejection sampler runs out of attempts.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(long long attempts, long long budget, double acceptance_rate,
                  const std::string& what)
      : Error(ErrorCode::Budget, what),
        attempts_(attempts),
        budget_(budget),
        acceptance_rate_(acceptance_rate) {}

  long long attempts() const noexcept { return attempts_; }
  long long budget() const noexcept { return budget_; }
  double acceptance_rate() const noexcept { return acceptance_rate_; }

 private:
  long long attempts_;
  long long budget_;
  double acceptance_rate_;
};

}  // namespace mulpart
