#pragma once

#include <stdexcept>
#include <string>

namespace tempered {

// Base of every error raised by the library. The CLI maps subclasses to
// exit codes (see tools/tempered.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TEMPERED_DEFINE_ERROR(Name)          \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

// fields
TEMPERED_DEFINE_ERROR(DivisionByZero);
TEMPERED_DEFINE_ERROR(PrecisionExhausted);
TEMPERED_DEFINE_ERROR(SingularAtPrecision);
TEMPERED_DEFINE_ERROR(BackendMismatch);

// poly
TEMPERED_DEFINE_ERROR(UnknownVariable);
TEMPERED_DEFINE_ERROR(CombinatorialBlowup);

// lift
TEMPERED_DEFINE_ERROR(NoContraction);
TEMPERED_DEFINE_ERROR(DepthExceeded);
TEMPERED_DEFINE_ERROR(EmptyLocus);

// forms
TEMPERED_DEFINE_ERROR(IrreducibleNotFound);
TEMPERED_DEFINE_ERROR(ZeroInverse);

// measure
TEMPERED_DEFINE_ERROR(UnresolvedFiber);
TEMPERED_DEFINE_ERROR(DepthInsufficient);
TEMPERED_DEFINE_ERROR(SingularCells);
TEMPERED_DEFINE_ERROR(BudgetExceeded);
TEMPERED_DEFINE_ERROR(NewtonDivergence);

// cli
TEMPERED_DEFINE_ERROR(ConfigError);
TEMPERED_DEFINE_ERROR(CheckFailed);

#undef TEMPERED_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace tempered
