#pragma once

#include <stdexcept>
#include <string>

namespace phodge {

// Exit-code buckets used by the CLI: input/validation problems exit 2,
// precision loss exits 3, failed assertions/properties exit 1.
enum class ErrorKind { validation, precision, property, budget };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)) {}
  ErrorKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

#define PHODGE_ERROR_TYPE(NAME, KIND)                                     \
  class NAME : public Error {                                             \
   public:                                                                \
    explicit NAME(const std::string& what)                                \
        : Error(ErrorKind::KIND, #NAME, what) {}                          \
  };

PHODGE_ERROR_TYPE(PrecisionExhausted, precision)
PHODGE_ERROR_TYPE(DivisionByZero, validation)
PHODGE_ERROR_TYPE(OutOfDomain, validation)
PHODGE_ERROR_TYPE(OutOfDisc, validation)
PHODGE_ERROR_TYPE(DimensionMismatch, validation)
PHODGE_ERROR_TYPE(ShapeMismatch, validation)
PHODGE_ERROR_TYPE(RankDeficient, validation)
PHODGE_ERROR_TYPE(NotCoprime, validation)
PHODGE_ERROR_TYPE(NotStable, validation)
PHODGE_ERROR_TYPE(NotPolarized, validation)
PHODGE_ERROR_TYPE(NotNilpotentSum, validation)
PHODGE_ERROR_TYPE(DenominatorPrecision, precision)
PHODGE_ERROR_TYPE(Divergent, validation)
PHODGE_ERROR_TYPE(BudgetExceeded, budget)
PHODGE_ERROR_TYPE(ZeroNilpotent, validation)
PHODGE_ERROR_TYPE(ValidationError, validation)

#undef PHODGE_ERROR_TYPE

}  // namespace phodge
