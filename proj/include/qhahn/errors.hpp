#pragma once

#include <stdexcept>
#include <string>

namespace qhahn {

// Typed failures. `name()` is stable and used by the CLI for exit reporting.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define QHAHN_DEFINE_ERROR(NAME)                                  \
  class NAME : public Error {                                     \
   public:                                                        \
    explicit NAME(const std::string& what) : Error(#NAME, what) {} \
  }

QHAHN_DEFINE_ERROR(PrecisionOverflow);
QHAHN_DEFINE_ERROR(NotSingular);
QHAHN_DEFINE_ERROR(RankZero);
QHAHN_DEFINE_ERROR(InadmissibleParams);
QHAHN_DEFINE_ERROR(DegenerateSupport);
QHAHN_DEFINE_ERROR(TooLarge);
QHAHN_DEFINE_ERROR(SingularStep);
QHAHN_DEFINE_ERROR(DegenerateInitialData);
QHAHN_DEFINE_ERROR(SingularRatio);
QHAHN_DEFINE_ERROR(NonGenericConnection);
QHAHN_DEFINE_ERROR(CancellationFailure);
QHAHN_DEFINE_ERROR(CoordinateAtInfinity);
QHAHN_DEFINE_ERROR(NoRealEdge);
QHAHN_DEFINE_ERROR(ScalingFailure);
QHAHN_DEFINE_ERROR(QuadratureError);
QHAHN_DEFINE_ERROR(DomainError);

#undef QHAHN_DEFINE_ERROR

}  // namespace qhahn
