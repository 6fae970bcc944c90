#pragma once

#include <stdexcept>
#include <string>

namespace maeig {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MAEIG_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// mesh
MAEIG_DEFINE_ERROR(NonConvergence);
MAEIG_DEFINE_ERROR(DegenerateMesh);
// fem
MAEIG_DEFINE_ERROR(SingularSystem);
// eigensolver
MAEIG_DEFINE_ERROR(ZeroDenominator);
MAEIG_DEFINE_ERROR(OuterStall);
// oracle
MAEIG_DEFINE_ERROR(BlowUp);
MAEIG_DEFINE_ERROR(NoBracket);

#undef MAEIG_DEFINE_ERROR

// The inner fixed-point loop ran out of iterations; carries the best
// break-test residual it reached.
class InnerStall : public Error {
 public:
  InnerStall(const std::string& what, double best_residual, int iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}

  double best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

}  // namespace maeig
