#pragma once

#include <stdexcept>
#include <string>

namespace staticgeo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent input parameters (dimensions, ranges, distinctness).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Parameters under which f would be constant, so no vacuum static structure exists.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A constraint equation between case parameters does not hold.
class ConstraintError : public Error {
 public:
  ConstraintError(const std::string& what, double lhs, double rhs);
  double lhs() const { return lhs_; }
  double rhs() const { return rhs_; }

 private:
  double lhs_;
  double rhs_;
};

/// State on (or within the guard distance of) a zero of a warping factor.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Integration step so coarse that the first integral is not conserved.
class StepTooCoarseError : public Error {
 public:
  using Error::Error;
};

/// |grad f| = f' vanishes on the grid; the level-set reduction does not apply.
class RegularSetError : public Error {
 public:
  using Error::Error;
};

/// Scenario or command-line input that cannot be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace staticgeo
