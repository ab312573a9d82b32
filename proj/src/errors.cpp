#include "staticgeo/errors.hpp"

#include <sstream>

namespace staticgeo {

namespace {
std::string with_sides(const std::string& what, double lhs, double rhs) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (lhs = " << lhs << ", rhs = " << rhs << ")";
  return os.str();
}
}  // namespace

ConstraintError::ConstraintError(const std::string& what, double lhs, double rhs)
    : Error(with_sides(what, lhs, rhs)), lhs_(lhs), rhs_(rhs) {}

}  // namespace staticgeo
