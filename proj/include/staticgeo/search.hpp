#pragma once

// Numerical and exact evidence that several distinct nonzero shape classes
// cannot coexist: a probe that integrates the shifted-class reduction and
// measures what the static equation would additionally demand, and an exact
// audit of the coefficient conditions that pin every shift to one value.

#include <cstddef>
#include <string>
#include <vector>

#include "staticgeo/geometry.hpp"
#include "staticgeo/rational_algebra.hpp"
#include "staticgeo/verifier.hpp"

namespace staticgeo::search {

struct ProbeParams {
  int n = 0;
  double R = 0.0;
  double a = 1.0;
  algebra::RootFactorization roots;
  ode::State init{1.0, 1.0};
  geometry::Grid grid;
};

/// Per-class evidence. For class i the combination
///   L_i = 2h'' + R (h + c_i)/(n-1) + h'^2 (sum_l n_l/(h + c_l) - 1/(h + c_i))
/// must lie in span{1, 1/(h + c_l)} as a function of s for some fiber data to
/// exist; span_residual is the sup distance of the best fit. For an Einstein
/// fiber (h + c_i) L_i must even be constant; its oscillation is reported too.
struct ClassObstruction {
  std::string label;
  double shift = 0.0;
  int multiplicity = 0;
  double span_residual = 0.0;
  std::vector<double> fit;  // coefficients of 1, 1/(h + c_1), ...
  double einstein_fiber_mismatch = 0.0;
};

struct ProbeReport {
  verify::ResidualReport report;  // includes one span_obstruction verdict per class
  std::vector<ClassObstruction> classes;
  double obstruction = 0.0;  // max span residual over the classes
  double obstruction_threshold = 0.0;
  bool obstructed = false;  // obstruction >= factor * pass threshold
  geometry::MetricModel model;
};

/// Integrates the shifted-class ODE, runs the residual suite and adds the span
/// obstruction. Errors are those of the integrator.
ProbeReport multiclass_probe(const ProbeParams& params, const verify::Thresholds& thresholds = {});

struct AuditRow {
  std::size_t class_index = 0;
  algebra::Rational shift;
  int multiplicity = 0;
  std::string condition;
  algebra::Rational value;
  bool violated = false;
};

struct AuditRecord {
  int n = 0;
  algebra::Rational R;
  algebra::Rational a;
  int m = 0;
  std::size_t d = 0;
  /// Sum of the shifts counted with multiplicity.
  algebra::Rational alpha_sum;
  std::vector<AuditRow> rows;

  bool any_violation() const;
  /// Header plus one row per class per condition.
  std::string to_csv() const;
};

/// Exact bookkeeping of the vanishing conditions.
///  R != 0: c_l (m-1) - alpha_{m-2} = 0 for every class.
///  R == 0: 2a alpha_{l,1} = 0 (log term, m >= 3) and, for d >= 2 and n_l >= 2,
///          2a alpha_{l,n_l} (1 + n_l/(1 - n_l)) = 0 (top power),
/// with alpha_{l,t} the coefficients of 1/H. Throws ParameterError for m > n.
AuditRecord coefficient_audit(int n, const algebra::Rational& R, const algebra::RootFactorization& roots,
                              const algebra::Rational& a = algebra::Rational(1));

}  // namespace staticgeo::search
