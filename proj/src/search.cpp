#include "staticgeo/search.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "staticgeo/detail/least_squares.hpp"
#include "staticgeo/errors.hpp"

namespace staticgeo::search {

using algebra::Rational;

ProbeReport multiclass_probe(const ProbeParams& params, const verify::Thresholds& thresholds) {
  geometry::MulticlassParams q{params.n, params.R, params.a, params.roots, params.init.value, params.init.slope};
  ProbeReport out;
  out.model = geometry::build_case(q, params.grid);
  out.report = verify::verify(out.model, thresholds);

  const auto& p = out.model.profile;
  const std::size_t band = verify::kBoundaryBand;
  const std::size_t lo = band, hi = p.size() - band;
  const std::size_t rows = hi - lo;
  const std::size_t classes = params.roots.size();
  std::vector<double> shifts(classes);
  for (std::size_t l = 0; l < classes; ++l) shifts[l] = algebra::to_double(params.roots[l].shift);
  const double shift_R = params.R / (params.n - 1.0);

  Eigen::MatrixXd design(rows, classes + 1);
  for (std::size_t r = 0; r < rows; ++r) {
    design(r, 0) = 1.0;
    for (std::size_t l = 0; l < classes; ++l) design(r, l + 1) = 1.0 / (p.h[lo + r] + shifts[l]);
  }

  for (std::size_t i = 0; i < classes; ++i) {
    ClassObstruction c;
    c.label = "c=" + algebra::to_string(params.roots[i].shift);
    c.shift = shifts[i];
    c.multiplicity = params.roots[i].multiplicity;
    Eigen::VectorXd target(rows);
    double fiber_min = INFINITY, fiber_max = -INFINITY;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t k = lo + r;
      const double w = p.h[k] + shifts[i];
      double sum = 0.0;
      for (std::size_t l = 0; l < classes; ++l) sum += params.roots[l].multiplicity / (p.h[k] + shifts[l]);
      target(r) = 2.0 * p.h2[k] + shift_R * w + p.h1[k] * p.h1[k] * (sum - 1.0 / w);
      fiber_min = std::min(fiber_min, w * target(r));
      fiber_max = std::max(fiber_max, w * target(r));
    }
    const auto fit = detail::least_squares(design, target);
    if (!fit) throw DegenerateError("degenerate probe profile: h is too close to constant for the span fit");
    c.fit.assign(fit->data(), fit->data() + fit->size());
    c.span_residual = (design * *fit - target).cwiseAbs().maxCoeff();
    c.einstein_fiber_mismatch = fiber_max - fiber_min;
    out.obstruction = std::max(out.obstruction, c.span_residual);
    out.report.verdicts.push_back({"span_obstruction", c.label, c.span_residual, thresholds.static_residual,
                                   c.span_residual <= thresholds.static_residual, 0.0});
    out.classes.push_back(std::move(c));
  }
  out.obstruction_threshold = thresholds.obstruction_factor * thresholds.static_residual;
  out.obstructed = out.obstruction >= out.obstruction_threshold;
  return out;
}

bool AuditRecord::any_violation() const {
  return std::any_of(rows.begin(), rows.end(), [](const AuditRow& r) { return r.violated; });
}

std::string AuditRecord::to_csv() const {
  std::ostringstream os;
  os << "class,shift,multiplicity,condition,value,violated\n";
  for (const auto& r : rows)
    os << r.class_index << ',' << algebra::to_string(r.shift) << ',' << r.multiplicity << ',' << r.condition << ','
       << algebra::to_string(r.value) << ',' << (r.violated ? "true" : "false") << '\n';
  return os.str();
}

AuditRecord coefficient_audit(int n, const Rational& R, const algebra::RootFactorization& roots, const Rational& a) {
  if (roots.empty()) throw ParameterError("coefficient audit needs at least one class");
  AuditRecord rec;
  rec.n = n;
  rec.R = R;
  rec.a = a;
  rec.m = roots.degree() + 1;
  rec.d = roots.size();
  if (rec.m > n) throw ParameterError("sum of multiplicities + 1 = " + std::to_string(rec.m) + " exceeds n");
  for (const auto& f : roots.factors()) rec.alpha_sum += f.multiplicity * f.shift;

  if (R != 0) {
    for (std::size_t l = 0; l < roots.size(); ++l) {
      const Rational value = roots[l].shift * (rec.m - 1) - rec.alpha_sum;
      rec.rows.push_back({l, roots[l].shift, roots[l].multiplicity, "shift_balance", value, value != 0});
    }
    return rec;
  }

  const auto inverse = algebra::partial_fractions(algebra::Polynomial::constant(Rational(1)), roots);
  for (std::size_t l = 0; l < roots.size(); ++l) {
    const int nl = roots[l].multiplicity;
    if (rec.m >= 3) {
      const Rational value = 2 * a * inverse.coeff(l, 1);
      rec.rows.push_back({l, roots[l].shift, nl, "log_coefficient", value, value != 0});
    }
    if (rec.d >= 2 && nl >= 2) {
      const Rational value = 2 * a * inverse.coeff(l, nl) * (1 - Rational(nl, nl - 1));
      rec.rows.push_back({l, roots[l].shift, nl, "top_power", value, value != 0});
    }
  }
  return rec;
}

}  // namespace staticgeo::search
