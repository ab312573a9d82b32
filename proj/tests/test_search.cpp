#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "staticgeo/errors.hpp"
#include "staticgeo/search.hpp"

using namespace staticgeo::search;
using staticgeo::ParameterError;
using staticgeo::algebra::Rational;
using staticgeo::algebra::RootFactor;
using staticgeo::algebra::RootFactorization;
namespace geometry = staticgeo::geometry;

namespace {

RootFactorization roots(std::initializer_list<std::pair<Rational, int>> list) {
  std::vector<RootFactor> f;
  for (const auto& [c, m] : list) f.push_back({c, m});
  return RootFactorization(std::move(f));
}

const AuditRow* row(const AuditRecord& rec, std::size_t l, const std::string& condition) {
  for (const auto& r : rec.rows)
    if (r.class_index == l && r.condition == condition) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("audit: a single class satisfies the shift balance") {
  const auto rec = coefficient_audit(5, Rational(3), roots({{5, 3}}));
  CHECK(rec.m == 4);
  CHECK(rec.alpha_sum == 15);
  REQUIRE(rec.rows.size() == 1);
  CHECK(rec.rows[0].value == 0);
  CHECK_FALSE(rec.any_violation());
}

TEST_CASE("audit: two simple classes violate the shift balance") {
  const auto rec = coefficient_audit(4, Rational(12), roots({{0, 1}, {1, 1}}));
  CHECK(rec.alpha_sum == 1);
  CHECK(row(rec, 0, "shift_balance")->value == -1);
  CHECK(row(rec, 0, "shift_balance")->violated);
  CHECK(row(rec, 1, "shift_balance")->value == 1);
  CHECK(rec.any_violation());
}

TEST_CASE("audit: R = 0 with two double classes violates the top-power condition") {
  const auto rec = coefficient_audit(6, Rational(0), roots({{0, 2}, {1, 2}}), Rational(1));
  // 1/(h^2 (h+1)^2): alpha_{l,2} = 1 for both classes; 1 + 2/(1-2) = -1.
  CHECK(row(rec, 0, "top_power")->value == -2);
  CHECK(row(rec, 1, "top_power")->value == -2);
  CHECK(row(rec, 0, "log_coefficient")->value == -4);
  CHECK(row(rec, 1, "log_coefficient")->value == 4);
  CHECK(rec.any_violation());
}

TEST_CASE("audit values agree with direct arithmetic and the dense expansion") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto r = oracle::random_roots(rng, 3, 3);
    const int n = r.degree() + 2;
    const Rational a = oracle::random_rational(rng, 5, 3) + Rational(11);  // never zero
    const auto nonzero = coefficient_audit(n, Rational(7, 2), r, a);
    Rational alpha;
    for (const auto& f : r.factors()) alpha += f.multiplicity * f.shift;
    for (std::size_t l = 0; l < r.size(); ++l) {
      const Rational expected = r[l].shift * (r.degree()) - alpha;
      CHECK(row(nonzero, l, "shift_balance")->value == expected);
    }
    const auto zero = coefficient_audit(n, Rational(0), r, a);
    const auto dense = oracle::dense_partial_fractions(staticgeo::algebra::Polynomial::constant(1), r);
    std::size_t offset = 0;
    for (std::size_t l = 0; l < r.size(); ++l) {
      const int nl = r[l].multiplicity;
      if (r.degree() + 1 >= 3) CHECK(row(zero, l, "log_coefficient")->value == 2 * a * dense.coeffs[offset]);
      if (r.size() >= 2 && nl >= 2) {
        Rational factor = 1 + Rational(nl) / (1 - nl);
        CHECK(row(zero, l, "top_power")->value == 2 * a * dense.coeffs[offset + nl - 1] * factor);
      }
      offset += static_cast<std::size_t>(nl);
    }
  }
}

TEST_CASE("audit never flags a single class and always flags several") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 80; ++trial) {
    const auto r = oracle::random_roots(rng, 3, 3);
    const int n = r.degree() + 1 + trial % 3;
    for (const Rational& R : {Rational(0), Rational(6), Rational(-5, 3)}) {
      const auto rec = coefficient_audit(n, R, r);
      CHECK(rec.any_violation() == (r.size() >= 2));
    }
  }
}

TEST_CASE("audit input checks and CSV") {
  CHECK_THROWS_AS(coefficient_audit(3, Rational(1), roots({{0, 2}, {1, 1}})), ParameterError);
  CHECK_THROWS_AS(coefficient_audit(3, Rational(1), RootFactorization()), ParameterError);
  const auto rec = coefficient_audit(4, Rational(12), roots({{0, 1}, {Rational(1, 2), 1}}));
  const auto csv = rec.to_csv();
  CHECK(csv == "class,shift,multiplicity,condition,value,violated\n"
               "0,0,1,shift_balance,-1/2,true\n"
               "1,1/2,1,shift_balance,1/2,true\n");
}

TEST_CASE("probe: a single class is consistent and matches the warped Einstein fiber family") {
  const int n = 4;
  ProbeParams p{n, 3.0, -0.7, roots({{0, n - 1}}), {1.1, 0.4}, {0, 1, 1e-3}};
  const auto probe = multiclass_probe(p);
  CHECK(probe.report.all_pass());
  CHECK_FALSE(probe.obstructed);
  REQUIRE(probe.classes.size() == 1);
  CHECK(probe.classes[0].span_residual < 1e-8);
  CHECK(probe.classes[0].einstein_fiber_mismatch < 1e-8);

  const auto warped = geometry::build_case(geometry::WarpedEinsteinFiberParams{n, 3.0, -0.7, 1.1, 0.4, std::nullopt},
                                           {0, 1, 1e-3});
  const auto sw = geometry::ricci_spectrum(warped);
  const auto sg = geometry::ricci_spectrum(probe.model);
  for (std::size_t i = 0; i < warped.nodes(); i += 25) {
    CHECK(sg.values[0][i] == doctest::Approx(sw.values[0][i]).epsilon(1e-9));
    CHECK(sg.values[1][i] == doctest::Approx(sw.values[1][i]).epsilon(1e-9));
  }
}

TEST_CASE("probe: two classes with R != 0 are obstructed while internal identities hold") {
  ProbeParams p{4, 12.0, 1.0, roots({{0, 1}, {1, 1}}), {3.0, -0.5}, {0, 1, 1e-3}};
  const auto probe = multiclass_probe(p);
  for (const char* check : {"static_radial", "static_tangential", "codazzi", "radial_curvature", "trace"})
    for (const auto& v : probe.report.verdicts)
      if (v.check == check) CHECK(v.pass);
  CHECK(probe.obstructed);
  CHECK(probe.obstruction >= 100 * 1e-6);
  CHECK_FALSE(probe.report.all_pass());
  MESSAGE("two-class obstruction (R = 12): " << probe.obstruction);
}

TEST_CASE("probe: two classes with R = 0 are obstructed") {
  ProbeParams p{4, 0.0, 1.0, roots({{0, 1}, {1, 1}}), {0.2, 3.0}, {0, 1, 1e-3}};
  const auto probe = multiclass_probe(p);
  CHECK(probe.obstructed);
  CHECK(probe.obstruction > 1e-2);
  MESSAGE("two-class obstruction (R = 0): " << probe.obstruction);
}

TEST_CASE("probe: three classes are obstructed") {
  ProbeParams p{6, 10.0, 1.0, roots({{0, 1}, {1, 2}, {3, 1}}), {0.5, 4.0}, {0, 1, 1e-3}};
  const auto probe = multiclass_probe(p);
  CHECK_FALSE(probe.report.truncated);
  CHECK(probe.obstructed);
}
