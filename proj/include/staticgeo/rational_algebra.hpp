#pragma once

// Exact univariate polynomials and rational functions over Q, used for the
// warping products H(h) = prod (h + c)^mult, their antiderivatives Q(h), and
// the partial-fraction expansions of 1/H and Q/H.

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace staticgeo::algebra {

using Rational = mpq_class;

/// Parses an exact rational literal: integer, `p/q`, or decimal with optional exponent.
Rational parse_rational(const std::string& text);

/// Canonical text form: `p` or `p/q`.
std::string to_string(const Rational& q);

/// Nearest double, ties to even, for results in the normal range; mpq_class::get_d truncates.
double to_double(const Rational& q);

class Polynomial {
 public:
  Polynomial() = default;
  /// Coefficients in ascending degree; trailing zeros are dropped.
  explicit Polynomial(std::vector<Rational> ascending);

  static Polynomial constant(const Rational& c);
  static Polynomial monomial(const Rational& coeff, std::size_t degree);
  /// The linear factor h + shift.
  static Polynomial linear_factor(const Rational& shift);

  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  /// Coefficient of h^i, zero beyond the degree.
  Rational coeff(std::size_t i) const;
  Rational leading() const;

  Rational operator()(const Rational& x) const;
  /// Floating-point evaluation (Horner on the rounded coefficients).
  double eval(double x) const;

  Polynomial derivative() const;
  /// p(h + shift).
  Polynomial shifted(const Rational& shift) const;
  Polynomial pow(unsigned exponent) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(const Rational& s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  std::string to_string(char var = 'h') const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

struct Division {
  Polynomial quotient;
  Polynomial remainder;
};

/// Euclidean division; throws ParameterError on a zero divisor.
Division divide(const Polynomial& numerator, const Polynomial& divisor);

/// One factor (h + shift)^multiplicity.
struct RootFactor {
  Rational shift;
  int multiplicity = 1;
};

/// prod_l (h + c_l)^{n_l} with pairwise-distinct c_l and n_l >= 1.
class RootFactorization {
 public:
  RootFactorization() = default;
  /// Throws ParameterError on repeated shifts or non-positive multiplicities.
  explicit RootFactorization(std::vector<RootFactor> factors);
  static RootFactorization simple(std::span<const Rational> shifts);

  const std::vector<RootFactor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }
  /// Sum of multiplicities.
  int degree() const;
  const RootFactor& operator[](std::size_t l) const { return factors_[l]; }

 private:
  std::vector<RootFactor> factors_;
};

/// prod (h + c)^mult with exact coefficients.
Polynomial expand_from_roots(const RootFactorization& roots);

/// Q with Q' = p and Q(0) = 0.
Polynomial antiderivative_zero_constant(const Polynomial& p);

struct PartialFractionTerm {
  std::size_t root = 0;  // index into the denominator factorization
  int power = 1;
  Rational coeff;
};

/// numerator / denominator = linear_coeff*h + const_coeff + sum coeff/(h + c_root)^power.
class PartialFractionExpansion {
 public:
  PartialFractionExpansion(RootFactorization denominator, Rational linear, Rational constant,
                           std::vector<PartialFractionTerm> terms);

  const RootFactorization& denominator() const { return denominator_; }
  const Rational& linear_coeff() const { return linear_; }
  const Rational& const_coeff() const { return constant_; }
  /// Every (root, power) pair with power 1..multiplicity, root-major, zeros included.
  const std::vector<PartialFractionTerm>& terms() const { return terms_; }
  const Rational& coeff(std::size_t root, int power) const;

  Rational operator()(const Rational& h) const;
  double eval(double h) const;
  /// Antiderivative in h (log terms for power 1), without integration constant.
  double antiderivative(double h) const;

  /// Numerator obtained by recombining all terms over the expanded denominator.
  Polynomial recombined_numerator() const;

 private:
  RootFactorization denominator_;
  Rational linear_;
  Rational constant_;
  std::vector<PartialFractionTerm> terms_;
  std::vector<double> shifts_;
};

/// Residue-method expansion. Requires deg(numerator) <= deg(denominator) + 1.
PartialFractionExpansion partial_fractions(const Polynomial& numerator,
                                           const RootFactorization& denominator);

// ---- log-rational independence -------------------------------------------------

struct LogFit {
  std::vector<double> log_coeffs;  // one per shift, for ln|x + c|
  double b0 = 0.0;
  double b1 = 0.0;
  double residual = 0.0;  // max |fit - target| over the samples
};

/// Least-squares fit target(x) ~ sum a_l ln|x + c_l| + b0 + b1 x.
/// Throws ParameterError on too few or singular sample points and
/// DegenerateError("degenerate sample grid") on a rank-deficient design.
LogFit log_independence_fit(std::span<const Rational> shifts, std::span<const double> x,
                            std::span<const double> target);

/// `count` Chebyshev-Gauss points mapped to the open interval (lo, hi), ascending.
std::vector<double> chebyshev_grid(double lo, double hi, std::size_t count);

}  // namespace staticgeo::algebra
