#include "staticgeo/rational_algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "staticgeo/detail/least_squares.hpp"
#include "staticgeo/errors.hpp"

namespace staticgeo::algebra {

namespace {

std::string trim(const std::string& s) {
  auto begin = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto end = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return begin < end ? std::string(begin, end) : std::string();
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

mpz_class parse_integer(const std::string& text, const std::string& whole) {
  std::string body = text;
  bool negative = false;
  if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
    negative = body[0] == '-';
    body.erase(0, 1);
  }
  if (!all_digits(body)) throw ParseError("not a rational literal: '" + whole + "'");
  mpz_class z(body, 10);
  return negative ? mpz_class(-z) : z;
}

}  // namespace

double to_double(const Rational& q) {
  static_assert(sizeof(unsigned long) == 8);
  if (sgn(q) == 0) return 0.0;
  const mpz_class num = abs(q.get_num());
  const mpz_class& den = q.get_den();
  // Quotient scaled to 64 or 65 bits; dropped bits and the remainder become
  // a sticky low bit so the final uint64 -> double conversion rounds correctly.
  long shift = 64 - static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) +
               static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  mpz_class scaled = num, divisor = den;
  if (shift >= 0) scaled <<= static_cast<unsigned long>(shift);
  else divisor <<= static_cast<unsigned long>(-shift);
  mpz_class quotient, remainder;
  mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), scaled.get_mpz_t(), divisor.get_mpz_t());
  bool sticky = remainder != 0;
  if (mpz_sizeinbase(quotient.get_mpz_t(), 2) > 64) {
    sticky = sticky || mpz_odd_p(quotient.get_mpz_t());
    quotient >>= 1;
    --shift;
  }
  unsigned long bits = quotient.get_ui();
  if (sticky) bits |= 1ul;
  const double magnitude = std::ldexp(static_cast<double>(bits), static_cast<int>(-shift));
  return sgn(q) < 0 ? -magnitude : magnitude;
}

Rational parse_rational(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParseError("empty numeric literal");

  if (auto slash = text.find('/'); slash != std::string::npos) {
    mpz_class num = parse_integer(trim(text.substr(0, slash)), text);
    mpz_class den = parse_integer(trim(text.substr(slash + 1)), text);
    if (den == 0) throw ParseError("zero denominator in '" + text + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  std::string mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mantissa = text.substr(0, e);
    const std::string exp_text = text.substr(e + 1);
    mpz_class exp_value = parse_integer(exp_text, text);
    if (!exp_value.fits_slong_p() || std::abs(exp_value.get_si()) > 4000)
      throw ParseError("exponent out of range in '" + text + "'");
    exponent = exp_value.get_si();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '+' || mantissa[0] == '-')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  std::string digits = mantissa;
  if (auto dot = mantissa.find('.'); dot != std::string::npos) {
    digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
    exponent -= static_cast<long>(mantissa.size() - dot - 1);
    if (mantissa.size() == 1) digits.clear();
  }
  if (!all_digits(digits)) throw ParseError("not a rational literal: '" + text + "'");

  mpz_class value(digits, 10);
  if (negative) value = -value;
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(exponent)));
  Rational q = exponent >= 0 ? Rational(value * power) : Rational(value, power);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

// ---- Polynomial ---------------------------------------------------------------------

Polynomial::Polynomial(std::vector<Rational> ascending) : coeffs_(std::move(ascending)) { trim(); }

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(const Rational& coeff, std::size_t degree) {
  std::vector<Rational> c(degree + 1, Rational(0));
  c[degree] = coeff;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::linear_factor(const Rational& shift) { return Polynomial({shift, Rational(1)}); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }

Rational Polynomial::leading() const { return is_zero() ? Rational(0) : coeffs_.back(); }

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::eval(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<long>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(const Rational& shift) const {
  Polynomial acc;
  const Polynomial x = linear_factor(shift);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= x;
    acc += constant(*it);
  }
  return acc;
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result = constant(1);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    exponent >>= 1u;
    if (exponent > 0) base *= base;
  }
  return result;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), Rational(0));
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), Rational(0));
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  if (is_zero() || rhs.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> out(coeffs_.size() + rhs.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
  coeffs_ = std::move(out);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  for (auto& c : coeffs_) c *= s;
  trim();
  return *this;
}

std::string Polynomial::to_string(char var) const {
  if (is_zero()) return "0";
  std::string out;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    const Rational& c = coeffs_[k];
    if (c == 0) continue;
    Rational mag = abs(c);
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    const bool unit = mag == 1 && k > 0;
    if (!unit) out += mag.get_str();
    if (k > 0) {
      if (!unit) out += "*";
      out += var;
      if (k > 1) out += "^" + std::to_string(k);
    }
  }
  return out;
}

Division divide(const Polynomial& numerator, const Polynomial& divisor) {
  if (divisor.is_zero()) throw ParameterError("polynomial division by zero");
  std::vector<Rational> rem = numerator.coeffs();
  const int dd = divisor.degree();
  const int nd = numerator.degree();
  if (nd < dd) return {Polynomial(), numerator};
  std::vector<Rational> quot(static_cast<std::size_t>(nd - dd + 1), Rational(0));
  const Rational lead = divisor.leading();
  for (int k = nd - dd; k >= 0; --k) {
    const Rational q = rem[static_cast<std::size_t>(k + dd)] / lead;
    quot[static_cast<std::size_t>(k)] = q;
    if (q == 0) continue;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= q * divisor.coeff(static_cast<std::size_t>(j));
  }
  rem.resize(static_cast<std::size_t>(dd));
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

// ---- RootFactorization --------------------------------------------------------------

RootFactorization::RootFactorization(std::vector<RootFactor> factors) : factors_(std::move(factors)) {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].multiplicity < 1)
      throw ParameterError("root multiplicity must be >= 1, got " + std::to_string(factors_[i].multiplicity));
    for (std::size_t j = 0; j < i; ++j)
      if (factors_[i].shift == factors_[j].shift)
        throw ParameterError("repeated root shift " + to_string(factors_[i].shift) +
                             " listed as distinct factors; merge them into one multiplicity");
  }
}

RootFactorization RootFactorization::simple(std::span<const Rational> shifts) {
  std::vector<RootFactor> f;
  f.reserve(shifts.size());
  for (const auto& c : shifts) f.push_back({c, 1});
  return RootFactorization(std::move(f));
}

int RootFactorization::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.multiplicity;
  return d;
}

Polynomial expand_from_roots(const RootFactorization& roots) {
  Polynomial p = Polynomial::constant(1);
  for (const auto& f : roots.factors())
    p *= Polynomial::linear_factor(f.shift).pow(static_cast<unsigned>(f.multiplicity));
  return p;
}

Polynomial antiderivative_zero_constant(const Polynomial& p) {
  if (p.is_zero()) return {};
  std::vector<Rational> c(p.coeffs().size() + 1, Rational(0));
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) c[i + 1] = p.coeffs()[i] / static_cast<long>(i + 1);
  return Polynomial(std::move(c));
}

// ---- PartialFractionExpansion -------------------------------------------------------

PartialFractionExpansion::PartialFractionExpansion(RootFactorization denominator, Rational linear,
                                                   Rational constant, std::vector<PartialFractionTerm> terms)
    : denominator_(std::move(denominator)),
      linear_(std::move(linear)),
      constant_(std::move(constant)),
      terms_(std::move(terms)) {
  for (const auto& f : denominator_.factors()) shifts_.push_back(to_double(f.shift));
}

const Rational& PartialFractionExpansion::coeff(std::size_t root, int power) const {
  for (const auto& t : terms_)
    if (t.root == root && t.power == power) return t.coeff;
  throw ParameterError("no partial-fraction term for root " + std::to_string(root) + ", power " +
                       std::to_string(power));
}

Rational PartialFractionExpansion::operator()(const Rational& h) const {
  Rational acc = linear_ * h + constant_;
  for (const auto& t : terms_) {
    if (t.coeff == 0) continue;
    Rational base = h + denominator_[t.root].shift;
    if (base == 0) throw ParameterError("evaluation at a pole of the expansion");
    Rational denom(1);
    for (int k = 0; k < t.power; ++k) denom *= base;
    acc += t.coeff / denom;
  }
  return acc;
}

double PartialFractionExpansion::eval(double h) const {
  double acc = to_double(linear_) * h + to_double(constant_);
  for (const auto& t : terms_) acc += to_double(t.coeff) / std::pow(h + shifts_[t.root], t.power);
  return acc;
}

double PartialFractionExpansion::antiderivative(double h) const {
  double acc = 0.5 * to_double(linear_) * h * h + to_double(constant_) * h;
  for (const auto& t : terms_) {
    const double base = h + shifts_[t.root];
    const double c = to_double(t.coeff);
    if (t.power == 1)
      acc += c * std::log(std::abs(base));
    else
      acc += c / ((1.0 - t.power) * std::pow(base, t.power - 1));
  }
  return acc;
}

Polynomial PartialFractionExpansion::recombined_numerator() const {
  Polynomial result = Polynomial({constant_, linear_}) * expand_from_roots(denominator_);
  for (const auto& t : terms_) {
    if (t.coeff == 0) continue;
    Polynomial cofactor = Polynomial::constant(t.coeff);
    for (std::size_t l = 0; l < denominator_.size(); ++l) {
      int mult = denominator_[l].multiplicity - (l == t.root ? t.power : 0);
      cofactor *= Polynomial::linear_factor(denominator_[l].shift).pow(static_cast<unsigned>(mult));
    }
    result += cofactor;
  }
  return result;
}

PartialFractionExpansion partial_fractions(const Polynomial& numerator, const RootFactorization& denominator) {
  if (denominator.empty() || denominator.degree() < 1)
    throw ParameterError("partial fractions need a denominator of degree >= 1");
  if (numerator.degree() > denominator.degree() + 1)
    throw ParameterError("numerator degree " + std::to_string(numerator.degree()) +
                         " exceeds denominator degree + 1 = " + std::to_string(denominator.degree() + 1));

  auto [quotient, remainder] = divide(numerator, expand_from_roots(denominator));

  std::vector<PartialFractionTerm> terms;
  for (std::size_t l = 0; l < denominator.size(); ++l) {
    const Rational& c = denominator[l].shift;
    const int mult = denominator[l].multiplicity;
    // Taylor coefficients at h = -c of remainder / prod_{j != l}(h + c_j)^{n_j}, in u = h + c.
    const Polynomial top = remainder.shifted(-c);
    Polynomial deflated = Polynomial::constant(1);
    for (std::size_t j = 0; j < denominator.size(); ++j) {
      if (j == l) continue;
      deflated *= Polynomial::linear_factor(denominator[j].shift - c)
                      .pow(static_cast<unsigned>(denominator[j].multiplicity));
    }
    std::vector<Rational> series(static_cast<std::size_t>(mult), Rational(0));
    const Rational w0 = deflated.coeff(0);
    for (std::size_t k = 0; k < series.size(); ++k) {
      Rational acc = top.coeff(k);
      for (std::size_t i = 1; i <= k; ++i) acc -= deflated.coeff(i) * series[k - i];
      series[k] = acc / w0;
    }
    for (int t = 1; t <= mult; ++t)
      terms.push_back({l, t, series[static_cast<std::size_t>(mult - t)]});
  }
  return PartialFractionExpansion(denominator, quotient.coeff(1), quotient.coeff(0), std::move(terms));
}

// ---- log independence ----------------------------------------------------------------

LogFit log_independence_fit(std::span<const Rational> shifts, std::span<const double> x,
                            std::span<const double> target) {
  // Validates pairwise distinctness.
  const RootFactorization roots = RootFactorization::simple(shifts);
  if (x.size() != target.size()) throw ParameterError("sample grid and target sizes differ");
  const std::size_t cols = shifts.size() + 2;
  if (x.size() < 2 * shifts.size() + 2)
    throw ParameterError("log fit needs at least " + std::to_string(2 * shifts.size() + 2) + " samples, got " +
                         std::to_string(x.size()));

  Eigen::MatrixXd design(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(cols));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t l = 0; l < shifts.size(); ++l) {
      const double base = std::abs(x[i] + to_double(shifts[l]));
      if (!(base > 0.0) || !std::isfinite(x[i]))
        throw ParameterError("sample point x = " + std::to_string(x[i]) + " lies on the singular set");
      design(r, static_cast<Eigen::Index>(l)) = std::log(base);
    }
    design(r, static_cast<Eigen::Index>(shifts.size())) = 1.0;
    design(r, static_cast<Eigen::Index>(shifts.size() + 1)) = x[i];
    rhs(r) = target[i];
  }

  auto solution = detail::least_squares(design, rhs);
  if (!solution) throw DegenerateError("degenerate sample grid: log-fit design matrix is rank deficient");

  LogFit fit;
  fit.log_coeffs.assign(solution->data(), solution->data() + shifts.size());
  fit.b0 = (*solution)(static_cast<Eigen::Index>(shifts.size()));
  fit.b1 = (*solution)(static_cast<Eigen::Index>(shifts.size() + 1));
  fit.residual = (design * *solution - rhs).cwiseAbs().maxCoeff();
  return fit;
}

std::vector<double> chebyshev_grid(double lo, double hi, std::size_t count) {
  if (!(hi > lo) || count == 0) throw ParameterError("chebyshev_grid needs lo < hi and count > 0");
  std::vector<double> x(count);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = std::numbers::pi * (2.0 * static_cast<double>(count - 1 - k) + 1.0) /
                         (2.0 * static_cast<double>(count));
    x[k] = mid + half * std::cos(theta);
  }
  return x;
}

}  // namespace staticgeo::algebra
