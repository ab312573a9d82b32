#include "staticgeo/profile_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "staticgeo/errors.hpp"

namespace staticgeo::ode {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

void require_dimension(int n) {
  if (n < 3) throw ParameterError("dimension n must be >= 3, got " + std::to_string(n));
}

/// Coefficient kappa in f'' = -kappa f for the potential families.
double potential_kappa(const OdeSpec& spec) {
  return std::visit(overloaded{
                        [](const EinsteinOde& o) { return o.R / (o.n * (o.n - 1.0)); },
                        [](const ProductOde& o) { return o.R / (o.k * (o.n - 1.0)); },
                        [](const auto&) -> double { throw ParameterError("not a potential-profile case"); },
                    },
                    spec);
}

algebra::PartialFractionExpansion expansion_of(const algebra::Polynomial& numerator,
                                               const algebra::RootFactorization& roots) {
  if (roots.empty()) throw ParameterError("multiclass reduction needs at least one shifted class");
  return algebra::partial_fractions(numerator, roots);
}

}  // namespace

MulticlassOde::MulticlassOde(int n, double R, double a, algebra::RootFactorization roots)
    : n_(n),
      R_(R),
      a_(a),
      roots_(std::move(roots)),
      H_(algebra::expand_from_roots(roots_)),
      Q_(algebra::antiderivative_zero_constant(H_)),
      inverse_(expansion_of(algebra::Polynomial::constant(1), roots_)),
      ratio_(expansion_of(Q_, roots_)) {
  for (const auto& f : roots_.factors()) shifts_.push_back(algebra::to_double(f.shift));
}

double MulticlassOde::log_derivative_H(double h) const {
  double acc = 0.0;
  for (std::size_t l = 0; l < roots_.size(); ++l) acc += roots_[l].multiplicity / (h + shifts_[l]);
  return acc;
}

ProfileVariable profile_variable(const OdeSpec& spec) {
  return std::holds_alternative<EinsteinOde>(spec) || std::holds_alternative<ProductOde>(spec)
             ? ProfileVariable::potential
             : ProfileVariable::warping;
}

std::string case_name(const OdeSpec& spec) {
  return std::visit(overloaded{
                        [](const WarpedFactorOde&) { return std::string("thm1_i_warped_factor"); },
                        [](const WarpedFiberOde&) { return std::string("thm1_ii"); },
                        [](const EinsteinOde&) { return std::string("thm1_iii"); },
                        [](const ProductOde&) { return std::string("thm1_iv_factor"); },
                        [](const MulticlassOde&) { return std::string("general_multiclass"); },
                    },
                    spec);
}

void validate(const OdeSpec& spec) {
  std::visit(overloaded{
                 [](const WarpedFactorOde& o) {
                   require_dimension(o.n);
                   if (o.k < 2 || o.k > o.n - 1)
                     throw ParameterError("family (i) needs 2 <= k <= n-1, got k = " + std::to_string(o.k));
                   if (o.n - o.k == 1 && o.c2 != 0.0)
                     throw ParameterError("c2 term requires n-k >= 2 (n-k-1 = 0 would divide by zero)");
                   if (o.R == 0.0 && o.c2 == 0.0)
                     throw DegenerateError(
                         "degenerate: R = 0 and c2 = 0 give h'' = 0, so f = h' is constant");
                 },
                 [](const WarpedFiberOde& o) {
                   require_dimension(o.n);
                   if (o.a == 0.0)
                     throw DegenerateError(
                         "degenerate: a = 0 is rejected (with R = 0 it gives h'' = f' = 0, so f is constant; "
                         "with R != 0 the profile is the Einstein family)");
                 },
                 [](const EinsteinOde& o) { require_dimension(o.n); },
                 [](const ProductOde& o) {
                   require_dimension(o.n);
                   if (o.k < 1 || o.k > o.n - 1)
                     throw ParameterError("family (iv) needs 1 <= k <= n-1, got k = " + std::to_string(o.k));
                 },
                 [](const MulticlassOde& o) {
                   require_dimension(o.n());
                   if (o.m() > o.n())
                     throw ParameterError("sum of multiplicities " + std::to_string(o.m() - 1) +
                                          " exceeds n-1 = " + std::to_string(o.n() - 1));
                   if (o.a() == 0.0)
                     throw DegenerateError(
                         "degenerate: a = 0 is rejected (with R = 0 it gives h'' = f' = 0, so f is constant)");
                 },
             },
             spec);
}

double singular_distance(const OdeSpec& spec, double value) {
  return std::visit(overloaded{
                        [&](const WarpedFactorOde&) { return std::abs(value); },
                        [&](const WarpedFiberOde&) { return std::abs(value); },
                        [&](const MulticlassOde& o) {
                          double d = std::numeric_limits<double>::infinity();
                          for (std::size_t l = 0; l < o.class_count(); ++l)
                            d = std::min(d, std::abs(value + o.shift(l)));
                          return d;
                        },
                        [](const auto&) { return std::numeric_limits<double>::infinity(); },
                    },
                    spec);
}

namespace {

std::string nearest_factor(const OdeSpec& spec, double value) {
  if (const auto* o = std::get_if<MulticlassOde>(&spec)) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < o->class_count(); ++l)
      if (std::abs(value + o->shift(l)) < std::abs(value + o->shift(best))) best = l;
    return "(h + " + algebra::to_string(o->roots()[best].shift) + ")";
  }
  return "h";
}

double rhs_unchecked(const OdeSpec& spec, State st) {
  return std::visit(overloaded{
                        [&](const WarpedFactorOde& o) {
                          const int d = o.n - o.k;
                          double v = -o.R * st.value / ((o.n - 1.0) * (d + 1.0));
                          if (d >= 2) v += o.c2 * std::pow(st.value, -d);
                          return v;
                        },
                        [&](const WarpedFiberOde& o) {
                          return -o.R * st.value / (o.n * (o.n - 1.0)) + o.a * std::pow(st.value, 1 - o.n);
                        },
                        [&](const EinsteinOde&) { return -potential_kappa(spec) * st.value; },
                        [&](const ProductOde&) { return -potential_kappa(spec) * st.value; },
                        [&](const MulticlassOde& o) {
                          return (o.a() - o.R() * o.Q_at(st.value) / (o.n() - 1.0)) / o.H_at(st.value);
                        },
                    },
                    spec);
}

}  // namespace

double rhs(const OdeSpec& spec, State state, double delta_min) {
  if (singular_distance(spec, state.value) <= delta_min)
    throw SingularityError("profile singularity: factor " + nearest_factor(spec, state.value) +
                           " is within " + num(delta_min) + " of zero at value " + num(state.value));
  return rhs_unchecked(spec, state);
}

double third_derivative(const OdeSpec& spec, State st) {
  const double second = rhs_unchecked(spec, st);
  return std::visit(overloaded{
                        [&](const WarpedFactorOde& o) {
                          const int d = o.n - o.k;
                          double dF = -o.R / ((o.n - 1.0) * (d + 1.0));
                          if (d >= 2) dF -= d * o.c2 * std::pow(st.value, -d - 1);
                          return st.slope * dF;
                        },
                        [&](const WarpedFiberOde& o) {
                          return st.slope * (-o.R / (o.n * (o.n - 1.0)) + (1.0 - o.n) * o.a * std::pow(st.value, -o.n));
                        },
                        [&](const EinsteinOde&) { return -potential_kappa(spec) * st.slope; },
                        [&](const ProductOde&) { return -potential_kappa(spec) * st.slope; },
                        [&](const MulticlassOde& o) {
                          return st.slope * (-o.R() / (o.n() - 1.0) - second * o.log_derivative_H(st.value));
                        },
                    },
                    spec);
}

double first_integral(const OdeSpec& spec, State st) {
  const double p2 = st.slope * st.slope;
  return std::visit(overloaded{
                        [&](const WarpedFactorOde& o) {
                          const int d = o.n - o.k;
                          if (d == 1) return p2 + o.R * st.value * st.value / (2.0 * (o.n - 1.0));
                          return p2 + o.R * st.value * st.value / ((o.n - 1.0) * (d + 1.0)) +
                                 2.0 * o.c2 * std::pow(st.value, 1 - d) / (d - 1.0);
                        },
                        [&](const WarpedFiberOde& o) {
                          return p2 + o.R * st.value * st.value / (o.n * (o.n - 1.0)) +
                                 2.0 * o.a / ((o.n - 2.0) * std::pow(st.value, o.n - 2));
                        },
                        [&](const EinsteinOde&) { return p2 + potential_kappa(spec) * st.value * st.value; },
                        [&](const ProductOde&) { return p2 + potential_kappa(spec) * st.value * st.value; },
                        [&](const MulticlassOde& o) {
                          return p2 + 2.0 * o.R() / (o.n() - 1.0) * o.ratio_expansion().antiderivative(st.value) -
                                 2.0 * o.a() * o.inverse_expansion().antiderivative(st.value);
                        },
                    },
                    spec);
}

State ProfileSamples::state(std::size_t i) const {
  return variable == ProfileVariable::warping ? State{h[i], h1[i]} : State{f[i], f1[i]};
}

ProfileSamples integrate(const OdeSpec& spec, State init, Interval range, double step,
                         const IntegrateOptions& options) {
  validate(spec);
  if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("integration step must be positive");
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || !(range.hi > range.lo))
    throw ParameterError("integration range must be finite with lo < hi");
  if (!std::isfinite(init.value) || !std::isfinite(init.slope))
    throw ParameterError("initial state must be finite");
  if (singular_distance(spec, init.value) <= options.delta_min)
    throw SingularityError("initial condition inside the singular set: factor " +
                           nearest_factor(spec, init.value) + " is within " + num(options.delta_min) +
                           " of zero");

  const double span = range.hi - range.lo;
  if (step > span * (1 + 1e-12)) throw ParameterError("integration step exceeds the range");
  const auto intervals = static_cast<std::size_t>(std::llround(span / step));
  if (intervals < 1) throw ParameterError("integration step exceeds the range");

  // z = (y, y', Y) with Y' = y; Y is the running integral used for h on potential profiles.
  using Vec = std::array<double, 3>;
  auto deriv = [&](const Vec& z) { return Vec{z[1], rhs_unchecked(spec, {z[0], z[1]}), z[0]}; };
  auto safe = [&](const Vec& z) {
    return std::isfinite(z[0]) && std::isfinite(z[1]) && singular_distance(spec, z[0]) > options.delta_min;
  };
  auto axpy = [](const Vec& z, double c, const Vec& k) { return Vec{z[0] + c * k[0], z[1] + c * k[1], z[2] + c * k[2]}; };

  std::vector<Vec> states;
  states.reserve(intervals + 1);
  states.push_back({init.value, init.slope, 0.0});
  bool truncated = false;
  for (std::size_t i = 0; i < intervals; ++i) {
    const Vec& z = states.back();
    const Vec k1 = deriv(z);
    const Vec z2 = axpy(z, 0.5 * step, k1);
    if (!safe(z2)) { truncated = true; break; }
    const Vec k2 = deriv(z2);
    const Vec z3 = axpy(z, 0.5 * step, k2);
    if (!safe(z3)) { truncated = true; break; }
    const Vec k3 = deriv(z3);
    const Vec z4 = axpy(z, step, k3);
    if (!safe(z4)) { truncated = true; break; }
    const Vec k4 = deriv(z4);
    Vec next;
    for (std::size_t c = 0; c < 3; ++c) next[c] = z[c] + step / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    if (!safe(next)) { truncated = true; break; }
    states.push_back(next);
  }

  ProfileSamples out;
  out.variable = profile_variable(spec);
  out.step = step;
  out.truncated = truncated;
  out.requested = range;
  const std::size_t count = states.size();
  for (auto* v : {&out.s, &out.h, &out.h1, &out.h2, &out.h3, &out.f, &out.f1, &out.f2}) v->resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec& z = states[i];
    const State st{z[0], z[1]};
    out.s[i] = range.lo + static_cast<double>(i) * step;
    const double second = rhs_unchecked(spec, st);
    const double third = third_derivative(spec, st);
    if (out.variable == ProfileVariable::warping) {
      out.h[i] = z[0];
      out.h1[i] = z[1];
      out.h2[i] = second;
      out.h3[i] = third;
      out.f[i] = out.h1[i];
      out.f1[i] = out.h2[i];
      out.f2[i] = out.h3[i];
    } else {
      out.f[i] = z[0];
      out.f1[i] = z[1];
      out.f2[i] = second;
      out.h[i] = z[2];
      out.h1[i] = out.f[i];
      out.h2[i] = out.f1[i];
      out.h3[i] = out.f2[i];
    }
  }
  const double scale = std::max(1.0, std::abs(first_integral(spec, init)));
  const double limit = options.max_drift * scale;
  const auto series = first_integral_series(spec, out);
  std::size_t keep = count;
  for (std::size_t i = 0; i < count; ++i)
    if (!(std::abs(series[i] - series.front()) <= limit)) {
      keep = i;
      break;
    }
  if (keep < count) {
    // Approaching a singular factor the step cannot resolve the profile; keep the resolved prefix.
    if (!truncated)
      throw StepTooCoarseError("step too coarse: first-integral drift " + num(std::abs(series[keep] - series.front())) +
                               " exceeds " + num(limit) + " at step " + num(step));
    for (auto* v : {&out.s, &out.h, &out.h1, &out.h2, &out.h3, &out.f, &out.f1, &out.f2}) v->resize(keep);
  }
  out.reached = {out.s.front(), out.s.back()};
  return out;
}

std::vector<double> first_integral_series(const OdeSpec& spec, const ProfileSamples& samples) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = first_integral(spec, samples.state(i));
  return out;
}

double first_integral_drift(const OdeSpec& spec, const ProfileSamples& samples) {
  if (samples.size() == 0) return 0.0;
  const auto series = first_integral_series(spec, samples);
  double drift = 0.0;
  for (double v : series) drift = std::max(drift, std::abs(v - series.front()));
  return drift;
}

}  // namespace staticgeo::ode
