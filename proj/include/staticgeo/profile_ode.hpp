#pragma once

// One-dimensional ODEs for the warping profile h(s) (or the potential f(s))
// of each vacuum static family, a fixed-step RK4 integrator, and the first
// integrals conserved along solutions.

#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "staticgeo/rational_algebra.hpp"

namespace staticgeo::ode {

inline constexpr double kDefaultDeltaMin = 1e-3;

/// Warped factor of the product family (i):
/// h'' = -R h / ((n-1)(n-k+1)) + c2 h^{k-n}; c2 is absent when n - k = 1.
struct WarpedFactorOde {
  int n = 0;
  int k = 0;
  double R = 0.0;
  double c2 = 0.0;
};

/// Warped product over an Einstein fiber, family (ii): h'' = -R h/(n(n-1)) + a h^{1-n}.
struct WarpedFiberOde {
  int n = 0;
  double R = 0.0;
  double a = 0.0;
};

/// Einstein family (iii): f'' = -R f/(n(n-1)).
struct EinsteinOde {
  int n = 0;
  double R = 0.0;
};

/// Product of two Einstein manifolds, family (iv): f'' = -R f/(k(n-1)).
struct ProductOde {
  int n = 0;
  int k = 0;
  double R = 0.0;
};

/// General reduction with shifted classes: H(h) h'' + R Q(h)/(n-1) = a,
/// H = prod (h + c)^mult, dQ/dh = H, Q(0) = 0.
class MulticlassOde {
 public:
  MulticlassOde(int n, double R, double a, algebra::RootFactorization roots);

  int n() const { return n_; }
  double R() const { return R_; }
  double a() const { return a_; }
  const algebra::RootFactorization& roots() const { return roots_; }
  /// m - 1 = sum of multiplicities, the number of directions with nonzero shape coefficient.
  int m() const { return roots_.degree() + 1; }
  std::size_t class_count() const { return roots_.size(); }
  double shift(std::size_t l) const { return shifts_[l]; }

  const algebra::Polynomial& H() const { return H_; }
  const algebra::Polynomial& Q() const { return Q_; }
  /// 1/H expansion (alpha_{l,t}).
  const algebra::PartialFractionExpansion& inverse_expansion() const { return inverse_; }
  /// Q/H expansion (b_{l,t} plus linear part).
  const algebra::PartialFractionExpansion& ratio_expansion() const { return ratio_; }

  double H_at(double h) const { return H_.eval(h); }
  double Q_at(double h) const { return Q_.eval(h); }
  /// H'(h)/H(h) = sum mult/(h + c).
  double log_derivative_H(double h) const;

 private:
  int n_;
  double R_;
  double a_;
  algebra::RootFactorization roots_;
  std::vector<double> shifts_;
  algebra::Polynomial H_;
  algebra::Polynomial Q_;
  algebra::PartialFractionExpansion inverse_;
  algebra::PartialFractionExpansion ratio_;
};

using OdeSpec = std::variant<WarpedFactorOde, WarpedFiberOde, EinsteinOde, ProductOde, MulticlassOde>;

/// Which function the second-order ODE is posed for.
enum class ProfileVariable {
  warping,    // state (h, h'), f = h'
  potential,  // state (f, f'), h = integral of f
};

ProfileVariable profile_variable(const OdeSpec& spec);
std::string case_name(const OdeSpec& spec);

struct State {
  double value = 0.0;
  double slope = 0.0;
};

/// Throws ParameterError for out-of-range dimensions and DegenerateError when
/// the parameters force f to be constant.
void validate(const OdeSpec& spec);

/// Distance of the integrated variable from the singular set; +inf when there is none.
double singular_distance(const OdeSpec& spec, double value);

/// Second derivative of the integrated variable. Throws SingularityError within
/// delta_min of the singular set, naming the offending factor.
double rhs(const OdeSpec& spec, State state, double delta_min = kDefaultDeltaMin);

/// Third derivative along the flow, from differentiating rhs by the chain rule.
double third_derivative(const OdeSpec& spec, State state);

/// Conserved combination. For MulticlassOde the antiderivatives of Q/H and 1/H
/// carry no integration constant, so only differences along a solution are meaningful.
double first_integral(const OdeSpec& spec, State state);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntegrateOptions {
  double delta_min = kDefaultDeltaMin;
  /// Relative first-integral drift above which the step is rejected as too coarse.
  double max_drift = 1e-6;
};

/// Uniform-grid samples of the profile. f = h', f' = h'', f'' = h''' hold by aliasing.
struct ProfileSamples {
  ProfileVariable variable = ProfileVariable::warping;
  double step = 0.0;
  std::vector<double> s;
  std::vector<double> h, h1, h2, h3;
  std::vector<double> f, f1, f2;
  bool truncated = false;
  Interval requested;
  Interval reached;

  std::size_t size() const { return s.size(); }
  /// State of the integrated variable at node i.
  State state(std::size_t i) const;
};

/// Classical RK4 on the grid lo + i*step. Stops before any stage comes within
/// delta_min of the singular set and reports the reached interval; a truncated
/// run is also cut back to the last node whose first-integral drift is within
/// max_drift. An untruncated run exceeding max_drift throws StepTooCoarseError.
ProfileSamples integrate(const OdeSpec& spec, State init, Interval range, double step,
                         const IntegrateOptions& options = {});

/// first_integral at every node.
std::vector<double> first_integral_series(const OdeSpec& spec, const ProfileSamples& samples);

/// max_i |I(node i) - I(node 0)|.
double first_integral_drift(const OdeSpec& spec, const ProfileSamples& samples);

}  // namespace staticgeo::ode
