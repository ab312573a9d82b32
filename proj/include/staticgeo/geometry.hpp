#pragma once

// Metric models for the four vacuum static families with harmonic curvature
// plus the general shifted-class reduction. Fibers are abstract: only their
// dimension and Einstein constant enter, so every quantity is a function of s.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "staticgeo/profile_ode.hpp"
#include "staticgeo/rational_algebra.hpp"

namespace staticgeo::geometry {

/// Einstein manifold with r = einstein_constant * g.
struct FiberSpec {
  int dim = 1;
  double einstein_constant = 0.0;
  std::string label;
};

/// dim >= 1, finite constant, and a one-dimensional fiber must be Ricci flat.
void validate(const FiberSpec& fiber);

enum class BlockKind {
  radial,         // E_1 = grad f / |grad f|
  warped_fiber,   // fiber of a warped product, warping w(s)
  flat_factor,    // zeta = 0 directions with constant eigenvalue
  shifted_class,  // zeta = h'/(h + c) in the general reduction
};

std::string to_string(BlockKind kind);

/// One Ricci-eigenvalue block and where it comes from.
struct Block {
  std::string label;
  BlockKind kind = BlockKind::radial;
  int multiplicity = 1;
  std::optional<std::size_t> fiber;  // into MetricModel::fibers
  double eigenvalue = 0.0;           // flat_factor only
  double shift = 0.0;                // shifted_class only
};

enum class Family { product_with_static, warped_einstein_fiber, einstein, einstein_product, multiclass };

std::string to_string(Family family);

struct Grid {
  double s_min = 0.0;
  double s_max = 1.0;
  double step = 1e-3;
};

/// (i): N^{k-1} with metric p^2 g1, r_{g1} = (k-2) k2 g1, times the warped
/// factor ds^2 + h^2 g2 over U^{n-k} with r_{g2} = (n-k-1) kn g2. `level` is
/// kn for n-k >= 2 and c3 for n-k = 1; it may replace h1 as initial data.
struct ProductWithStaticParams {
  int n = 0;
  int k = 0;
  double R = 0.0;
  double c2 = 0.0;
  double k2 = 0.0;
  double p = 1.0;
  std::optional<double> level;
  double f_scale = 1.0;  // f = f_scale * h'
  double h0 = 1.0;
  std::optional<double> h1;
};

/// (ii): ds^2 + h^2 g_N with r_{g_N} = (n-2) fiber_k g_N.
struct WarpedEinsteinFiberParams {
  int n = 0;
  double R = 0.0;
  double a = 0.0;
  double h0 = 1.0;
  std::optional<double> h1;
  std::optional<double> fiber_k;
};

/// (iii): ds^2 + (f')^2 g~ with g~ Einstein.
struct EinsteinParams {
  int n = 0;
  double R = 0.0;
  double f0 = 0.0;
  double f1 = 1.0;
  std::optional<double> fiber_constant;
};

/// (iv): (N1^k, g1) x (N2^{n-k}, g2) with r_{g1} = (1 - 1/k) R/(n-1) g1, r_{g2} = R/(n-1) g2.
struct EinsteinProductParams {
  int n = 0;
  int k = 0;
  double R = 0.0;
  double f0 = 0.0;
  double f1 = 1.0;
  std::optional<double> factor1_eigenvalue;
  std::optional<double> factor2_eigenvalue;
};

/// General reduction H h'' + R Q/(n-1) = a with classes (h + c)^mult.
struct MulticlassParams {
  int n = 0;
  double R = 0.0;
  double a = 0.0;
  algebra::RootFactorization roots;
  double h0 = 1.0;
  double h1 = 1.0;
};

using CaseParams = std::variant<ProductWithStaticParams, WarpedEinsteinFiberParams, EinsteinParams,
                                EinsteinProductParams, MulticlassParams>;

struct MetricModel {
  Family family = Family::einstein;
  int n = 0;
  double R = 0.0;
  ode::OdeSpec ode;
  ode::ProfileSamples profile;
  std::vector<FiberSpec> fibers;
  double product_scale = 1.0;  // p, family (i)
  double f_scale = 1.0;
  /// blocks.front() is the radial block; multiplicities sum to n.
  std::vector<Block> blocks;
  /// Potential and its s-derivatives at the nodes (already scaled by f_scale).
  std::vector<double> f, f1, f2;

  std::size_t nodes() const { return profile.size(); }
};

/// Relative tolerance of the constraint equations between case parameters.
inline constexpr double kConstraintTolerance = 1e-12;

/// Integrates the profile and assembles the block structure. Throws
/// ConstraintError (with both sides) when a case constraint fails and
/// RegularSetError when f' vanishes on the grid.
MetricModel build_case(const CaseParams& params, const Grid& grid, const ode::IntegrateOptions& options = {});

/// Ricci eigenvalues per block and node.
struct Spectrum {
  std::vector<int> multiplicities;
  std::vector<std::vector<double>> values;  // [block][node]

  std::size_t nodes() const { return values.empty() ? 0 : values.front().size(); }
  /// (eigenvalue, multiplicity) pairs at one node.
  std::vector<std::pair<double, int>> at(std::size_t node) const;
  /// sum multiplicity * eigenvalue at one node.
  double trace(std::size_t node) const;
};

Spectrum ricci_spectrum(const MetricModel& model);

/// Shape coefficient of one non-radial block computed from the warping profile
/// and from the eigenvalue relation zeta f' = f (lambda - R/(n-1)).
struct ZetaBlock {
  std::size_t block = 0;
  std::vector<double> shape;
  std::vector<double> spectral;
  std::vector<double> difference;
};

/// Throws RegularSetError("not on regular set") when f' vanishes on the grid.
std::vector<ZetaBlock> zeta_profile(const MetricModel& model, const Spectrum& spectrum);

/// Shape coefficients only (no regular-set requirement beyond the warping being nonzero).
std::vector<std::vector<double>> shape_zeta(const MetricModel& model);

/// Throws RegularSetError if f' is zero at a node or changes sign between nodes.
void require_regular(std::span<const double> f1);

}  // namespace staticgeo::geometry
