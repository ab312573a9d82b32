#pragma once

// Residual suite for a MetricModel: adapted-frame components of the static
// equation, the Codazzi condition along E_1, the radial curvature identity,
// the trace, first-integral drift and the distinct-eigenvalue count.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "staticgeo/geometry.hpp"

namespace staticgeo::verify {

struct Thresholds {
  double static_residual = 1e-6;
  double codazzi = 1e-6;
  double radial_curvature = 1e-6;
  double trace = 1e-6;
  /// Relative to max(1, |I(s_min)|).
  double drift = 1e-8;
  /// Clustering gap as a fraction of max |lambda| at the node.
  double distinct_rel = 1e-6;
  int max_distinct = 3;
  /// Obstruction claims need residuals this many times the pass threshold.
  double obstruction_factor = 100.0;
};

/// Defaults, with STATICGEO_TOL (a single number) overriding the static,
/// Codazzi, radial-curvature and trace thresholds when set. Throws ParseError
/// for a malformed or non-positive value.
Thresholds default_thresholds();
Thresholds apply_env_override(Thresholds base);

/// Nodes per end excluded from verdicts because their stencils are one-sided or lower order.
inline constexpr std::size_t kBoundaryBand = 3;

/// d/ds on a uniform grid: sixth-order central in the interior, fourth and
/// second order next to the ends, one-sided second order at the endpoints.
std::vector<double> finite_difference(std::span<const double> values, double step);

struct Verdict {
  std::string check;
  std::string block;
  double value = 0.0;      // sup over the interior nodes
  double threshold = 0.0;
  bool pass = true;
  double boundary = 0.0;   // sup over the boundary band, informational
};

struct ResidualReport {
  std::string family;
  int n = 0;
  double R = 0.0;
  double step = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  std::size_t nodes = 0;
  bool truncated = false;
  double requested_max = 0.0;
  int distinct_count_max = 0;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  /// Largest value among verdicts with the given check name (0 if none).
  double max_value(const std::string& check) const;
  const Verdict* find(const std::string& check, const std::string& block) const;
  /// key = value lines, one per metadata field and verdict.
  std::string to_key_value() const;
  /// Header plus one row per verdict: check,block,value,threshold,verdict,boundary.
  std::string to_csv() const;
};

/// Per-node residual of one identity on one block.
struct ResidualSeries {
  std::string check;
  std::string block;
  std::vector<double> values;
};

/// |f'' - f(lambda_1 - R/(n-1))| and, per non-radial block, |zeta f' - f(lambda - R/(n-1))|.
std::vector<ResidualSeries> static_residuals(const geometry::MetricModel& model, const geometry::Spectrum& spectrum);
/// |lambda' + zeta (lambda - lambda_1)| per non-radial block, lambda' by finite differences.
std::vector<ResidualSeries> codazzi_residuals(const geometry::MetricModel& model, const geometry::Spectrum& spectrum);
/// |(-zeta' - zeta^2) - (-lambda + R/(n-1))| per non-radial block.
std::vector<ResidualSeries> radial_curvature_residuals(const geometry::MetricModel& model,
                                                       const geometry::Spectrum& spectrum);
/// |sum mult * lambda - R|.
ResidualSeries trace_residual(const geometry::MetricModel& model, const geometry::Spectrum& spectrum);

/// Number of single-linkage clusters with gaps larger than tol.
int count_distinct(std::span<const double> values, double tol);
/// Max over nodes of the cluster count, tol = rel * max |lambda| at the node.
int count_distinct(const geometry::Spectrum& spectrum, double rel);

/// Sup over nodes [band, size - band) and over the band separately.
std::pair<double, double> interior_and_boundary_sup(std::span<const double> values, std::size_t band = kBoundaryBand);

/// Runs every residual, the drift and the distinct count. Throws ParameterError
/// when the grid has no interior nodes and RegularSetError off the regular set.
ResidualReport verify(const geometry::MetricModel& model, const Thresholds& thresholds = {});

/// Appends a verdict computed from a series.
void add_verdict(ResidualReport& report, const ResidualSeries& series, double threshold);

}  // namespace staticgeo::verify
