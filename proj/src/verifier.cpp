#include "staticgeo/verifier.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "staticgeo/errors.hpp"

namespace staticgeo::verify {

using geometry::BlockKind;
using geometry::MetricModel;
using geometry::Spectrum;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double lambda_shift(const MetricModel& m) { return m.R / (m.n - 1.0); }

}  // namespace

Thresholds apply_env_override(Thresholds base) {
  const char* raw = std::getenv("STATICGEO_TOL");
  if (raw == nullptr || *raw == '\0') return base;
  errno = 0;
  char* end = nullptr;
  const double tol = std::strtod(raw, &end);
  if (errno != 0 || end == raw || *end != '\0' || !std::isfinite(tol) || tol <= 0.0)
    throw ParseError(std::string("STATICGEO_TOL must be a positive number, got '") + raw + "'");
  base.static_residual = tol;
  base.codazzi = tol;
  base.radial_curvature = tol;
  base.trace = tol;
  return base;
}

Thresholds default_thresholds() { return apply_env_override(Thresholds{}); }

std::vector<double> finite_difference(std::span<const double> v, double step) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (v[1] - v[0]) / step;
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t left = i, right = n - 1 - i;
    const std::size_t reach = std::min(left, right);
    if (reach >= 3) {
      d[i] = (-v[i - 3] + 9.0 * v[i - 2] - 45.0 * v[i - 1] + 45.0 * v[i + 1] - 9.0 * v[i + 2] + v[i + 3]) /
             (60.0 * step);
    } else if (reach == 2) {
      d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * step);
    } else if (reach == 1) {
      d[i] = (v[i + 1] - v[i - 1]) / (2.0 * step);
    } else if (left == 0) {
      d[i] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * step);
    } else {
      d[i] = (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * step);
    }
  }
  return d;
}

std::pair<double, double> interior_and_boundary_sup(std::span<const double> values, std::size_t band) {
  double interior = 0.0, boundary = 0.0;
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::isnan(values[i]) ? INFINITY : std::abs(values[i]);
    if (i < band || i + band >= n)
      boundary = std::max(boundary, v);
    else
      interior = std::max(interior, v);
  }
  return {interior, boundary};
}

std::vector<ResidualSeries> static_residuals(const MetricModel& model, const Spectrum& spectrum) {
  geometry::require_regular(model.f1);
  const double shift = lambda_shift(model);
  const auto zeta = geometry::shape_zeta(model);
  const std::size_t count = model.nodes();
  std::vector<ResidualSeries> out;

  ResidualSeries radial{"static_radial", model.blocks.front().label, std::vector<double>(count)};
  for (std::size_t i = 0; i < count; ++i)
    radial.values[i] = std::abs(model.f2[i] - model.f[i] * (spectrum.values[0][i] - shift));
  out.push_back(std::move(radial));

  for (std::size_t b = 1; b < model.blocks.size(); ++b) {
    ResidualSeries s{"static_tangential", model.blocks[b].label, std::vector<double>(count)};
    for (std::size_t i = 0; i < count; ++i)
      s.values[i] = std::abs(zeta[b][i] * model.f1[i] - model.f[i] * (spectrum.values[b][i] - shift));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ResidualSeries> codazzi_residuals(const MetricModel& model, const Spectrum& spectrum) {
  const auto zeta = geometry::shape_zeta(model);
  const std::size_t count = model.nodes();
  std::vector<ResidualSeries> out;
  for (std::size_t b = 1; b < model.blocks.size(); ++b) {
    const auto dl = finite_difference(spectrum.values[b], model.profile.step);
    ResidualSeries s{"codazzi", model.blocks[b].label, std::vector<double>(count)};
    for (std::size_t i = 0; i < count; ++i)
      s.values[i] = std::abs(dl[i] + zeta[b][i] * (spectrum.values[b][i] - spectrum.values[0][i]));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ResidualSeries> radial_curvature_residuals(const MetricModel& model, const Spectrum& spectrum) {
  const double shift = lambda_shift(model);
  const auto zeta = geometry::shape_zeta(model);
  const std::size_t count = model.nodes();
  std::vector<ResidualSeries> out;
  for (std::size_t b = 1; b < model.blocks.size(); ++b) {
    const auto dz = finite_difference(zeta[b], model.profile.step);
    ResidualSeries s{"radial_curvature", model.blocks[b].label, std::vector<double>(count)};
    for (std::size_t i = 0; i < count; ++i) {
      const double z = zeta[b][i];
      s.values[i] = std::abs((-dz[i] - z * z) - (-spectrum.values[b][i] + shift));
    }
    out.push_back(std::move(s));
  }
  return out;
}

ResidualSeries trace_residual(const MetricModel& model, const Spectrum& spectrum) {
  ResidualSeries s{"trace", "all", std::vector<double>(model.nodes())};
  for (std::size_t i = 0; i < model.nodes(); ++i) s.values[i] = std::abs(spectrum.trace(i) - model.R);
  return s;
}

int count_distinct(std::span<const double> values, double tol) {
  if (values.empty()) return 0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  int clusters = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] > tol) ++clusters;
  return clusters;
}

int count_distinct(const Spectrum& spectrum, double rel) {
  int best = 0;
  std::vector<double> at(spectrum.values.size());
  for (std::size_t i = 0; i < spectrum.nodes(); ++i) {
    double scale = 0.0;
    for (std::size_t b = 0; b < at.size(); ++b) {
      at[b] = spectrum.values[b][i];
      scale = std::max(scale, std::abs(at[b]));
    }
    best = std::max(best, count_distinct(at, rel * scale));
  }
  return best;
}

void add_verdict(ResidualReport& report, const ResidualSeries& series, double threshold) {
  const auto [interior, boundary] = interior_and_boundary_sup(series.values);
  report.verdicts.push_back({series.check, series.block, interior, threshold, interior <= threshold, boundary});
}

ResidualReport verify(const MetricModel& model, const Thresholds& t) {
  if (model.nodes() < 2 * kBoundaryBand + 1)
    throw ParameterError("grid has " + std::to_string(model.nodes()) + " nodes; at least " +
                         std::to_string(2 * kBoundaryBand + 1) + " are needed for verification");
  const Spectrum spectrum = geometry::ricci_spectrum(model);

  ResidualReport report;
  report.family = geometry::to_string(model.family);
  report.n = model.n;
  report.R = model.R;
  report.step = model.profile.step;
  report.s_min = model.profile.reached.lo;
  report.s_max = model.profile.reached.hi;
  report.nodes = model.nodes();
  report.truncated = model.profile.truncated;
  report.requested_max = model.profile.requested.hi;

  for (const auto& s : static_residuals(model, spectrum)) add_verdict(report, s, t.static_residual);
  for (const auto& s : codazzi_residuals(model, spectrum)) add_verdict(report, s, t.codazzi);
  for (const auto& s : radial_curvature_residuals(model, spectrum)) add_verdict(report, s, t.radial_curvature);
  add_verdict(report, trace_residual(model, spectrum), t.trace);

  const double gap = report.truncated ? model.profile.requested.hi - model.profile.reached.hi : 0.0;
  report.verdicts.push_back({"coverage", "grid", gap, 0.0, !report.truncated, 0.0});

  const double drift = ode::first_integral_drift(model.ode, model.profile);
  const double scale = std::max(1.0, std::abs(ode::first_integral(model.ode, model.profile.state(0))));
  const double drift_threshold = t.drift * scale;
  report.verdicts.push_back({"first_integral_drift", "profile", drift, drift_threshold, drift <= drift_threshold, 0.0});

  report.distinct_count_max = count_distinct(spectrum, t.distinct_rel);
  report.verdicts.push_back({"distinct_count", "all", static_cast<double>(report.distinct_count_max),
                             static_cast<double>(t.max_distinct), report.distinct_count_max <= t.max_distinct, 0.0});
  return report;
}

bool ResidualReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

double ResidualReport::max_value(const std::string& check) const {
  double out = 0.0;
  for (const auto& v : verdicts)
    if (v.check == check) out = std::max(out, v.value);
  return out;
}

const Verdict* ResidualReport::find(const std::string& check, const std::string& block) const {
  for (const auto& v : verdicts)
    if (v.check == check && v.block == block) return &v;
  return nullptr;
}

std::string ResidualReport::to_key_value() const {
  std::ostringstream os;
  os << "family = " << family << "\n"
     << "n = " << n << "\n"
     << "R = " << num(R) << "\n"
     << "step = " << num(step) << "\n"
     << "s_min = " << num(s_min) << "\n"
     << "s_max = " << num(s_max) << "\n"
     << "nodes = " << nodes << "\n"
     << "truncated = " << (truncated ? "true" : "false") << "\n"
     << "distinct_count_max = " << distinct_count_max << "\n"
     << "all_pass = " << (all_pass() ? "true" : "false") << "\n";
  for (const auto& v : verdicts) {
    const std::string key = v.check + "[" + v.block + "]";
    os << key << " = " << num(v.value) << "\n"
       << key << ".threshold = " << num(v.threshold) << "\n"
       << key << ".verdict = " << (v.pass ? "pass" : "fail") << "\n";
  }
  return os.str();
}

std::string ResidualReport::to_csv() const {
  std::ostringstream os;
  os << "check,block,value,threshold,verdict,boundary\n";
  for (const auto& v : verdicts)
    os << v.check << ',' << v.block << ',' << num(v.value) << ',' << num(v.threshold) << ','
       << (v.pass ? "pass" : "fail") << ',' << num(v.boundary) << '\n';
  return os.str();
}

}  // namespace staticgeo::verify
