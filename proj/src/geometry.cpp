#include "staticgeo/geometry.hpp"

#include <cmath>
#include <numeric>

#include "staticgeo/errors.hpp"

namespace staticgeo::geometry {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_constraint(const std::string& name, double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (!(std::abs(lhs - rhs) <= kConstraintTolerance * scale))
    throw ConstraintError("constraint violated: " + name, lhs, rhs);
}

/// Initial slope from either an explicit h'(s_min) or the conserved level.
/// Returns (slope, level).
std::pair<double, double> resolve_slope(const ode::OdeSpec& spec, double h0, std::optional<double> h1,
                                        std::optional<double> level, const std::string& level_name) {
  if (h1) {
    const double value = ode::first_integral(spec, {h0, *h1});
    if (level) check_constraint("first integral at s_min equals " + level_name, value, *level);
    return {*h1, value};
  }
  if (!level) throw ParameterError("initial slope h1 or the level " + level_name + " is required");
  const double at_rest = ode::first_integral(spec, {h0, 0.0});
  const double radicand = *level - at_rest;
  if (radicand < 0.0)
    throw ConstraintError(level_name + " lies below the first-integral value of h0 at rest", *level, at_rest);
  return {std::sqrt(radicand), *level};
}

struct Warping {
  double w;
  double w1;
  double w2;
};

Warping warping_at(const MetricModel& m, std::size_t i) {
  const auto& p = m.profile;
  if (p.variable == ode::ProfileVariable::warping) return {p.h[i], p.h1[i], p.h2[i]};
  return {p.f1[i], p.f2[i], ode::third_derivative(m.ode, {p.f[i], p.f1[i]})};
}

MetricModel assemble(Family family, int n, double R, ode::OdeSpec spec, ode::State init, const Grid& grid,
                     const ode::IntegrateOptions& options) {
  MetricModel model;
  model.family = family;
  model.n = n;
  model.R = R;
  model.profile = ode::integrate(spec, init, {grid.s_min, grid.s_max}, grid.step, options);
  model.ode = std::move(spec);
  return model;
}

void finish(MetricModel& model) {
  for (const auto& fiber : model.fibers) validate(fiber);
  const int total = std::accumulate(model.blocks.begin(), model.blocks.end(), 0,
                                    [](int acc, const Block& b) { return acc + b.multiplicity; });
  if (total != model.n)
    throw ParameterError("block multiplicities sum to " + std::to_string(total) + ", expected n = " +
                         std::to_string(model.n));
  const auto& p = model.profile;
  model.f.resize(p.size());
  model.f1.resize(p.size());
  model.f2.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    model.f[i] = model.f_scale * p.f[i];
    model.f1[i] = model.f_scale * p.f1[i];
    model.f2[i] = model.f_scale * p.f2[i];
  }
  require_regular(model.f1);
}

MetricModel build(const ProductWithStaticParams& q, const Grid& grid, const ode::IntegrateOptions& options) {
  ode::OdeSpec spec = ode::WarpedFactorOde{q.n, q.k, q.R, q.c2};
  ode::validate(spec);
  if (q.p == 0.0) throw ParameterError("product scale p must be nonzero");
  if (q.f_scale == 0.0) throw DegenerateError("degenerate: f = c h' with c = 0 is constant");
  check_constraint("(k-2) k2 / p^2 = R/(n-1)", (q.k - 2.0) * q.k2 / (q.p * q.p), q.R / (q.n - 1.0));
  const int d = q.n - q.k;
  const auto [slope, level] = resolve_slope(spec, q.h0, q.h1, q.level, d >= 2 ? "kn" : "c3");

  MetricModel model = assemble(Family::product_with_static, q.n, q.R, spec, {q.h0, slope}, grid, options);
  model.product_scale = q.p;
  model.f_scale = q.f_scale;
  model.fibers = {{q.k - 1, (q.k - 2.0) * q.k2, "N"}, {d, d >= 2 ? (d - 1.0) * level : 0.0, "U"}};
  model.blocks = {
      {"radial", BlockKind::radial, 1, std::nullopt, 0.0, 0.0},
      {"U", BlockKind::warped_fiber, d, 1, 0.0, 0.0},
      {"N", BlockKind::flat_factor, q.k - 1, 0, (q.k - 2.0) * q.k2 / (q.p * q.p), 0.0},
  };
  finish(model);
  return model;
}

MetricModel build(const WarpedEinsteinFiberParams& q, const Grid& grid, const ode::IntegrateOptions& options) {
  ode::OdeSpec spec = ode::WarpedFiberOde{q.n, q.R, q.a};
  ode::validate(spec);
  const auto [slope, level] = resolve_slope(spec, q.h0, q.h1, q.fiber_k, "fiber_k");
  MetricModel model = assemble(Family::warped_einstein_fiber, q.n, q.R, spec, {q.h0, slope}, grid, options);
  model.fibers = {{q.n - 1, (q.n - 2.0) * level, "N"}};
  model.blocks = {
      {"radial", BlockKind::radial, 1, std::nullopt, 0.0, 0.0},
      {"N", BlockKind::warped_fiber, q.n - 1, 0, 0.0, 0.0},
  };
  finish(model);
  return model;
}

MetricModel build(const EinsteinParams& q, const Grid& grid, const ode::IntegrateOptions& options) {
  ode::OdeSpec spec = ode::EinsteinOde{q.n, q.R};
  ode::validate(spec);
  const double kappa = q.R / (q.n * (q.n - 1.0));
  // Fiber of ds^2 + (f')^2 g~: normalized curvature (f'')^2 + kappa (f')^2 = kappa * I.
  const double expected = (q.n - 2.0) * kappa * ode::first_integral(spec, {q.f0, q.f1});
  if (q.fiber_constant) check_constraint("fiber Einstein constant of the Einstein family", *q.fiber_constant, expected);
  MetricModel model = assemble(Family::einstein, q.n, q.R, spec, {q.f0, q.f1}, grid, options);
  model.fibers = {{q.n - 1, expected, "fiber"}};
  model.blocks = {
      {"radial", BlockKind::radial, 1, std::nullopt, 0.0, 0.0},
      {"fiber", BlockKind::warped_fiber, q.n - 1, 0, 0.0, 0.0},
  };
  finish(model);
  return model;
}

MetricModel build(const EinsteinProductParams& q, const Grid& grid, const ode::IntegrateOptions& options) {
  ode::OdeSpec spec = ode::ProductOde{q.n, q.k, q.R};
  ode::validate(spec);
  const double first = (1.0 - 1.0 / q.k) * q.R / (q.n - 1.0);
  const double second = q.R / (q.n - 1.0);
  if (q.factor1_eigenvalue) check_constraint("r_{g1} = (1 - 1/k) R/(n-1) g1", *q.factor1_eigenvalue, first);
  if (q.factor2_eigenvalue) check_constraint("r_{g2} = R/(n-1) g2", *q.factor2_eigenvalue, second);
  const double kappa = q.R / (q.k * (q.n - 1.0));

  MetricModel model = assemble(Family::einstein_product, q.n, q.R, spec, {q.f0, q.f1}, grid, options);
  model.blocks.push_back({"radial", BlockKind::radial, 1, std::nullopt, 0.0, 0.0});
  if (q.k >= 2) {
    model.fibers.push_back({q.k - 1, (q.k - 2.0) * kappa * ode::first_integral(spec, {q.f0, q.f1}), "N1"});
    model.blocks.push_back({"N1", BlockKind::warped_fiber, q.k - 1, model.fibers.size() - 1, 0.0, 0.0});
  }
  model.fibers.push_back({q.n - q.k, second, "N2"});
  model.blocks.push_back({"N2", BlockKind::flat_factor, q.n - q.k, model.fibers.size() - 1, second, 0.0});
  finish(model);
  return model;
}

MetricModel build(const MulticlassParams& q, const Grid& grid, const ode::IntegrateOptions& options) {
  ode::MulticlassOde reduction(q.n, q.R, q.a, q.roots);
  ode::OdeSpec spec = reduction;
  ode::validate(spec);
  MetricModel model = assemble(Family::multiclass, q.n, q.R, spec, {q.h0, q.h1}, grid, options);
  model.blocks.push_back({"radial", BlockKind::radial, 1, std::nullopt, 0.0, 0.0});
  for (std::size_t l = 0; l < reduction.class_count(); ++l)
    model.blocks.push_back({"c=" + algebra::to_string(q.roots[l].shift), BlockKind::shifted_class,
                            q.roots[l].multiplicity, std::nullopt, 0.0, reduction.shift(l)});
  if (q.n > reduction.m())
    model.blocks.push_back({"flat", BlockKind::flat_factor, q.n - reduction.m(), std::nullopt, q.R / (q.n - 1.0), 0.0});
  finish(model);
  return model;
}

}  // namespace

void validate(const FiberSpec& fiber) {
  if (fiber.dim < 1) throw ParameterError("fiber '" + fiber.label + "' must have dim >= 1");
  if (!std::isfinite(fiber.einstein_constant))
    throw ParameterError("fiber '" + fiber.label + "' has a non-finite Einstein constant");
  if (fiber.dim == 1 && fiber.einstein_constant != 0.0)
    throw ConstraintError("one-dimensional fiber '" + fiber.label + "' must be Ricci flat",
                          fiber.einstein_constant, 0.0);
}

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::radial: return "radial";
    case BlockKind::warped_fiber: return "warped-fiber";
    case BlockKind::flat_factor: return "flat-product-factor";
    case BlockKind::shifted_class: return "shifted-class";
  }
  return "unknown";
}

std::string to_string(Family family) {
  switch (family) {
    case Family::product_with_static: return "i";
    case Family::warped_einstein_fiber: return "ii";
    case Family::einstein: return "iii";
    case Family::einstein_product: return "iv";
    case Family::multiclass: return "multiclass";
  }
  return "unknown";
}

MetricModel build_case(const CaseParams& params, const Grid& grid, const ode::IntegrateOptions& options) {
  return std::visit([&](const auto& q) { return build(q, grid, options); }, params);
}

void require_regular(std::span<const double> f1) {
  for (std::size_t i = 0; i < f1.size(); ++i) {
    if (!(f1[i] != 0.0) || !std::isfinite(f1[i]))
      throw RegularSetError("not on regular set: f' = 0 at node " + std::to_string(i));
    if (i > 0 && std::signbit(f1[i]) != std::signbit(f1[i - 1]))
      throw RegularSetError("not on regular set: f' changes sign between nodes " + std::to_string(i - 1) +
                            " and " + std::to_string(i));
  }
}

std::vector<std::pair<double, int>> Spectrum::at(std::size_t node) const {
  std::vector<std::pair<double, int>> out;
  out.reserve(values.size());
  for (std::size_t b = 0; b < values.size(); ++b) out.emplace_back(values[b][node], multiplicities[b]);
  return out;
}

double Spectrum::trace(std::size_t node) const {
  double acc = 0.0;
  for (std::size_t b = 0; b < values.size(); ++b) acc += multiplicities[b] * values[b][node];
  return acc;
}

Spectrum ricci_spectrum(const MetricModel& model) {
  const std::size_t count = model.nodes();
  const double shift_R = model.R / (model.n - 1.0);
  int warped_dims = 0;
  for (const auto& b : model.blocks)
    if (b.kind == BlockKind::warped_fiber) warped_dims += b.multiplicity;

  Spectrum out;
  for (const auto& block : model.blocks) {
    out.multiplicities.push_back(block.multiplicity);
    std::vector<double> values(count);
    double kappa_fiber = 0.0;
    int fiber_dim = block.multiplicity;
    if (block.kind == BlockKind::warped_fiber) {
      if (!block.fiber) throw ParameterError("warped block '" + block.label + "' has no fiber");
      const FiberSpec& fiber = model.fibers.at(*block.fiber);
      validate(fiber);
      if (fiber.dim != block.multiplicity)
        throw ParameterError("fiber '" + fiber.label + "' dimension does not match its block multiplicity");
      fiber_dim = fiber.dim;
      kappa_fiber = fiber_dim >= 2 ? fiber.einstein_constant / (fiber_dim - 1.0) : 0.0;
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto& p = model.profile;
      switch (block.kind) {
        case BlockKind::radial:
          if (model.family == Family::multiclass) {
            values[i] = p.h3[i] / p.h1[i] + shift_R;
          } else {
            const Warping w = warping_at(model, i);
            values[i] = -warped_dims * w.w2 / w.w;
          }
          break;
        case BlockKind::warped_fiber: {
          const Warping w = warping_at(model, i);
          double v = -w.w2 / w.w;
          if (fiber_dim >= 2) v -= (fiber_dim - 1.0) * (w.w1 * w.w1 - kappa_fiber) / (w.w * w.w);
          values[i] = v;
          break;
        }
        case BlockKind::flat_factor:
          values[i] = block.eigenvalue;
          break;
        case BlockKind::shifted_class:
          values[i] = p.h2[i] / (p.h[i] + block.shift) + shift_R;
          break;
      }
    }
    out.values.push_back(std::move(values));
  }
  return out;
}

std::vector<std::vector<double>> shape_zeta(const MetricModel& model) {
  const std::size_t count = model.nodes();
  std::vector<std::vector<double>> out;
  for (const auto& block : model.blocks) {
    std::vector<double> z(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      switch (block.kind) {
        case BlockKind::warped_fiber: {
          const Warping w = warping_at(model, i);
          z[i] = w.w1 / w.w;
          break;
        }
        case BlockKind::shifted_class:
          z[i] = model.profile.h1[i] / (model.profile.h[i] + block.shift);
          break;
        case BlockKind::radial:
        case BlockKind::flat_factor:
          break;
      }
    }
    out.push_back(std::move(z));
  }
  return out;
}

std::vector<ZetaBlock> zeta_profile(const MetricModel& model, const Spectrum& spectrum) {
  require_regular(model.f1);
  const double shift_R = model.R / (model.n - 1.0);
  const auto shapes = shape_zeta(model);
  std::vector<ZetaBlock> out;
  for (std::size_t b = 0; b < model.blocks.size(); ++b) {
    if (model.blocks[b].kind == BlockKind::radial) continue;
    ZetaBlock z;
    z.block = b;
    z.shape = shapes[b];
    z.spectral.resize(model.nodes());
    z.difference.resize(model.nodes());
    for (std::size_t i = 0; i < model.nodes(); ++i) {
      z.spectral[i] = model.f[i] * (spectrum.values[b][i] - shift_R) / model.f1[i];
      z.difference[i] = z.shape[i] - z.spectral[i];
    }
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace staticgeo::geometry
