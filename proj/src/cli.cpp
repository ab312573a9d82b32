#include "staticgeo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "staticgeo/errors.hpp"
#include "staticgeo/search.hpp"

namespace staticgeo::cli {

namespace fs = std::filesystem;
using algebra::Rational;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_string(Command command) {
  switch (command) {
    case Command::build: return "build";
    case Command::verify: return "verify";
    case Command::probe: return "probe";
    case Command::audit: return "audit";
    case Command::expand: return "expand";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + message);
}

Command parse_command(const std::string& value, const std::string& origin, int line) {
  if (value == "build") return Command::build;
  if (value == "verify") return Command::verify;
  if (value == "probe") return Command::probe;
  if (value == "audit") return Command::audit;
  if (value == "expand") return Command::expand;
  fail(origin, line, "unknown command '" + value + "' (expected build, verify, probe, audit or expand)");
}

double finite_number(const std::string& value, const std::string& origin, int line, const std::string& key) {
  try {
    const double x = algebra::to_double(algebra::parse_rational(value));
    if (!std::isfinite(x)) fail(origin, line, "field '" + key + "' is not finite");
    return x;
  } catch (const ParseError& e) {
    fail(origin, line, "field '" + key + "': " + e.what());
  }
}

const std::set<std::string> kCaseTypes = {"i", "ii", "iii", "iv", "multiclass"};

const std::map<std::string, std::set<std::string>> kCaseKeys = {
    {"i", {"n", "k", "R", "c2", "k2", "p", "level", "f_scale", "h0", "h1"}},
    {"ii", {"n", "R", "a", "h0", "h1", "fiber_k"}},
    {"iii", {"n", "R", "f0", "f1", "fiber_constant"}},
    {"iv", {"n", "k", "R", "f0", "f1", "factor1_eigenvalue", "factor2_eigenvalue"}},
    {"multiclass", {"n", "R", "a", "shifts", "multiplicities", "h0", "h1"}},
    {"audit", {"n", "R", "a", "shifts", "multiplicities"}},
    {"expand", {"shifts", "multiplicities", "numerator"}},
};

void apply_threshold(verify::Thresholds& t, const std::string& key, const std::string& value, const std::string& origin,
                     int line) {
  const double x = finite_number(value, origin, line, key);
  if (key == "max_distinct") {
    if (x < 1 || x != std::floor(x)) fail(origin, line, "max_distinct must be a positive integer");
    t.max_distinct = static_cast<int>(x);
    return;
  }
  if (x <= 0) fail(origin, line, "threshold '" + key + "' must be positive");
  if (key == "static") t.static_residual = x;
  else if (key == "codazzi") t.codazzi = x;
  else if (key == "radial_curvature") t.radial_curvature = x;
  else if (key == "trace") t.trace = x;
  else if (key == "drift") t.drift = x;
  else if (key == "distinct_rel") t.distinct_rel = x;
  else if (key == "obstruction_factor") t.obstruction_factor = x;
  else fail(origin, line, "unknown threshold '" + key + "'");
}

const Field& require(const Scenario& s, const std::string& key) {
  const auto it = s.fields.find(key);
  if (it == s.fields.end()) throw ParseError(s.origin + ": missing required field '" + key + "' in [case]");
  return it->second;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin, const fs::path& base_dir) {
  Scenario s;
  s.origin = origin;
  s.thresholds = verify::default_thresholds();
  std::string section;
  std::string line_text;
  int line = 0;
  bool have_command = false;
  std::set<std::string> seen;
  int type_line = 0;
  std::optional<Field> grid_step;

  while (std::getline(in, line_text)) {
    ++line;
    const auto hash = line_text.find('#');
    const std::string text = trim(hash == std::string::npos ? line_text : line_text.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(origin, line, "malformed section header");
      section = trim(text.substr(1, text.size() - 2));
      if (section != "scenario" && section != "case" && section != "grid" && section != "thresholds" &&
          section != "output")
        fail(origin, line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (section.empty()) fail(origin, line, "key '" + key + "' outside any section");
    if (key.empty()) fail(origin, line, "empty key");
    if (value.empty()) fail(origin, line, "empty value for '" + key + "'");
    if (!seen.insert(section + "." + key).second) fail(origin, line, "duplicate key '" + key + "' in [" + section + "]");

    if (section == "scenario") {
      if (key == "name") s.name = value;
      else if (key == "command") { s.command = parse_command(value, origin, line); have_command = true; }
      else fail(origin, line, "unknown key '" + key + "' in [scenario]");
    } else if (section == "case") {
      if (key == "type") {
        if (!kCaseTypes.count(value)) fail(origin, line, "unknown case type '" + value + "'");
        s.case_type = value;
        type_line = line;
      } else {
        s.fields[key] = {value, line};
      }
    } else if (section == "grid") {
      const double x = finite_number(value, origin, line, key);
      if (key == "s_min") s.grid.s_min = x;
      else if (key == "s_max") s.grid.s_max = x;
      else if (key == "step") { s.grid.step = x; grid_step = Field{value, line}; }
      else fail(origin, line, "unknown key '" + key + "' in [grid]");
    } else if (section == "thresholds") {
      apply_threshold(s.thresholds, key, value, origin, line);
    } else if (section == "output") {
      if (key == "dir") s.output_dir = base_dir / value;
      else if (key == "plot") {
        if (value == "true" || value == "yes" || value == "1") s.plot = true;
        else if (value == "false" || value == "no" || value == "0") s.plot = false;
        else fail(origin, line, "plot must be true or false");
      } else fail(origin, line, "unknown key '" + key + "' in [output]");
    }
  }

  if (!have_command) throw ParseError(origin + ": missing [scenario] command");
  if (s.name.empty()) s.name = fs::path(origin).stem().string();

  std::string schema;
  if (s.command == Command::audit || s.command == Command::expand) {
    schema = to_string(s.command);
  } else {
    if (s.case_type.empty()) throw ParseError(origin + ": missing [case] type");
    if (s.command == Command::probe && s.case_type != "multiclass")
      fail(origin, type_line, "probe requires case type multiclass");
    schema = s.case_type;
    if (!(s.grid.step > 0.0)) fail(origin, grid_step ? grid_step->line : 0, "grid step must be positive");
    if (!(s.grid.s_max > s.grid.s_min)) throw ParseError(origin + ": grid needs s_max > s_min");
  }
  const auto& allowed = kCaseKeys.at(schema);
  for (const auto& [key, field] : s.fields)
    if (!allowed.count(key)) fail(origin, field.line, "field '" + key + "' does not apply to " + schema);
  return s;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  Scenario s = parse_scenario(in, path.string(), path.parent_path());
  if (s.output_dir.empty()) s.output_dir = path.parent_path() / (path.stem().string() + ".out");
  return s;
}

Rational rational_field(const Scenario& s, const std::string& key) {
  const Field& f = require(s, key);
  try {
    return algebra::parse_rational(f.value);
  } catch (const ParseError& e) {
    fail(s.origin, f.line, "field '" + key + "': " + e.what());
  }
}

double number_field(const Scenario& s, const std::string& key) {
  const Field& f = require(s, key);
  return finite_number(f.value, s.origin, f.line, key);
}

std::optional<double> optional_number(const Scenario& s, const std::string& key) {
  if (!s.fields.count(key)) return std::nullopt;
  return number_field(s, key);
}

int integer_field(const Scenario& s, const std::string& key) {
  const Field& f = require(s, key);
  const Rational q = rational_field(s, key);
  if (q.get_den() != 1 || !q.get_num().fits_sint_p()) fail(s.origin, f.line, "field '" + key + "' must be an integer");
  return static_cast<int>(q.get_num().get_si());
}

algebra::RootFactorization roots_field(const Scenario& s) {
  const Field& shifts_field = require(s, "shifts");
  const auto shifts = split_list(shifts_field.value);
  std::vector<std::string> mults;
  int mult_line = shifts_field.line;
  if (const auto it = s.fields.find("multiplicities"); it != s.fields.end()) {
    mults = split_list(it->second.value);
    mult_line = it->second.line;
    if (mults.size() != shifts.size())
      fail(s.origin, mult_line, "multiplicities has " + std::to_string(mults.size()) + " entries, shifts has " +
                                    std::to_string(shifts.size()));
  } else {
    mults.assign(shifts.size(), "1");
  }
  std::vector<algebra::RootFactor> factors;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    algebra::RootFactor f;
    try {
      f.shift = algebra::parse_rational(shifts[i]);
    } catch (const ParseError& e) {
      fail(s.origin, shifts_field.line, "shift '" + shifts[i] + "': " + e.what());
    }
    Rational m;
    try {
      m = algebra::parse_rational(mults[i]);
    } catch (const ParseError& e) {
      fail(s.origin, mult_line, "multiplicity '" + mults[i] + "': " + e.what());
    }
    if (m.get_den() != 1 || m < 1 || m > 64) fail(s.origin, mult_line, "multiplicities must be integers in [1, 64]");
    f.multiplicity = static_cast<int>(m.get_num().get_si());
    factors.push_back(f);
  }
  return algebra::RootFactorization(std::move(factors));
}

geometry::CaseParams case_params(const Scenario& s) {
  const std::string& t = s.case_type;
  if (t == "i") {
    geometry::ProductWithStaticParams q;
    q.n = integer_field(s, "n");
    q.k = integer_field(s, "k");
    const Rational R = rational_field(s, "R");
    const Rational k2 = rational_field(s, "k2");
    const Rational p = s.fields.count("p") ? rational_field(s, "p") : Rational(1);
    if (p == 0) throw ParameterError("product scale p must be nonzero");
    // Exact form of (k-2) k2 / p^2 = R/(n-1).
    if (Rational((q.k - 2) * (q.n - 1)) * k2 != R * p * p)
      throw ConstraintError("constraint violated: (k-2) k2 / p^2 = R/(n-1)",
                            algebra::to_double(Rational(Rational(q.k - 2) * k2 / (p * p))),
                            algebra::to_double(Rational(R / (q.n - 1))));
    q.R = algebra::to_double(R);
    q.k2 = algebra::to_double(k2);
    q.p = algebra::to_double(p);
    q.c2 = optional_number(s, "c2").value_or(0.0);
    q.level = optional_number(s, "level");
    q.f_scale = optional_number(s, "f_scale").value_or(1.0);
    q.h0 = number_field(s, "h0");
    q.h1 = optional_number(s, "h1");
    return q;
  }
  if (t == "ii") {
    geometry::WarpedEinsteinFiberParams q;
    q.n = integer_field(s, "n");
    q.R = number_field(s, "R");
    q.a = number_field(s, "a");
    q.h0 = number_field(s, "h0");
    q.h1 = optional_number(s, "h1");
    q.fiber_k = optional_number(s, "fiber_k");
    return q;
  }
  if (t == "iii") {
    geometry::EinsteinParams q;
    q.n = integer_field(s, "n");
    q.R = number_field(s, "R");
    q.f0 = optional_number(s, "f0").value_or(0.0);
    q.f1 = optional_number(s, "f1").value_or(1.0);
    q.fiber_constant = optional_number(s, "fiber_constant");
    return q;
  }
  if (t == "iv") {
    geometry::EinsteinProductParams q;
    q.n = integer_field(s, "n");
    q.k = integer_field(s, "k");
    q.R = number_field(s, "R");
    q.f0 = optional_number(s, "f0").value_or(0.0);
    q.f1 = optional_number(s, "f1").value_or(1.0);
    q.factor1_eigenvalue = optional_number(s, "factor1_eigenvalue");
    q.factor2_eigenvalue = optional_number(s, "factor2_eigenvalue");
    return q;
  }
  geometry::MulticlassParams q;
  q.n = integer_field(s, "n");
  q.R = number_field(s, "R");
  q.a = number_field(s, "a");
  q.roots = roots_field(s);
  q.h0 = number_field(s, "h0");
  q.h1 = number_field(s, "h1");
  return q;
}

std::string profile_csv(const geometry::MetricModel& model) {
  const auto spectrum = geometry::ricci_spectrum(model);
  const auto zeta = geometry::shape_zeta(model);
  const auto& p = model.profile;
  std::ostringstream os;
  os << "s,h,h1,h2,h3,f,f1,f2";
  for (const auto& b : model.blocks) os << ",lambda_" << b.label;
  for (std::size_t b = 1; b < model.blocks.size(); ++b) os << ",zeta_" << model.blocks[b].label;
  os << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << format_number(p.s[i]) << ',' << format_number(p.h[i]) << ',' << format_number(p.h1[i]) << ','
       << format_number(p.h2[i]) << ',' << format_number(p.h3[i]) << ',' << format_number(model.f[i]) << ','
       << format_number(model.f1[i]) << ',' << format_number(model.f2[i]);
    for (std::size_t b = 0; b < model.blocks.size(); ++b) os << ',' << format_number(spectrum.values[b][i]);
    for (std::size_t b = 1; b < model.blocks.size(); ++b) os << ',' << format_number(zeta[b][i]);
    os << '\n';
  }
  return os.str();
}

std::string expansion_table(const algebra::RootFactorization& roots, Numerator numerator) {
  if (roots.empty()) throw ParameterError("expansion needs at least one root");
  const algebra::Polynomial H = algebra::expand_from_roots(roots);
  const algebra::Polynomial num =
      numerator == Numerator::one ? algebra::Polynomial::constant(Rational(1)) : algebra::antiderivative_zero_constant(H);
  const auto e = algebra::partial_fractions(num, roots);
  std::ostringstream os;
  os << "part,class,shift,power,coeff\n";
  os << "linear,,,1," << algebra::to_string(e.linear_coeff()) << '\n';
  os << "constant,,,0," << algebra::to_string(e.const_coeff()) << '\n';
  for (const auto& t : e.terms())
    os << "term," << t.root << ',' << algebra::to_string(roots[t.root].shift) << ',' << t.power << ','
       << algebra::to_string(t.coeff) << '\n';
  return os.str();
}

namespace {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> y;
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void panel(std::ostringstream& os, double top, double height, const std::vector<double>& s,
           const std::vector<Series>& series, bool log_axis, const std::string& title) {
  const double left = 80, width = 640;
  double lo = INFINITY, hi = -INFINITY;
  auto map_y = [&](double v) { return log_axis ? std::log10(std::max(v, 1e-18)) : v; };
  for (const auto& ser : series)
    for (double v : ser.y)
      if (std::isfinite(v)) {
        lo = std::min(lo, map_y(v));
        hi = std::max(hi, map_y(v));
      }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double s0 = s.front(), s1 = s.back() > s.front() ? s.back() : s.front() + 1;
  auto px = [&](double x) { return left + width * (x - s0) / (s1 - s0); };
  auto py = [&](double v) { return top + height * (1.0 - (map_y(v) - lo) / (hi - lo)); };

  os << "<text x=\"" << left << "\" y=\"" << top - 8 << "\" font-size=\"13\">" << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double frac = k / 4.0;
    const double yv = lo + (hi - lo) * frac;
    const double ypix = top + height * (1.0 - frac);
    const std::string label = log_axis ? "1e" + short_number(yv) : short_number(yv);
    os << "<text x=\"" << left - 6 << "\" y=\"" << ypix + 4 << "\" font-size=\"10\" text-anchor=\"end\">" << label
       << "</text>\n";
    const double xv = s0 + (s1 - s0) * frac;
    os << "<text x=\"" << px(xv) << "\" y=\"" << top + height + 14 << "\" font-size=\"10\" text-anchor=\"middle\">"
       << short_number(xv) << "</text>\n";
  }
  double legend_y = top + 14;
  for (const auto& ser : series) {
    os << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.size(); ++i)
      if (std::isfinite(ser.y[i])) os << short_number(px(s[i])) << ',' << short_number(py(ser.y[i])) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << left + width + 8 << "\" y=\"" << legend_y << "\" font-size=\"10\" fill=\"" << ser.color
       << "\">" << ser.label << "</text>\n";
    legend_y += 14;
  }
}

}  // namespace

std::string plot_svg(const geometry::MetricModel& model, const std::string& title) {
  const auto spectrum = geometry::ricci_spectrum(model);
  const auto& p = model.profile;
  std::vector<Series> profiles = {{"h", kColors[0], p.h}, {"f", kColors[1], model.f}};

  std::vector<Series> residuals;
  auto add_max = [&](const std::string& label, const std::vector<verify::ResidualSeries>& list) {
    std::vector<double> y(model.nodes(), 0.0);
    for (const auto& r : list)
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::max(y[i], r.values[i]);
    residuals.push_back({label, kColors[(residuals.size() + 2) % 8], std::move(y)});
  };
  add_max("static", verify::static_residuals(model, spectrum));
  add_max("codazzi", verify::codazzi_residuals(model, spectrum));
  add_max("radial curvature", verify::radial_curvature_residuals(model, spectrum));
  add_max("trace", {verify::trace_residual(model, spectrum)});

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"620\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(os, 40, 230, p.s, profiles, false, title + ": profiles");
  panel(os, 340, 230, p.s, residuals, true, "residuals (log scale)");
  os << "<text x=\"400\" y=\"612\" font-size=\"11\" text-anchor=\"middle\">s</text>\n";
  os << "</svg>\n";
  return os.str();
}

Artifacts execute(const Scenario& s) {
  Artifacts out;
  auto note_truncation = [&](const geometry::MetricModel& m) {
    if (m.profile.truncated)
      out.notes.push_back("integration truncated near a singular factor: reached [" +
                          format_number(m.profile.reached.lo) + ", " + format_number(m.profile.reached.hi) +
                          "] of requested [" + format_number(m.profile.requested.lo) + ", " +
                          format_number(m.profile.requested.hi) + "]");
  };
  auto add_report = [&](const verify::ResidualReport& r) {
    out.files["report.csv"] = r.to_csv();
    out.files["report.txt"] = r.to_key_value();
    for (const auto& v : r.verdicts)
      if (!v.pass)
        out.notes.push_back("fail: " + v.check + "[" + v.block + "] = " + format_number(v.value) + " > " +
                            format_number(v.threshold));
    out.exit_code = r.all_pass() ? 0 : 2;
    out.notes.push_back(std::string("verdict: ") + (r.all_pass() ? "all pass" : "fail"));
  };

  switch (s.command) {
    case Command::build: {
      const auto model = geometry::build_case(case_params(s), s.grid);
      note_truncation(model);
      out.files["profile.csv"] = profile_csv(model);
      if (s.plot) out.files["plot.svg"] = plot_svg(model, s.name);
      out.notes.push_back("built " + geometry::to_string(model.family) + " on " + std::to_string(model.nodes()) +
                          " nodes");
      break;
    }
    case Command::verify: {
      const auto model = geometry::build_case(case_params(s), s.grid);
      note_truncation(model);
      const auto report = verify::verify(model, s.thresholds);
      out.files["profile.csv"] = profile_csv(model);
      if (s.plot) out.files["plot.svg"] = plot_svg(model, s.name);
      add_report(report);
      break;
    }
    case Command::probe: {
      const auto q = std::get<geometry::MulticlassParams>(case_params(s));
      search::ProbeParams params{q.n, q.R, q.a, q.roots, {q.h0, q.h1}, s.grid};
      const auto probe = search::multiclass_probe(params, s.thresholds);
      note_truncation(probe.model);
      out.files["profile.csv"] = profile_csv(probe.model);
      if (s.plot) out.files["plot.svg"] = plot_svg(probe.model, s.name);
      std::ostringstream os;
      os << "class,shift,multiplicity,span_residual,einstein_fiber_mismatch,threshold,obstructed\n";
      for (const auto& c : probe.classes)
        os << c.label << ',' << format_number(c.shift) << ',' << c.multiplicity << ','
           << format_number(c.span_residual) << ',' << format_number(c.einstein_fiber_mismatch) << ','
           << format_number(probe.obstruction_threshold) << ','
           << (c.span_residual >= probe.obstruction_threshold ? "true" : "false") << '\n';
      out.files["obstruction.csv"] = os.str();
      add_report(probe.report);
      out.notes.push_back("obstruction residual " + format_number(probe.obstruction) +
                          (probe.obstructed ? " >= " : " < ") + format_number(probe.obstruction_threshold));
      break;
    }
    case Command::audit: {
      const Rational a = s.fields.count("a") ? rational_field(s, "a") : Rational(1);
      const auto rec = search::coefficient_audit(integer_field(s, "n"), rational_field(s, "R"), roots_field(s), a);
      out.files["audit.csv"] = rec.to_csv();
      out.exit_code = rec.any_violation() ? 2 : 0;
      out.notes.push_back(rec.any_violation() ? "audit: vanishing conditions violated"
                                              : "audit: vanishing conditions hold");
      break;
    }
    case Command::expand: {
      Numerator numerator = Numerator::one;
      if (const auto it = s.fields.find("numerator"); it != s.fields.end()) {
        if (it->second.value == "Q") numerator = Numerator::Q;
        else if (it->second.value != "one" && it->second.value != "1")
          fail(s.origin, it->second.line, "numerator must be one or Q");
      }
      out.files["expansion.csv"] = expansion_table(roots_field(s), numerator);
      break;
    }
  }
  return out;
}

namespace {

void write_artifacts(const Scenario& s, const Artifacts& a) {
  fs::create_directories(s.output_dir);
  for (const auto& [name, contents] : a.files) {
    std::ofstream f(s.output_dir / name, std::ios::binary);
    if (!f) throw ParameterError("cannot write " + (s.output_dir / name).string());
    f << contents;
  }
}

int run_loaded(const Scenario& s, std::ostream& out, std::ostream& err) {
  Artifacts a;
  try {
    a = execute(s);
  } catch (const Error& e) {
    err << s.origin << ": error: " << e.what() << '\n';
    return 1;
  }
  try {
    write_artifacts(s, a);
  } catch (const std::exception& e) {
    err << s.origin << ": error: " << e.what() << '\n';
    return 1;
  }
  out << s.name << " (" << to_string(s.command) << ")\n";
  for (const auto& line : a.notes) out << "  " << line << '\n';
  out << "  output: " << s.output_dir.string() << '\n';
  return a.exit_code;
}

}  // namespace

int run_file(const fs::path& path, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = load_scenario(path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return run_loaded(s, out, err);
}

int run_batch(const fs::path& dir, unsigned jobs, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(dir)) {
    err << "error: not a directory: " << dir.string() << '\n';
    return 1;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".scn") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    err << "error: no .scn files in " << dir.string() << '\n';
    return 1;
  }

  struct Slot {
    std::optional<Scenario> scenario;
    std::string out, err;
    int code = 0;
  };
  std::vector<Slot> slots(files.size());
  std::map<fs::path, std::size_t> owners;
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      slots[i].scenario = load_scenario(files[i]);
      const auto key = fs::weakly_canonical(slots[i].scenario->output_dir);
      if (const auto [it, fresh] = owners.emplace(key, i); !fresh) {
        slots[i].err = "error: " + files[i].string() + ": output directory already used by " +
                       files[it->second].string() + "\n";
        slots[i].code = 1;
        slots[i].scenario.reset();
      }
    } catch (const Error& e) {
      slots[i].err = std::string("error: ") + e.what() + "\n";
      slots[i].code = 1;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < slots.size(); i = next++) {
      if (!slots[i].scenario) continue;
      std::ostringstream o, e;
      slots[i].code = run_loaded(*slots[i].scenario, o, e);
      slots[i].out = o.str();
      slots[i].err = e.str();
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(slots.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool any_input_error = false, any_fail = false;
  for (const auto& slot : slots) {
    out << slot.out;
    err << slot.err;
    any_input_error |= slot.code == 1;
    any_fail |= slot.code == 2;
  }
  out << "batch: " << slots.size() << " scenarios\n";
  return any_input_error ? 1 : any_fail ? 2 : 0;
}

}  // namespace staticgeo::cli
