#pragma once

// Scenario files, the run/expand/batch drivers and the CSV and SVG writers
// behind the staticgeo command-line tool.
//
// Scenario format: `[section]` headers and `key = value` lines; `#` starts a
// comment. Sections: scenario (name, command), case (type plus parameters),
// grid (s_min, s_max, step), thresholds, output (dir, plot). Numbers may be
// integers, decimals or p/q literals and are read exactly.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "staticgeo/geometry.hpp"
#include "staticgeo/rational_algebra.hpp"
#include "staticgeo/verifier.hpp"

namespace staticgeo::cli {

enum class Command { build, verify, probe, audit, expand };

std::string to_string(Command command);

struct Field {
  std::string value;
  int line = 0;
};

struct Scenario {
  std::string name;
  Command command = Command::verify;
  std::string case_type;              // i, ii, iii, iv, multiclass (build/verify/probe)
  std::map<std::string, Field> fields;  // [case] keys except type
  geometry::Grid grid;
  verify::Thresholds thresholds;
  std::filesystem::path output_dir;
  bool plot = false;
  std::string origin;  // file name for diagnostics
};

/// Throws ParseError with "origin:line: message" diagnostics.
Scenario parse_scenario(std::istream& in, const std::string& origin, const std::filesystem::path& base_dir = ".");
Scenario load_scenario(const std::filesystem::path& path);

/// Exact number, or ParseError naming the field and line.
algebra::Rational rational_field(const Scenario& s, const std::string& key);
double number_field(const Scenario& s, const std::string& key);
std::optional<double> optional_number(const Scenario& s, const std::string& key);
int integer_field(const Scenario& s, const std::string& key);

/// Shifts and multiplicities from the comma-separated `shifts` and optional `multiplicities` keys.
algebra::RootFactorization roots_field(const Scenario& s);

/// Case parameters for build/verify/probe. Rational inputs to the product
/// constraint of case (i) are checked exactly before any integration.
geometry::CaseParams case_params(const Scenario& s);

/// Files produced by a scenario, kept in memory until everything succeeded.
struct Artifacts {
  std::map<std::string, std::string> files;  // file name -> contents
  int exit_code = 0;
  std::vector<std::string> notes;  // human-readable summary lines
};

/// Runs a parsed scenario without touching the file system.
Artifacts execute(const Scenario& s);

/// Parses, executes and writes artifacts. Returns 0 (all pass), 2 (some
/// verdict failed) or 1 (input error; nothing is written).
int run_file(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

/// Runs every *.scn file in dir with up to `jobs` workers. The exit code is 1
/// if any scenario had an input error, else 2 if any failed, else 0.
int run_batch(const std::filesystem::path& dir, unsigned jobs, std::ostream& out, std::ostream& err);

enum class Numerator { one, Q };

/// One row per (class, power) plus the polynomial part, exact rationals.
std::string expansion_table(const algebra::RootFactorization& roots, Numerator numerator);

std::string profile_csv(const geometry::MetricModel& model);
/// Profiles and per-node residuals against s; residual panel on a log axis.
std::string plot_svg(const geometry::MetricModel& model, const std::string& title);

/// "%.17g".
std::string format_number(double x);

}  // namespace staticgeo::cli
