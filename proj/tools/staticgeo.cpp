#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "staticgeo/cli.hpp"
#include "staticgeo/errors.hpp"

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(item);
      item.clear();
    } else if (ch != ' ') {
      item += ch;
    }
  }
  out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"staticgeo: vacuum static families, residual verification and shifted-class evidence"};
  app.require_subcommand(1);

  std::string scenario;
  auto* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("scenario", scenario, "scenario file")->required();

  std::string roots, mults, numerator = "one";
  auto* expand = app.add_subcommand("expand", "partial fractions of 1/H or Q/H with exact coefficients");
  expand->add_option("--roots", roots, "comma-separated shifts c (factors h + c)")->required();
  expand->add_option("--mult", mults, "comma-separated multiplicities (default all 1)");
  expand->add_option("--numerator", numerator, "one or Q")->check(CLI::IsMember({"one", "1", "Q"}));

  std::string dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* batch = app.add_subcommand("batch", "run every .scn file in a directory");
  batch->add_option("dir", dir, "scenario directory")->required();
  batch->add_option("--jobs,-j", jobs, "concurrent scenarios")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run) return staticgeo::cli::run_file(scenario, std::cout, std::cerr);
  if (*batch) return staticgeo::cli::run_batch(dir, jobs, std::cout, std::cerr);

  try {
    const auto shift_list = split(roots);
    const auto mult_list = mults.empty() ? std::vector<std::string>(shift_list.size(), "1") : split(mults);
    if (mult_list.size() != shift_list.size()) throw staticgeo::ParseError("--roots and --mult differ in length");
    std::vector<staticgeo::algebra::RootFactor> factors;
    for (std::size_t i = 0; i < shift_list.size(); ++i) {
      const auto m = staticgeo::algebra::parse_rational(mult_list[i]);
      if (m.get_den() != 1 || m < 1 || m > 64) throw staticgeo::ParseError("multiplicities must be integers in [1, 64]");
      factors.push_back({staticgeo::algebra::parse_rational(shift_list[i]), static_cast<int>(m.get_num().get_si())});
    }
    const staticgeo::algebra::RootFactorization rf(std::move(factors));
    std::cout << staticgeo::cli::expansion_table(
        rf, numerator == "Q" ? staticgeo::cli::Numerator::Q : staticgeo::cli::Numerator::one);
  } catch (const staticgeo::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
