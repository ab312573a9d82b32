#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "staticgeo/cli.hpp"
#include "staticgeo/errors.hpp"

namespace fs = std::filesystem;
using namespace staticgeo::cli;
using staticgeo::ParseError;
using staticgeo::algebra::Rational;
using staticgeo::algebra::RootFactor;
using staticgeo::algebra::RootFactorization;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("staticgeo_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_scenario(in, "t.scn");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

fs::path copy_scenario(const std::string& name, const fs::path& dir) {
  const fs::path target = dir / name;
  fs::copy_file(fs::path(STATICGEO_SCENARIO_DIR) / name, target);
  return target;
}

int run(const fs::path& p, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_file(p, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

const std::string kSphere =
    "[scenario]\ncommand = verify\n[case]\ntype = iii\nn = 3\nR = 6\nf0 = 0\nf1 = 1\n"
    "[grid]\ns_min = 1/10\ns_max = 7/5\nstep = 1/1000\n";

}  // namespace

TEST_CASE("parse errors carry the file and line") {
  CHECK(parse_error("[scenario]\ncommand = verify\nbogus = 1\n") == "t.scn:3: unknown key 'bogus' in [scenario]");
  CHECK(parse_error("[scenario]\ncommand = verify\ncommand = build\n") ==
        "t.scn:3: duplicate key 'command' in [scenario]");
  CHECK(parse_error("[scenario]\ncommand = launch\n") ==
        "t.scn:2: unknown command 'launch' (expected build, verify, probe, audit or expand)");
  CHECK(parse_error("n = 3\n") == "t.scn:1: key 'n' outside any section");
  CHECK(parse_error("[nowhere]\n") == "t.scn:1: unknown section [nowhere]");
  CHECK(parse_error("[scenario]\ncommand verify\n") == "t.scn:2: expected key = value");
  CHECK(parse_error(kSphere + "[thresholds]\nstatic = -1\n") == "t.scn:14: threshold 'static' must be positive");
  CHECK(parse_error("[scenario]\ncommand = verify\n[case]\ntype = iii\nn = 3\nk = 2\n[grid]\ns_max = 1\nstep = 0.1\n") ==
        "t.scn:6: field 'k' does not apply to iii");
  CHECK(parse_error("[scenario]\ncommand = probe\n[case]\ntype = ii\n") ==
        "t.scn:4: probe requires case type multiclass");
  CHECK(parse_error("[case]\ntype = ii\n") == "t.scn: missing [scenario] command");
  CHECK(parse_error("# only a comment\n" + kSphere) == "");
}

TEST_CASE("numbers are parsed exactly and defaults apply") {
  std::istringstream in(kSphere + "[thresholds]\ncodazzi = 1e-9\nmax_distinct = 2\n");
  const auto s = parse_scenario(in, "sphere.scn");
  CHECK(s.name == "sphere");
  CHECK(s.grid.s_min == 0.1);
  CHECK(s.grid.step == 1e-3);
  CHECK(s.thresholds.codazzi == 1e-9);
  CHECK(s.thresholds.max_distinct == 2);
  CHECK(s.thresholds.static_residual == 1e-6);
  CHECK(rational_field(s, "R") == 6);
  CHECK_THROWS_AS(rational_field(s, "a"), ParseError);
}

TEST_CASE("the exact constraint check of the product family runs before integration") {
  std::istringstream in(
      "[scenario]\ncommand = verify\n[case]\ntype = i\nn = 4\nk = 3\nR = 3\nc2 = 0\nk2 = 1\np = 1\n"
      "f_scale = 1\nh0 = 1\nh1 = 1/5\n[grid]\ns_max = 1\nstep = 1/1000\n");
  auto s = parse_scenario(in, "t.scn");
  CHECK_NOTHROW(case_params(s));
  s.fields["R"].value = "3.0000001";
  CHECK_THROWS_AS(case_params(s), staticgeo::ConstraintError);
}

TEST_CASE("round sphere scenario passes and writes its artifacts") {
  TempDir dir;
  const auto path = copy_scenario("round_sphere.scn", dir.path);
  CHECK(run(path) == 0);
  const auto out = dir.path / "round_sphere.out";
  for (const char* name : {"profile.csv", "report.csv", "report.txt", "plot.svg"}) CHECK(fs::exists(out / name));
  const auto report = read_file(out / "report.txt");
  CHECK(report.find("all_pass = true") != std::string::npos);
  const auto profile = read_file(out / "profile.csv");
  CHECK(profile.rfind("s,h,h1,h2,h3,f,f1,f2,", 0) == 0);
  CHECK(std::count(profile.begin(), profile.end(), '\n') == 1402);
  CHECK(read_file(out / "plot.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("a = 0 is an input error and nothing is written") {
  TempDir dir;
  const auto path = copy_scenario("degenerate_a0.scn", dir.path);
  std::string err;
  CHECK(run(path, &err) == 1);
  CHECK(err.find("constant") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "degenerate_a0.out"));
}

TEST_CASE("a two-class probe exits with 2 and reports the obstruction") {
  TempDir dir;
  const auto path = copy_scenario("two_class_probe.scn", dir.path);
  CHECK(run(path) == 2);
  const auto obstruction = read_file(dir.path / "two_class_probe.out" / "obstruction.csv");
  CHECK(std::count(obstruction.begin(), obstruction.end(), '\n') == 3);
  CHECK(fs::exists(dir.path / "two_class_probe.out" / "report.csv"));
}

TEST_CASE("audit scenario flags the two-class configuration") {
  TempDir dir;
  CHECK(run(copy_scenario("audit_two_class.scn", dir.path)) == 2);
  const auto csv = read_file(dir.path / "audit_two_class.out" / "audit.csv");
  CHECK(csv.find(",true") != std::string::npos);
}

TEST_CASE("expansion tables") {
  const auto one = expansion_table(RootFactorization(std::vector<RootFactor>{{Rational(0), 1}, {Rational(1), 1}}),
                                   Numerator::one);
  CHECK(one == "part,class,shift,power,coeff\nlinear,,,1,0\nconstant,,,0,0\nterm,0,0,1,1\nterm,1,1,1,-1\n");

  // Q/(h + c) with Q = h^2/2 + c h: h/2 + c/2 - (c^2/2)/(h + c).
  for (const Rational& c : {Rational(3), Rational(-2, 5)}) {
    const auto q = expansion_table(RootFactorization(std::vector<RootFactor>{{c, 1}}), Numerator::Q);
    std::ostringstream expected;
    expected << "part,class,shift,power,coeff\nlinear,,,1,1/2\nconstant,,," << 0 << ',' << Rational(c / 2) << '\n'
             << "term,0," << c << ",1," << Rational(-c * c / 2) << '\n';
    CHECK(q == expected.str());
  }

  TempDir dir;
  CHECK(run(copy_scenario("expand_q.scn", dir.path)) == 0);
  const auto csv = read_file(dir.path / "expand_q.out" / "expansion.csv");
  CHECK(csv.find("linear,,,1,1/4\n") != std::string::npos);
  CHECK(csv.find("constant,,,0,1/3\n") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs") {
  TempDir a, b;
  CHECK(run(copy_scenario("warped_fiber.scn", a.path)) == 0);
  CHECK(run(copy_scenario("warped_fiber.scn", b.path)) == 0);
  for (const char* name : {"profile.csv", "report.csv", "report.txt"})
    CHECK(read_file(a.path / "warped_fiber.out" / name) == read_file(b.path / "warped_fiber.out" / name));
}

TEST_CASE("batch runs all scenarios in parallel with exit-code precedence") {
  TempDir dir;
  for (const char* name : {"round_sphere.scn", "warped_fiber.scn", "two_class_probe.scn", "expand_q.scn"})
    copy_scenario(name, dir.path);
  std::ostringstream out, err;
  CHECK(run_batch(dir.path, 4, out, err) == 2);
  CHECK(out.str().find("batch: 4 scenarios") != std::string::npos);
  CHECK(fs::exists(dir.path / "round_sphere.out" / "report.csv"));

  const std::string serial = read_file(dir.path / "warped_fiber.out" / "profile.csv");
  copy_scenario("degenerate_a0.scn", dir.path);
  std::ostringstream out2, err2;
  CHECK(run_batch(dir.path, 2, out2, err2) == 1);
  CHECK(read_file(dir.path / "warped_fiber.out" / "profile.csv") == serial);

  write_file(dir.path / "clash.scn", kSphere + "[output]\ndir = round_sphere.out\n");
  std::ostringstream out3, err3;
  CHECK(run_batch(dir.path, 3, out3, err3) == 1);
  CHECK(err3.str().find("already used") != std::string::npos);

  TempDir empty;
  std::ostringstream out4, err4;
  CHECK(run_batch(empty.path, 1, out4, err4) == 1);
}
