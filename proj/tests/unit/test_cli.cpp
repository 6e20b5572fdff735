#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "momentgmp/extract.hpp"
#include "momentgmp/io.hpp"
#include "momentgmp/poly.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using testutil::make_poly;

namespace {

const std::string kCli = MOMENTGMP_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const std::string out_file =
      (fs::temp_directory_path() / "momentgmp_cli_stdout.txt").string();
  const std::string cmd = kCli + " " + args + " > " + out_file + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

fs::path sandbox() {
  const fs::path dir = fs::temp_directory_path() / "momentgmp_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("decompose a trivial tensor end to end") {
  const fs::path dir = sandbox();
  // x0^4 as a homogeneous quartic in two variables.
  const auto f = make_poly(2, {{{4, 0}, 1.0}});
  momentgmp::io::write_polynomial(f, (dir / "trivial.json").string());

  const std::string prefix = (dir / "trivial_run").string();
  const auto res = run("decompose " + (dir / "trivial.json").string() +
                       " --mode positive --out " + prefix);
  REQUIRE(res.exit_code == 0);

  const auto atoms =
      momentgmp::io::read_atom_set(prefix + ".atoms.json");
  REQUIRE(atoms.size() == 1);
  CHECK(atoms.atoms[0].weight == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(atoms.atoms[0].point.lpNorm<Eigen::Infinity>() <= 1e-5);
  CHECK(fs::exists(prefix + ".diagnostics.json"));
  CHECK(fs::exists(prefix + ".manifest.json"));

  // Identical invocations produce identical bytes.
  const std::string first = slurp(prefix + ".atoms.json");
  const auto res2 = run("decompose " + (dir / "trivial.json").string() +
                        " --mode positive --out " + prefix);
  REQUIRE(res2.exit_code == 0);
  CHECK(slurp(prefix + ".atoms.json") == first);
}

TEST_CASE("decompose rejects malformed input") {
  const fs::path dir = sandbox();
  std::ofstream bad(dir / "bad.json");
  bad << "{ not json";
  bad.close();
  const auto res = run("decompose " + (dir / "bad.json").string());
  CHECK(res.exit_code == 1);
}

TEST_CASE("rates table for trivial constants") {
  const fs::path dir = sandbox();
  std::ofstream in(dir / "rates.json");
  in << R"({"t_dot_w": 1.0, "v_star_l1": 0.0,
            "slots": [{"preset": "generic", "gamma": 1.0, "theta": 2.0,
                       "f_max": 1.0, "h_star_max": 1.0, "hw_min": 1.0}]})";
  in.close();
  const auto res =
      run("rates " + (dir / "rates.json").string() + " --max-order 20");
  REQUIRE(res.exit_code == 0);
  CHECK(res.stdout_text.find("ell,bound") != std::string::npos);
  CHECK(res.stdout_text.find("10,0.02\n") != std::string::npos);
  CHECK(res.stdout_text.find("20,0.005\n") != std::string::npos);
}

TEST_CASE("rates with the ball preset starts at the threshold") {
  const fs::path dir = sandbox();
  std::ofstream in(dir / "rates_ball.json");
  in << R"({"t_dot_w": 1.0, "v_star_l1": 0.0, "active_degrees": [4],
            "slots": [{"preset": "ball", "n": 2, "deg": 4,
                       "f_max": 1.0, "h_star_max": 1.0, "hw_min": 1.0}]})";
  in.close();
  const auto res =
      run("rates " + (dir / "rates_ball.json").string() + " --max-order 40");
  REQUIRE(res.exit_code == 0);
  // 2 n deg^{3/2} = 32 for n = 2, deg = 4.
  CHECK(res.stdout_text.find("\n32,") != std::string::npos);
  CHECK(res.stdout_text.find("\n30,") == std::string::npos);
}

TEST_CASE("rates with preset generic requires theta") {
  const fs::path dir = sandbox();
  std::ofstream in(dir / "rates_gen.json");
  in << R"({"slots": [{"f_max": 1.0, "h_star_max": 1.0, "hw_min": 1.0}]})";
  in.close();
  const auto res = run("rates " + (dir / "rates_gen.json").string() +
                       " --preset generic --max-order 10");
  CHECK(res.exit_code == 1);
}

namespace {

std::string write_pop_instance(const fs::path& dir) {
  momentgmp::gmp::GMPInstance inst;
  inst.slots.push_back(momentgmp::gmp::unit_ball_slot(1));
  inst.objective.push_back(make_poly(1, {{{1}, 1.0}}));
  momentgmp::gmp::ConstraintRow row;
  row.h.push_back(momentgmp::poly::Polynomial::constant(1, 1.0));
  row.t = 1.0;
  row.kind = momentgmp::gmp::RowKind::Equality;
  inst.rows.push_back(row);
  inst.witness[0] = 1.0;
  const std::string path = (dir / "pop.json").string();
  momentgmp::io::write_gmp_instance(inst, path);
  return path;
}

}  // namespace

TEST_CASE("sweep on the line POP reaches the optimum at every order") {
  const fs::path dir = sandbox();
  const std::string path = write_pop_instance(dir);
  const auto res = run("sweep " + path + " --orders 2,4,6,8 --grid 2001");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.stdout_text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "ell,p_ell,d_ell,gap,time_ms");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');  // ell
    std::getline(cells, cell, ',');  // p_ell
    CHECK(std::abs(std::stod(cell) + 1.0) <= 1e-6);
    std::getline(cells, cell, ',');  // d_ell
    std::getline(cells, cell, ',');  // gap vs reference
    CHECK(std::stod(cell) <= 1e-6);
    CHECK(std::stod(cell) >= -1e-6);
  }
  CHECK(rows == 4);
}

TEST_CASE("hausdorff with one sample is deterministic and validates k") {
  const fs::path dir = sandbox();
  const std::string path = write_pop_instance(dir);
  const auto res = run("hausdorff " + path +
                       " --k 2 --orders 4 --samples 1 --grid 401 --seed 7");
  REQUIRE(res.exit_code == 0);
  const auto res2 = run("hausdorff " + path +
                        " --k 2 --orders 4 --samples 1 --grid 401 --seed 7");
  CHECK(res.stdout_text == res2.stdout_text);

  const auto bad = run("hausdorff " + path + " --k 4 --orders 2 --samples 1");
  CHECK(bad.exit_code == 1);
}
