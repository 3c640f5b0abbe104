#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string binary_path() {
  const char* env = std::getenv("TPNSI_BIN");
  REQUIRE_MESSAGE(env != nullptr,
                  "TPNSI_BIN must point at the command-line binary");
  return env;
}

RunResult run(const std::string& args) {
  const std::string cmd = binary_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buffer;
  std::size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/tpnsi_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("heat-trace: header, row count, and determinism") {
  const std::string args =
      "heat-trace --degree 0 --zeta 0 --t-min 1 --t-max 100 --points 5";
  const auto a = run(args);
  CHECK(a.exit_code == 0);
  const auto lines = lines_of(a.output);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "t,c,theta,abs_err");
  const auto b = run(args);
  CHECK(b.output == a.output);  // byte-identical rerun

  const auto single = run("heat-trace --points 1 --t-min 10 --t-max 10");
  CHECK(single.exit_code == 0);
  CHECK(lines_of(single.output).size() == 2);
}

TEST_CASE("heat-trace rejects out-of-range degree-1 paths") {
  CHECK(run("heat-trace --degree 1 --zeta 1.5").exit_code == 2);
  CHECK(run("heat-trace --degree 0 --zeta -0.7").exit_code == 2);
}

TEST_CASE("alpha: deviations stay within the advertised tolerance") {
  const auto r = run("alpha --degree 0 --zetas 0");
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "zeta,alpha_hat,alpha_formula,abs_dev");
  double zeta = 0.0, hat = 0.0, formula = 0.0, dev = 0.0;
  std::string row = lines[1];
  std::replace(row.begin(), row.end(), ',', ' ');
  std::istringstream is(row);
  REQUIRE((is >> zeta >> hat >> formula >> dev));
  CHECK(formula == 4.0);
  CHECK(dev <= 0.05);
}

TEST_CASE("alpha: an empty request reports the empty-result exit code") {
  CHECK(run("alpha --degree 1 --zetas 2").exit_code == 3);
}

TEST_CASE("lattice grid output matches the committed golden file") {
  const auto r = run(
      "lattice --n 4 --mu-min 0.5 --mu-max 2 --mu-points 5 "
      "--nu-min 0.5 --nu-max 2 --nu-points 5 --lambda0 1.17");
  CHECK(r.exit_code == 0);
  std::ifstream golden(std::string(TPNSI_TEST_DATA_DIR) +
                       "/lattice_n4_golden.csv");
  REQUIRE(golden.good());
  std::stringstream want;
  want << golden.rdbuf();
  CHECK(r.output == want.str());
}

TEST_CASE("lattice: the resource cap surfaces as its own exit code") {
  CHECK(run("lattice --n 70").exit_code == 4);
}

TEST_CASE("lattice path mode emits per-n rows and a summary") {
  const auto r = run("lattice --path-zeta 0 --n-list 8,12");
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() >= 5);
  CHECK(lines[0] ==
        "n,slope,deviation,window_lo,window_hi,points_used");
  CHECK(lines[3] ==
        "zeta,alpha_reference,extrapolated_alpha,deviation_shrinks,"
        "monotone_fraction");
}

TEST_CASE("product reads profile files and prints exponents per degree") {
  const auto fibre = write_temp(
      "line.txt", "top_degree = 1\ndegree.0.alpha = 1\n");
  const auto base = write_temp(
      "plane.txt", "top_degree = 2\ndegree.0.alpha = 2\ndegree.1.alpha = 2\n");
  const auto r =
      run("product --fibre " + fibre + " --base " + base);
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "k,alpha");
  CHECK(lines[1] == "0,3");

  const auto bad = write_temp("bad.txt", "top_degree = -1\n");
  CHECK(run("product --fibre " + bad + " --base " + base).exit_code == 2);
  CHECK(run("product --fibre /nonexistent --base " + base).exit_code == 2);
}

TEST_CASE("verify suites all pass and stream CSV rows") {
  for (const std::string suite : {"identities", "bounds", "product"}) {
    const auto r = run("verify --suite " + suite);
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(r.output);
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "suite,check,status,detail");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      CHECK(lines[i].find(",PASS,") != std::string::npos);
    }
  }
}

TEST_CASE("config files feed defaults that explicit flags override") {
  const auto cfg = write_temp("ht.cfg",
                              "zeta = 0.5\npoints = 3\nt-min = 100\n"
                              "t-max = 100\n");
  const auto with_cfg = run("heat-trace --config " + cfg + " --points 1");
  CHECK(with_cfg.exit_code == 0);
  const auto direct = run(
      "heat-trace --zeta 0.5 --t-min 100 --t-max 100 --points 1");
  CHECK(with_cfg.output == direct.output);

  CHECK(run("heat-trace --config /nonexistent.cfg").exit_code != 0);
}

TEST_CASE("outputs can be redirected to a file") {
  const std::string out = "/tmp/tpnsi_test_out.csv";
  std::remove(out.c_str());
  const auto r = run("heat-trace --points 2 --t-min 1 --t-max 10 --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(r.output.empty());
  std::ifstream f(out);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header == "t,c,theta,abs_err");
}
