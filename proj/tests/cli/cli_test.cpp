#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ffdigits/census.hpp"
#include "json.hpp"

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(FFDIGITS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
  const int rc = pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("field command goldens") {
  const RunResult res = run_cli("field --p 3 --r 2");
  CHECK(res.status == 0);
  const std::vector<std::string> lines = lines_of(res.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0].rfind("# config: {\"command\":\"field\"", 0) == 0);
  CHECK(lines[1] == "p: 3");
  CHECK(lines[2] == "r: 2");
  CHECK(lines[3] == "modulus: [1,0,1]");
  CHECK(lines[4] == "basis: [[1,0],[0,1]]");
  CHECK(lines[5] == "dual: [[2,0],[0,1]]");

  CHECK(contains(run_cli("field --p 5 --r 1").out, "modulus: [0,1]"));

  const RunResult over = run_cli("field --p 3 --r 2 --modulus '[2,1,1]'");
  CHECK(over.status == 0);
  CHECK(contains(over.out, "modulus: [2,1,1]"));
}

TEST_CASE("field command usage errors") {
  CHECK(run_cli("field --p 4 --r 2").status == 2);  // p not prime
  CHECK(run_cli("field --p 3").status == 2);        // missing --r
  CHECK(run_cli("field --p 3 --r 2 --basis fancy").status == 2);
  CHECK(run_cli("field --p 3 --r 2 --modulus '[2,0,1]'").status == 2);
  CHECK(run_cli("frobnicate").status == 2);
}

TEST_CASE("count command goldens") {
  const RunResult res = run_cli("count --p 3 --r 2 --f X^2 --kind R");
  CHECK(res.status == 0);
  const std::vector<std::string> lines = lines_of(res.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[1] ==
        "p,r,d,kind,basis_policy,f_serialized,c,count,main_term,"
        "abs_deviation,h,normalized");
  const std::string norm0 =
      ffdigits::format_double(6.0 / std::pow(3.0, 1.5));
  CHECK(lines[2] == "3,2,2,R,polynomial,X^2,0,9,3,6,0.25," + norm0);
  CHECK(lines[3] == "3,2,2,R,polynomial,X^2,1,0,3,3,0.75,1");
  CHECK(lines[4] == "3,2,2,R,polynomial,X^2,2,0,3,3,0.75,1");

  const RunResult one = run_cli("count --p 3 --r 2 --f X^2 --kind R --c 0");
  CHECK(one.status == 0);
  CHECK(lines_of(one.out).size() == 3);  // config, header, one row

  const RunResult deg4 = run_cli("count --p 3 --r 4 --f X --kind R");
  CHECK(deg4.status == 0);
  CHECK(contains(deg4.out,
                 "3,4,1,R,polynomial,X,0,33,27,6,0.25,0.2222222222"));
  CHECK(contains(deg4.out, ",1,24,27,3,0.75,"));
  CHECK(contains(deg4.out, ",2,24,27,3,0.75,"));
}

TEST_CASE("count command thue_morse trailer") {
  const RunResult res = run_cli("count --p 5 --r 3 --f X^2 --kind T");
  CHECK(res.status == 0);
  CHECK(contains(res.out, "# ds13: max_abs_deviation "));
  CHECK(contains(res.out, ", pass"));
  // rows leave the R-only columns empty
  CHECK(contains(res.out, "5,3,2,T,polynomial,X^2,0,"));

  const RunResult na = run_cli("count --p 3 --r 3 --f X^3 --kind T");
  CHECK(na.status == 0);
  CHECK(contains(na.out, "# ds13: inapplicable (p divides deg f)"));
}

TEST_CASE("count command exit codes") {
  CHECK(run_cli("count --p 3 --r 4 --f X --kind R --budget 10").status == 3);
  CHECK(run_cli("count --p 3 --r 2 --f '2**X' --kind R").status == 2);
  CHECK(run_cli("count --p 3 --r 2 --f X --kind Z").status == 2);
  CHECK(run_cli("count --p 3 --r 2 --f X --kind R --c 3").status == 2);
  CHECK(run_cli("count --p 3 --r 1 --f X --kind R").status == 2);
}

TEST_CASE("count output is deterministic and job-independent") {
  const std::string base =
      "count --p 7 --r 3 --f 'X^3+2*X' --kind R --basis seeded-random "
      "--seed 11";
  const RunResult a = run_cli(base + " --jobs 1");
  const RunResult b = run_cli(base + " --jobs 2");
  const RunResult c = run_cli(base + " --jobs 1");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);

  // --output writes exactly the stdout bytes
  const RunResult f =
      run_cli(base + " --jobs 3 --output cli_test_count.csv");
  CHECK(f.status == 0);
  CHECK(f.out.empty());
  CHECK(slurp("cli_test_count.csv") == a.out);
  std::remove("cli_test_count.csv");
}

TEST_CASE("count json format") {
  const RunResult res =
      run_cli("count --p 3 --r 2 --f X^2 --kind R --format json");
  CHECK(res.status == 0);
  const nlohmann::json j = nlohmann::json::parse(res.out);
  CHECK(j["config"]["command"] == "count");
  CHECK(j["config"]["modulus"] == "[1,0,1]");
  CHECK(!j["config"].contains("jobs"));
  REQUIRE(j["rows"].size() == 3);
  CHECK(j["rows"][0]["count"] == 9);
  CHECK(j["rows"][1]["count"] == 0);
}

TEST_CASE("lift command report") {
  const RunResult res = run_cli("lift --p 5 --r 2 --f X^2");
  CHECK(res.status == 0);
  CHECK(contains(res.out, "deg F: 4 (2d = 4)"));
  CHECK(contains(res.out, "value identity: 25 points, 0 mismatches"));
  CHECK(contains(res.out, "special diagonal (a[j][j] = 0): n/a"));
  CHECK(contains(res.out,
                 "degree window: d = 2 < p = 5, quadratic-count analysis "
                 "applies"));

  const RunResult special =
      run_cli("lift --p 7 --r 4 --basis special-dual --f X^2");
  CHECK(special.status == 0);
  CHECK(contains(special.out, "special diagonal (a[j][j] = 0): yes"));

  const RunResult wide = run_cli("lift --p 3 --r 2 --f X^5");
  CHECK(wide.status == 0);
  CHECK(contains(wide.out,
                 "degree window: d = 5 >= p = 3, outside the d < p analysis "
                 "window"));
  CHECK(contains(wide.out, "value identity: 9 points, 0 mismatches"));
}

TEST_CASE("census-singular command") {
  const RunResult res = run_cli(
      "census-singular --p 5 --r 3 --f X^2 --system tm --c 1 "
      "--basis seeded-random --seed 4");
  CHECK(res.status == 0);
  CHECK(contains(res.out, "system: tm"));
  CHECK(contains(res.out, "m = 1: count 0"));
  CHECK(contains(res.out, "m = 2: count 0"));

  const RunResult origin = run_cli(
      "census-singular --p 5 --r 3 --f X^2 --system tm --c 0 "
      "--basis seeded-random --seed 4");
  CHECK(contains(origin.out, "m = 1: count 1"));

  const RunResult skipped = run_cli(
      "census-singular --p 5 --r 3 --f X^2 --system tm --c 1 --budget 200");
  CHECK(skipped.status == 0);
  CHECK(contains(skipped.out, "m = 1: count 0"));
  CHECK(contains(skipped.out, "m = 2: skipped (cost "));

  CHECK(run_cli("census-singular --p 5 --r 3 --f X^2 --system bogus")
            .status == 2);
  CHECK(run_cli("census-singular --p 5 --r 3 --f X^2 --budget 2").status ==
        3);
}

TEST_CASE("sweep command") {
  const RunResult res = run_cli(
      "sweep --p-list 3,5,7,11,13 --r 4 --d 2 --kind R --basis polynomial");
  CHECK(res.status == 0);
  const std::vector<std::string> lines = lines_of(res.out);
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0].rfind("# config: {\"command\":\"sweep\"", 0) == 0);
  CHECK(contains(lines[0], "\"p_list\":[3,5,7,11,13]"));
  // 5 primes, one row per class: 3+5+7+11+13 rows plus header and trailer
  CHECK(lines.size() == 2 + 39 + 1);
  CHECK(lines.back().rfind("# trend: rel_dev ", 0) == 0);
  CHECK(contains(lines.back(), "decreasing: yes"));

  const RunResult lone = run_cli("sweep --p-list 5 --r 3 --d 1");
  CHECK(lone.status == 0);
  CHECK(contains(lone.out, "# trend: not evaluated"));

  CHECK(run_cli("sweep --p-list 4,5 --r 3 --d 1").status == 2);
  CHECK(run_cli("sweep --p-list 3,5 --r 3 --d 2 --f-policy user --f X")
            .status == 2);
}
