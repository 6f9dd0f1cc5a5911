#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#ifndef CRN_ADAPT_EXE
#define CRN_ADAPT_EXE ""
#define CRN_TEST_TMP "."
#endif

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" CRN_ADAPT_EXE "' " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string tmp(const std::string& name) { return std::string(CRN_TEST_TMP) + "/cli_" + name; }

std::string write(const std::string& name, const std::string& text) {
  const std::string path = tmp(name);
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string model_file(const std::string& id) {
  const auto r = run("models export " + id);
  REQUIRE(r.status == 0);
  return write(id + ".crn", r.out);
}

}  // namespace

TEST_CASE("exit codes") {
  if (std::string(CRN_ADAPT_EXE).empty()) return;
  const auto acyclic = write("acyclic.crn", "A <-> B @ kf=2, kr=1\nB <-> C + D @ kf=1, kr=3\n");
  const auto ok = run("net db-check " + acyclic);
  CHECK(ok.status == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j["holds"] == true);
  CHECK(j.contains("energy"));

  std::string sg = slurp(model_file("segel-goldbeter"));
  sg.replace(sg.find("kr=1"), 4, "kr=5");
  const auto broken = write("broken.crn", sg);
  const auto neg = run("net db-check " + broken);
  CHECK(neg.status == 1);
  const auto jn = nlohmann::json::parse(neg.out);
  CHECK(jn["holds"] == false);
  CHECK(jn.contains("affinity"));
  CHECK(jn.contains("violation_cycle"));

  CHECK(run("net validate " + write("bad.crn", "A + B <-> A @ kf=1, kr=1\n")).status == 2);
  CHECK(run("net validate " + tmp("does-not-exist.crn")).status == 2);
  CHECK(run("models export no-such-model").status == 2);
  CHECK(run("models export two-step --param K1=-1").status == 2);
  CHECK(run("no-such-command").status == 2);

  const auto two = model_file("two-step");
  CHECK(run("adapt test " + two + " --t-max 0.5").status == 3);
}

TEST_CASE("json documents carry run metadata") {
  if (std::string(CRN_ADAPT_EXE).empty()) return;
  const auto sg = model_file("segel-goldbeter");
  for (const std::string cmd : {"net validate ", "net conservation ", "net cycles ", "response coeffs "}) {
    const auto r = run(cmd + sg + " --seed 3");
    CAPTURE(cmd);
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["meta"]["seed"] == 3);
    CHECK(j["meta"]["generator"] == "mt19937_64");
    CHECK(j["meta"].contains("tool_version"));
    CHECK(j["meta"]["tolerances"].contains("rel_tol"));
  }
  const auto cons = nlohmann::json::parse(run("net conservation " + sg).out);
  CHECK(cons["dim"] == 2);
  const auto coeffs = nlohmann::json::parse(run("response coeffs " + sg).out);
  for (const char* key : {"L", "layers", "coefficients", "c_Lp", "verdict"}) CHECK(coeffs.contains(key));
}

TEST_CASE("determinism") {
  if (std::string(CRN_ADAPT_EXE).empty()) return;
  const auto sg = model_file("segel-goldbeter");
  const auto a = run("adapt audit " + sg + " --p X --seed 7");
  const auto b = run("adapt audit " + sg + " --p X --seed 7");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["conclusion"] == "no robust adaptation");

  const auto md = model_file("m-disconnection");
  const auto one = run("adapt test " + md + " --draws 6 --seed 11", "CRN_ADAPT_THREADS=1");
  const auto many = run("adapt test " + md + " --draws 6 --seed 11", "CRN_ADAPT_THREADS=4");
  REQUIRE(one.status == 0);
  CHECK(one.out == many.out);
  CHECK(run("adapt test " + md + " --draws 6 --seed 12").out != one.out);
}

TEST_CASE("csv trajectories") {
  if (std::string(CRN_ADAPT_EXE).empty()) return;
  const auto ex = model_file("example-3.2");
  const auto out = tmp("traj.csv");
  REQUIRE(run("sim signalling " + ex + " --f-inf 2.0 --r 1.0 -o " + out).status == 0);
  const auto rows = csv(slurp(out));
  REQUIRE(rows.size() > 10);
  CHECK(rows[0] == std::vector<std::string>{"t", "s1", "s2", "s3", "s4", "J_ext", "J_ext_cum"});
  double prev_t = -1.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    REQUIRE(rows[k].size() == 7);
    const double t = std::stod(rows[k][0]);
    CHECK(t > prev_t);
    prev_t = t;
    CHECK(std::abs(std::stod(rows[k][4]) - 1.0) <= 1e-6);
  }

  const auto run_out = run("sim run " + ex + " --t-max 5");
  REQUIRE(run_out.status == 0);
  CHECK(csv(run_out.out)[0][0] == "t");
}

TEST_CASE("perturbation commands emit parseable networks") {
  if (std::string(CRN_ADAPT_EXE).empty()) return;
  const auto ex = model_file("example-3.2");
  const auto pert = run("response perturb " + ex + " --delta 0.05");
  REQUIRE(pert.status == 0);
  const auto path = write("perturbed.crn", pert.out);
  CHECK(run("net db-check " + path).status == 0);
  const auto coeffs = nlohmann::json::parse(run("response coeffs " + path).out);
  CHECK(coeffs["verdict"] == "responds");

  const auto pb = model_file("pairing-balance");
  const auto brk = run("adapt break " + pb + " --delta 0.3 --seed 4");
  REQUIRE(brk.status == 0);
  CHECK(run("net db-check " + write("broken-pb.crn", brk.out)).status == 0);
  CHECK(run("adapt break " + model_file("m-disconnection") + " --max-samples 50").status == 3);
}

TEST_CASE("models subcommands") {
  if (std::string(CRN_ADAPT_EXE).empty()) return;
  const auto list = nlohmann::json::parse(run("models list").out);
  CHECK(list["models"].size() == 10);
  const auto qss = run("models run bl-mass-action --qss");
  REQUIRE(qss.status == 0);
  CHECK(nlohmann::json::parse(qss.out)["p_rel_error"].get<double>() <= 0.05);
  const auto claims = run("models run gene-expression-completion --verify-claims --trials 20");
  REQUIRE(claims.status == 0);
  CHECK(nlohmann::json::parse(claims.out)["cycle_dim"] == 0);
  const auto bl = run("models run bl-linear --f 1 --t-max 50");
  REQUIRE(bl.status == 0);
  CHECK(csv(bl.out)[0] == std::vector<std::string>{"t", "X", "Y", "f"});
}
