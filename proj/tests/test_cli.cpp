#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

/// Runs the CLI with the given arguments; stderr is discarded.
Result run(const std::string& args) {
  const std::string cmd = std::string(CHANEST_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::path(CHANEST_SCRATCH) / name;
  fs::remove_all(d);
  fs::create_directories(d.parent_path());
  return d;
}

}  // namespace

TEST_CASE("validate passes, and the injected fault is caught") {
  const Result ok = run("validate --resolution 16");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("all checks passed") != std::string::npos);
  const Result bad = run("validate --resolution 16 --inject-fault");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL affine-parametrization") != std::string::npos);
  const Result js = run("validate --resolution 16 --format json");
  CHECK(js.code == 0);
  CHECK(Json::parse(js.out)["passed"] == true);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("sweep --bogus 1").code == 2);
  CHECK(run("sweep --lambda-grid 0.5:0.1:0.1").code == 2);
  CHECK(run("sweep --lambda-grid 0:0.7:0.1").code == 2);
  CHECK(run("sweep --channel teleport").code == 2);
  CHECK(run("sweep --format xml").code == 2);
  CHECK(run("simulate --channel pauli --lambda 0.1,0.1,0.1 --n 5").code == 2);
  CHECK(run("compare-pauli --n 8").code == 2);
  CHECK(run("sweep --config /nonexistent/config.json").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("sweep CSV to stdout") {
  const Result r = run("sweep --channel depolarizing --lambda-grid 0:0.5:0.25 --n 4 --cost stat");
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "kind,cost,method,N,lambda,value,std_error,status\n"
        "depolarizing,stat,closed,4,0,0,0,ok\n"
        "depolarizing,stat,closed,4,0.25,0.046875,0,ok\n"
        "depolarizing,stat,closed,4,0.5,0.0625,0,ok\n");
}

TEST_CASE("seeded runs are byte-identical, manifests hash their outputs and replay") {
  const fs::path a = scratch("mc_a");
  const fs::path b = scratch("mc_b");
  const std::string args =
      "sweep --channel pauli --lambda-grid 0.1 --n 6,12 --cost stat,fid --method mc --runs 200 --seed 17 "
      "--resolution 8 --out ";
  REQUIRE(run(args + a.string()).code == 0);
  REQUIRE(run(args + b.string()).code == 0);
  const std::string csv = slurp(a / "sweep.csv");
  CHECK_FALSE(csv.empty());
  CHECK(csv == slurp(b / "sweep.csv"));

  const Json m = Json::parse(slurp(a / "manifest.json"));
  CHECK(m["command"] == "sweep");
  CHECK(m["seed"] == 17);
  CHECK(m["outputs"][0]["file"] == "sweep.csv");
  CHECK(m["outputs"][0]["bytes"] == csv.size());
  // Independent digest via the system tool.
  const std::string sum_cmd = "sha256sum " + (a / "sweep.csv").string();
  FILE* p = popen(sum_cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char digest[65] = {};
  REQUIRE(fread(digest, 1, 64, p) == 64u);
  pclose(p);
  CHECK(m["outputs"][0]["sha256"] == std::string(digest));

  const fs::path c = scratch("mc_replay");
  REQUIRE(run("sweep --config " + (a / "manifest.json").string() + " --out " + c.string()).code == 0);
  CHECK(slurp(c / "sweep.csv") == csv);
}

TEST_CASE("config file with flag override") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "config.json");
    os << R"({"channel":"phase-damping","lambda-grid":"0:0.5:0.5","n":[2],"cost":"stat","method":"closed"})";
  }
  const Result base = run("sweep --config " + (dir / "config.json").string());
  REQUIRE(base.code == 0);
  CHECK(base.out.find("phase-damping,stat,closed,2,0.5,0.125,0,ok") != std::string::npos);
  const Result over = run("sweep --config " + (dir / "config.json").string() + " --n 5");
  REQUIRE(over.code == 0);
  CHECK(over.out.find("phase-damping,stat,closed,5,0.5,0.050000000000000003,0,ok") != std::string::npos);
  {
    std::ofstream os(dir / "bad.json");
    os << R"({"channel":"phase-damping","grid":"0:1:1"})";
  }
  CHECK(run("sweep --config " + (dir / "bad.json").string()).code == 2);
}

TEST_CASE("simulate JSON is seeded") {
  const std::string args = "simulate --channel pauli --protocol pauli-separable --lambda 0.1,0.2,0.05 --n 6 --runs 20 "
                           "--seed 3 --cost stat,fid --resolution 8";
  const Result a = run(args);
  const Result b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const Json j = Json::parse(a.out);
  CHECK(j["per_run"].size() == 20u);
  CHECK(j["aggregate"].contains("fid"));
  CHECK(run("simulate --channel pauli --lambda 0.1,0.2,0.05 --n 6 --runs 20 --seed 4").out != a.out);
}

TEST_CASE("compare-pauli JSON output") {
  const Result r = run("compare-pauli --lambda-grid 0:1:0.5 --n 6 --cost stat --format json");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j.size() == 9u);
  CHECK(j[0]["statistical"]["delta"] == 0.0);
  CHECK(j[8]["status"] == "invalid-simplex");
}
