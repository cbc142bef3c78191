#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chanest/errors.hpp"
#include "chanest/sweep.hpp"

using namespace chanest;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("grid axes") {
  CHECK(parse_grid_axis("0:0.5:0.1").values() == std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(parse_grid_axis(" 0.25 ").values() == std::vector<double>{0.25});
  CHECK(parse_grid_axis("0.1:0.2:0.05").values() == std::vector<double>{0.1, 0.15, 0.2});
  CHECK(GridAxis{0.0, 1.0, 0.05}.values().size() == 21u);
  CHECK_THROWS_AS(parse_grid_axis("0.5:0.1:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("0:1:-0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("a:b:c"), ConfigError);
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
  CHECK(parse_grid("0:1:0.5,0.2").size() == 2u);
}

TEST_CASE("grid points: Cartesian product, last parameter fastest") {
  const auto pts = grid_points(parse_grid("0:1:1,5:6:1"), 2);
  REQUIRE(pts.size() == 4u);
  CHECK(pts[0] == Eigen::Vector2d(0, 5));
  CHECK(pts[1] == Eigen::Vector2d(0, 6));
  CHECK(pts[2] == Eigen::Vector2d(1, 5));
  CHECK(pts[3] == Eigen::Vector2d(1, 6));
  CHECK(grid_points(parse_grid("0:0.5:0.25"), 3).size() == 27u);
  CHECK_THROWS_AS(grid_points(parse_grid("0:1:1,0:1:1"), 3), ConfigError);
}

TEST_CASE("sweep config from JSON") {
  const SweepConfig c = sweep_config_from_json(Json::parse(
      R"({"channel":"pauli","lambda-grid":"0:0.2:0.1","n":"6,12","cost":["stat","fid"],"method":"enum","seed":3})"));
  CHECK(c.channel == ChannelKind::PauliQubit);
  CHECK(c.ns == std::vector<int>{6, 12});
  CHECK(c.costs.size() == 2u);
  CHECK(c.methods == std::vector<Method>{Method::Enumeration});
  CHECK(c.seed == 3u);
  CHECK_THROWS_AS(sweep_config_from_json(Json::parse(R"({"chanel":"pauli"})")), ConfigError);
  CHECK_THROWS_AS(sweep_config_from_json(Json::parse(R"({"lambda":0.1,"lambda-grid":"0:1:1"})")), ConfigError);
  CHECK_THROWS_AS(sweep_config_from_json(Json::parse(R"({"n":"six"})")), ConfigError);
  CHECK_THROWS_AS(sweep_config_from_json(Json::parse(R"([1,2])")), ConfigError);
  // A manifest's resolved config is accepted as-is.
  Json manifest;
  manifest["manifest_version"] = 1;
  manifest["config"] = to_json(c);
  const SweepConfig replay = sweep_config_from_json(manifest);
  CHECK(to_json(replay) == to_json(c));
}

TEST_CASE("sweep validation") {
  SweepConfig c;
  c.grid = parse_grid("0:0.6:0.1");
  CHECK_THROWS_AS(validate(c), ConfigError);  // depolarizing beyond 1/2
  c.grid = parse_grid("0:0.5:0.1");
  CHECK_NOTHROW(validate(c));
  c.format = "xml";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.format = "csv";
  c.channel = ChannelKind::PauliQubit;
  c.ns = {5};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.ns = {6};
  c.protocol = ProtocolKind::General12;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("sweep rows: order, statuses and CSV") {
  SweepConfig c;
  c.channel = ChannelKind::PauliQubit;
  c.grid = parse_grid("0:0.5:0.5");
  c.ns = {6};
  c.methods = {Method::ClosedForm, Method::Enumeration};
  c.threads = 2;
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 16u);
  CHECK(rows[0].status == "ok");
  CHECK(rows[0].method == Method::ClosedForm);
  CHECK(rows[1].method == Method::Enumeration);
  CHECK(rows[0].report->value == 0.0);
  CHECK(rows[2].lambda == Eigen::Vector3d(0, 0, 0.5));
  CHECK(rows[2].report->value == doctest::Approx(rows[3].report->value).epsilon(1e-13));
  // (0.5, 0.5, 0.5) sums past 1.
  CHECK(rows[14].status == "invalid-lambda");
  CHECK_FALSE(rows[14].report.has_value());
  const std::string csv = sweep_csv(rows, 3);
  CHECK(line_count(csv) == 17u);
  CHECK(csv.find(",,,invalid-lambda\n") != std::string::npos);
  CHECK(sweep_json(rows)[14]["status"] == "invalid-lambda");

  SweepConfig q;
  q.channel = ChannelKind::GeneralizedPauli;
  q.dim = 3;
  q.grid = parse_grid("0.1");
  q.ns = {2};
  q.methods = {Method::Enumeration};
  CHECK(run_sweep(q)[0].status == "unsupported");

  SweepConfig big;
  big.channel = ChannelKind::PauliQubit;
  big.grid = parse_grid("0.1");
  big.ns = {96};
  big.methods = {Method::Enumeration};
  CHECK(run_sweep(big)[0].status == "enumeration-limit");
}

TEST_CASE("sweep results do not depend on the thread count") {
  SweepConfig c;
  c.channel = ChannelKind::Depolarizing;
  c.grid = parse_grid("0:0.5:0.1");
  c.ns = {1, 4};
  c.costs = {CostKind::Statistical, CostKind::Fidelity};
  c.methods = {Method::Enumeration, Method::MonteCarlo};
  c.runs = 50;
  c.seed = 11;
  c.resolution = 8;
  c.threads = 1;
  const std::string one = sweep_csv(run_sweep(c), 1);
  c.threads = 3;
  CHECK(sweep_csv(run_sweep(c), 1) == one);
}

TEST_CASE("compare-pauli rows") {
  ComparePauliConfig c;
  c.grid = parse_grid("0:1:0.5");
  c.ns = {6};
  c.resolution = 8;
  const auto rows = run_compare_pauli(c);
  REQUIRE(rows.size() == 9u);
  CHECK(rows[0].status == "ok");
  CHECK(rows[0].statistical->value == 0.0);
  CHECK(rows[0].fidelity->value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rows[8].status == "invalid-simplex");  // (1, 0, 1)
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    CHECK(r.statistical->value >= 0.0);
    CHECK(r.statistical->value == doctest::Approx(delta_statistical_closed(r.lambda, 6)).epsilon(1e-13));
  }
  const std::string csv = compare_pauli_csv(rows);
  CHECK(csv.rfind("N,lambda1,lambda2,lambda3,cs_sep,cs_ent,delta_s,cf_sep,cf_ent,delta_f,status\n", 0) == 0);
  CHECK(csv.find("6,1,0,1,,,,,,,invalid-simplex") != std::string::npos);
  CHECK(compare_pauli_json(rows)[0]["statistical"]["delta"] == 0.0);

  c.ns = {8};
  CHECK_THROWS_AS(run_compare_pauli(c), ConfigError);
  c.ns = {6};
  c.lambda2 = 1.5;
  CHECK_THROWS_AS(run_compare_pauli(c), ConfigError);
}

TEST_CASE("simulate: seeded report") {
  SimulateConfig c;
  c.channel = ChannelKind::PauliQubit;
  c.protocol = ProtocolKind::PauliEntangled;
  c.lambda = Eigen::Vector3d(1, 0, 0);
  c.n = 4;
  c.runs = 2;
  const Json r = run_simulate(c);
  CHECK(r["per_run"][0]["counts"] == Json::parse("[[2,0,0,0]]"));
  CHECK(r["per_run"][0]["estimate"] == Json::parse("[1.0,0.0,0.0]"));
  CHECK(r["aggregate"]["stat"]["mean"] == 0.0);

  SimulateConfig d;
  d.lambda = Eigen::VectorXd::Constant(1, 0.2);
  d.n = 20;
  d.runs = 30;
  d.seed = 5;
  d.costs = {CostKind::Statistical, CostKind::Fidelity};
  d.resolution = 8;
  CHECK(run_simulate(d).dump() == run_simulate(d).dump());
  d.detail = false;
  CHECK_FALSE(run_simulate(d).contains("per_run"));
  d.seed = 6;
  CHECK(run_simulate(d)["aggregate"] != run_simulate([&] {
          SimulateConfig e = d;
          e.seed = 5;
          return e;
        }())["aggregate"]);
}

TEST_CASE("simulate: validation") {
  SimulateConfig c;
  c.channel = ChannelKind::PauliQubit;
  c.lambda = Eigen::Vector3d(0.1, 0.1, 0.1);
  c.n = 5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.n = 6;
  CHECK_NOTHROW(validate(c));
  c.lambda = Eigen::Vector2d(0.1, 0.1);
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.lambda = Eigen::Vector3d(0.5, 0.5, 0.5);
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.lambda = Eigen::Vector3d(0.1, 0.1, 0.1);
  c.runs = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK_THROWS_AS(simulate_config_from_json(Json::parse(R"({"n":"6,12"})")), ConfigError);
  CHECK_THROWS_AS(simulate_config_from_json(Json::parse(R"({"format":"csv"})")), ConfigError);
  CHECK(simulate_config_from_json(Json::parse(R"({"detail":"false"})")).detail == false);
}

TEST_CASE("SHA-256 of known inputs") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("run directory manifest") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chanest_test_run_dir";
  fs::remove_all(dir);
  Json cfg;
  cfg["n"] = 6;
  write_run_directory(dir.string(), "sweep", cfg, 42, {{"sweep.csv", "a,b\n1,2\n"}});
  CHECK(slurp(dir / "sweep.csv") == "a,b\n1,2\n");
  const Json m = Json::parse(slurp(dir / "manifest.json"));
  CHECK(m["manifest_version"] == 1);
  CHECK(m["command"] == "sweep");
  CHECK(m["seed"] == 42);
  CHECK(m["config"] == cfg);
  CHECK(m["outputs"][0]["file"] == "sweep.csv");
  CHECK(m["outputs"][0]["sha256"] == sha256_hex("a,b\n1,2\n"));
  CHECK(m["outputs"][0]["bytes"] == 8);
  CHECK(m["timestamp"].get<std::string>().back() == 'Z');
  fs::remove_all(dir);
}
