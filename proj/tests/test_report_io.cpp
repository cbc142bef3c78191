#include <doctest.h>

#include <cstdlib>
#include <string>

#include "chanest/errors.hpp"
#include "chanest/report_io.hpp"

using namespace chanest;

TEST_CASE("format_double keeps 17 significant digits and round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.046875) == "0.046875");
  for (double x : {1.0 / 3.0, 2.718281828459045, 1e-300, -123456.789, 5e-324}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("channel JSON round trip for every family") {
  Vector12d g;
  g << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 0.0, 0.25;
  Eigen::MatrixXd q(3, 3);
  q << 0.5, 0.05, 0.05, 0.05, 0.05, 0.1, 0.1, 0.05, 0.05;
  const std::vector<ChannelModel> models{make_depolarizing(0.125),     make_phase_damping(0.3),
                                         make_amplitude_damping(0.9), make_pauli(Eigen::Vector3d(0.1, 0.2, 0.3)),
                                         make_general_affine(g),       make_generalized_pauli(q)};
  for (const auto& c : models) {
    const Json j = channel_to_json(c);
    const ChannelModel back = channel_from_json(Json::parse(j.dump()));
    CHECK(kind_of(back) == kind_of(c));
    CHECK(parameters(back) == parameters(c));
  }
  CHECK(channel_to_json(make_depolarizing(0.125)).dump() == R"({"kind":"depolarizing","lambda":0.125})");
  CHECK(channel_to_json(make_generalized_pauli(q))["dim"] == 3);
}

TEST_CASE("channel JSON rejects malformed documents") {
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"kind":"depolarizing"})")), ConfigError);
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"kind":"depolarizing","lambda":0.7})")), ConfigError);
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"kind":"depolarizing","lambda":[0.1]})")), ConfigError);
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"kind":"pauli","lambda":[0.1,0.2]})")), ConfigError);
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"kind":"pauli","lambda":[0.5,0.5,0.5]})")), ConfigError);
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"kind":"pauli","lambda":[0.1,"x",0.1]})")), ConfigError);
  CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"kind":"unitary","lambda":0.1})")), ConfigError);
  CHECK_THROWS_AS(
      channel_from_json(Json::parse(R"({"kind":"generalized-pauli","dim":3,"lambda":[[0.5,0.5],[0,0]]})")),
      ConfigError);
}

TEST_CASE("protocol, counts and estimate JSON") {
  CHECK(to_json(ProtocolSpec{ProtocolKind::PauliSeparable, 12, 2}).dump() == R"({"kind":"pauli-separable","N":12})");
  CHECK(to_json(ProtocolSpec{ProtocolKind::QuditPauliEntangled, 4, 3})["dim"] == 3);
  OutcomeCounts counts;
  counts.tallies = {{2, 0, 0, 0}};
  CHECK(to_json(counts).dump() == "[[2,0,0,0]]");
  Estimate e;
  e.values = Eigen::Vector3d(1, 0, 0);
  e.physical = true;
  CHECK(to_json(e).dump() == R"({"lambda":[1.0,0.0,0.0],"physical":true})");
}

TEST_CASE("mean error CSV header and rows") {
  CHECK(join_csv(mean_error_csv_header(1)) == "kind,cost,method,N,lambda,value,std_error,status");
  CHECK(join_csv(mean_error_csv_header(3)) == "kind,cost,method,N,lambda1,lambda2,lambda3,value,std_error,status");
  MeanErrorReport r;
  r.channel = ChannelKind::PauliQubit;
  r.cost = CostKind::Statistical;
  r.method = Method::ClosedForm;
  r.n = 12;
  r.lambda = Eigen::Vector3d::Constant(0.25);
  r.value = 0.140625;
  CHECK(join_csv(mean_error_csv_row(r)) == "pauli,stat,closed,12,0.25,0.25,0.25,0.140625,0,ok");
  CHECK(join_csv(mean_error_csv_error_row(ChannelKind::PauliQubit, CostKind::Fidelity, Method::Enumeration, 6,
                                          Eigen::Vector3d(0.5, 0.5, 0.5), "invalid-lambda")) ==
        "pauli,fid,enum,6,0.5,0.5,0.5,,,invalid-lambda");
}

TEST_CASE("mean error and delta JSON carry their metadata") {
  MeanErrorReport r;
  r.lambda = Eigen::VectorXd::Constant(1, 0.2);
  r.cost = CostKind::Fidelity;
  r.method = Method::MonteCarlo;
  r.resolution = 16;
  r.sanitization = Sanitization::Project;
  r.runs = 100;
  r.seed = 9;
  const Json j = to_json(r);
  CHECK(j["resolution"] == 16);
  CHECK(j["sanitization"] == "project");
  CHECK(j["runs"] == 100);
  CHECK(j["seed"] == 9);
  MeanErrorReport s;
  s.lambda = Eigen::VectorXd::Constant(1, 0.2);
  CHECK_FALSE(to_json(s).contains("resolution"));
  CHECK_FALSE(to_json(s).contains("runs"));
  DeltaReport d;
  d.separable = 0.140625;
  d.entangled = 0.09375;
  d.value = 0.046875;
  CHECK(to_json(d)["delta"] == 0.046875);
}
