#include <doctest.h>

#include <cstdlib>

#include "oracles.hpp"
#include "qattract/invariants.hpp"
#include "qattract/io.hpp"

using namespace qattract;

namespace {

const char* kDrive = R"(# comment line
[forcing]
dim = 1
nu(0) = 2.5
nu(1) = 0, -0.75   # mirror filled in
envelope_xi = 1

[freq]
omega = 1

[nonlinearity]
kind = even
p = 1

[params]
gamma = 9
X0 = 6
)";

std::string config_error(const std::string& text) {
  try {
    parse_system(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError");
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("system file with conjugate completion") {
    const SystemFile sf = parse_system(kDrive);
    const SystemConfig& cfg = sf.cfg;
    CHECK(cfg.gamma() == 9.0);
    CHECK(cfg.g().kind() == Nonlinearity::Kind::EvenMonomial);
    CHECK(cfg.forcing().modes().size() == 3);
    for (double t : {0.0, 1.0, kPi / 2})
      CHECK(forcing_eval(cfg.forcing(), cfg.freq(), t) == doctest::Approx((5 + 3 * std::sin(t)) / 2));
    REQUIRE(sf.X0.has_value());
    CHECK(*sf.X0 == 6.0);
    CHECK_FALSE(sf.C2.has_value());
  }

  TEST_CASE("diagnostics carry line, column and the key") {
    const std::string bad_key = config_error(replace(kDrive, "X0 = 6", "foo = 6"));
    CHECK(bad_key.find("'foo'") != std::string::npos);
    CHECK(bad_key.find("line 17, column 1") != std::string::npos);
    CHECK(config_error(replace(kDrive, "[params]", "[extra]")).find("unknown section 'extra'") != std::string::npos);
    const std::string bad_num = config_error(replace(kDrive, "gamma = 9", "gamma = nine"));
    CHECK(bad_num.find("line 16, column 9") != std::string::npos);
    CHECK(config_error(replace(kDrive, "gamma = 9", "")).find("missing key 'gamma'") != std::string::npos);
    CHECK(config_error(replace(kDrive, "kind = even", "kind = cubic")).find("kind must be") != std::string::npos);
    CHECK(config_error(replace(kDrive, "p = 1", "p = 1\np = 2")).find("duplicate key 'p'") != std::string::npos);
    CHECK(config_error(replace(kDrive, "nu(1) = 0, -0.75", "nu(1) = 0, -0.75\nnu(-1) = 0, -0.75"))
              .find("conj") != std::string::npos);
    CHECK(config_error(replace(kDrive, "omega = 1", "omega = 1, 1.4142135623730951\ntau = 1.5")).find("dim is 1") != std::string::npos);
    CHECK(config_error(replace(kDrive, "gamma = 9", "gamma = -1")).find("gamma") != std::string::npos);
  }

  TEST_CASE("polynomial nonlinearity and defaults") {
    const std::string text = replace(replace(kDrive, "kind = even", "kind = polynomial"), "p = 1", "coeffs = 1, 0, 2");
    const SystemFile sf = parse_system(text);
    CHECK(sf.cfg.g().kind() == Nonlinearity::Kind::Polynomial);
    CHECK(sf.cfg.g().value(1.0) == 3.0);
  }

  TEST_CASE("numbers survive a CSV round trip bit for bit") {
    Trajectory tr;
    tr.samples = {{0.1, 1.0 / 3.0, 0.0}, {std::nextafter(1.0, 2.0), -2e-300, 1.5}};
    tr.events = {{"x=0", {0.0, -1.0, 0.7}}};
    const std::string csv = trajectory_csv(tr);
    CHECK(csv.rfind("t,x,y\n", 0) == 0);
    const auto back = trajectory_from_csv(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[0].y == 1.0 / 3.0);
    CHECK(back[1].x == std::nextafter(1.0, 2.0));
    CHECK(back[1].y == -2e-300);
    CHECK(events_csv(tr) == "tag,t,x,y\nx=0,0.69999999999999996,0,-1\n");
    CHECK(fmt17(0.1) == "0.10000000000000001");
  }

  TEST_CASE("solution export") {
    const SystemConfig cfg = parse_system(kDrive).cfg;
    const FourierSolution sol = harmonic_balance_auto(cfg);
    const std::string csv = solution_csv(sol);
    CHECK(csv.rfind("nu_1,re,im\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == sol.lattice.size() + 1);
    const Json j = solution_summary(cfg, sol);
    CHECK(j["gamma"] == 9.0);
    CHECK(j["c0"].get<double>() == doctest::Approx(std::sqrt(2.5)));
    CHECK(j["residual_norm"].get<double>() <= 1e-10);
    CHECK(j.contains("mean"));
  }

  TEST_CASE("region JSON round trip") {
    const HexagonA A = build_hexagon(1, 1.0, 2.0, 9.0);
    const RegionSpec R = A.region();
    const Json j = region_json(R);
    CHECK(j["kind"] == "hexagon");
    CHECK(j["arcs"].size() == 6);
    CHECK(j["arcs"][1]["formula_id"] == "power");
    CHECK(j["arcs"][1]["domain"][1] == 2.0);
    const RegionSpec back = region_from_json(Json::parse(j.dump()));
    CHECK(back.arcs.size() == 6);
    CHECK(back.closure_gap() < 1e-12);
    for (Vec2 p : {Vec2{0.5, 1.0}, Vec2{-0.5, -1.0}, Vec2{1.9, 8.0}, Vec2{-1.5, 0.0}})
      CHECK(back.contains(p) == A.contains(p));
    const std::string csv = region_csv(R, 10);
    CHECK(csv.rfind("arc,x,y\n", 0) == 0);
    CHECK(csv.find("\nHI,") != std::string::npos);
    CHECK_THROWS_AS(region_from_json(Json::parse(R"({"kind":"x"})")), Error);
  }

  TEST_CASE("basin CSV and matrix") {
    BasinMap m;
    m.grid = GridSpec{-1.0, 1.0, 0.0, 2.0, 3, 2, 0.0};
    m.labels = {Label::Attracted, Label::BlownUp, Label::Undecided, Label::Attracted, Label::Attracted, Label::BlownUp};
    m.times = {1, 2, 3, 4, 5, 6};
    const std::string csv = basin_csv(m);
    CHECK(csv.rfind("x0,y0,label,t_decide\n-1,0,attracted,1\n", 0) == 0);
    const BasinMap back = basin_from_csv(csv);
    CHECK(back.labels == m.labels);
    CHECK(back.times == m.times);
    CHECK(back.grid.nx == 3);
    CHECK(back.grid.ny == 2);
    const std::string mat = basin_matrix(m);
    CHECK(mat.find("\nAAB\nABU\n") != std::string::npos);
    CHECK_THROWS_AS(basin_from_csv("x0,y0,label,t_decide\n0,0,attracted,1\n"), Error);
  }

  TEST_CASE("report JSON") {
    Report r;
    r.check = "demo";
    r.pass = true;
    r.worst_margin = 0.25;
    r.samples = 4;
    r.param("gamma", 9.0);
    const Json j = report_json(r);
    CHECK(j["check"] == "demo");
    CHECK(j["pass"] == true);
    CHECK(j["worst_margin"] == 0.25);
    CHECK(j["samples"] == 4);
    CHECK(j["params"]["gamma"] == 9.0);
  }
}
