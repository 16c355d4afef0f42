#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qattract/invariants.hpp"

using namespace qattract;

namespace {

SystemConfig drive(int p) {
  return SystemConfig(oracle::sine_drive(), FrequencyVector({1.0}), Nonlinearity::even_monomial(p), 9.0);
}

bool winding_inside(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  for (std::size_t i = 0, k = poly.size() - 1; i < poly.size(); k = i++) {
    const Vec2 a = poly[i], b = poly[k];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("region") {
  TEST_CASE("clockwise square has inward normals") {
    RegionSpec sq;
    sq.kind = "square";
    sq.arcs = {Arc::segment({-1, 1}, {1, 1}), Arc::segment({1, 1}, {1, -1}), Arc::segment({1, -1}, {-1, -1}),
               Arc::segment({-1, -1}, {-1, 1})};
    CHECK(sq.closure_gap() == 0.0);
    for (const Arc& a : sq.arcs) {
      const Vec2 mid = a.point(0.5);
      CHECK(dot(a.inward_normal(0.5), Vec2{0, 0} - mid) > 0.0);
    }
  }

  TEST_CASE("power and circle arcs") {
    const Arc p = Arc::power(4.0, -1.0, 0.0, 2.0, 0.0, 2.0);
    CHECK(p.start() == Vec2{0.0, 4.0});
    CHECK(p.end().y == doctest::Approx(0.0));
    // y = 4 - x^2 at x = 1: tangent (2, -4) per unit u.
    CHECK(p.tangent(0.5).x == doctest::Approx(2.0));
    CHECK(p.tangent(0.5).y == doctest::Approx(-4.0));
    const RegionSpec d = make_disk({1.0, 2.0}, 3.0);
    CHECK(d.closure_gap() < 1e-12);
    const Arc& c = d.arcs[0];
    for (double u : {0.1, 0.5, 0.9}) {
      const Vec2 n = c.inward_normal(u);
      CHECK(dot(n, Vec2{1.0, 2.0} - c.point(u)) > 0.0);
    }
    CHECK(d.contains({1.0, 4.9}));
    CHECK_FALSE(d.contains({1.0, 5.1}));
  }

  TEST_CASE("radial boundary of a disk") {
    const auto pts = radial_boundary([](Vec2 p) { return std::hypot(p.x - 1.0, p.y) <= 2.0; }, {1.0, 0.0}, 10.0, 360);
    REQUIRE(pts.size() == 361);
    for (const Vec2& p : pts) CHECK(std::hypot(p.x - 1.0, p.y) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pts[0].y > pts[0].x - 1.0);  // starts at the top
    CHECK(pts[10].x > pts[0].x);       // then clockwise
  }
}

TEST_SUITE("invariants") {
  TEST_CASE("hexagon constants for p = 1") {
    const ForcingBounds b = compute_forcing_bounds(oracle::sine_drive(), 1);
    const HexagonA A = build_hexagon(1, b.f_pow, b.F_pow, 9.0);
    // lambda1 = gamma/(4pF^{2p-1}) (1 + sqrt(1 - 8pF^{2p-1}/gamma^2)), lambda2 = gamma/(2p(2f)^{2p-1}).
    const double l1 = 9.0 / 8.0 * (1.0 + std::sqrt(1.0 - 16.0 / 81.0));
    CHECK(A.lambda1 == doctest::Approx(l1).epsilon(1e-10));
    CHECK(std::abs(A.lambda1 - 2.1328) < 1e-3);
    CHECK(std::abs(A.lambda2 - 2.25) < 1e-12);
    CHECK(A.H.y == doctest::Approx(4.0 * l1).epsilon(1e-10));
    CHECK(A.J.y == doctest::Approx(-2.25 * 3.0).epsilon(1e-10));
    CHECK(A.I.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(A.L.x == doctest::Approx(-1.0).epsilon(1e-12));
    const RegionSpec R = A.region();
    CHECK(R.arcs.size() == 6);
    CHECK(R.closure_gap() < 1e-12);
  }

  TEST_CASE("threshold arithmetic") {
    const HexagonThreshold t2 = hexagon_threshold(2, 1.0, std::pow(4.0, 0.25));
    CHECK(t2.reality == doctest::Approx(16.0 * std::pow(2.0, 1.5)));
    CHECK(t2.below == doctest::Approx(2.0 * 3.0 / (15.0 / 16.0)));
    CHECK(81.0 >= t2.required());
    const HexagonThreshold t1 = hexagon_threshold(1, 1.0, 2.0);
    CHECK(t1.reality == doctest::Approx(16.0));
    CHECK(t1.below == doctest::Approx(4.0));
    try {
      build_hexagon(1, 1.0, 2.0, 3.0);
      FAIL("expected GammaBelowThreshold");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GammaBelowThreshold);
      CHECK(std::string(e.what()).find("16") != std::string::npos);
      CHECK(std::string(e.what()).find("= 9") != std::string::npos);
    }
  }

  TEST_CASE("hexagon flux for p = 1, 2, 3 and a broken hexagon") {
    for (int p : {1, 2, 3}) {
      const SystemConfig cfg = drive(p);
      const ForcingBounds b = compute_forcing_bounds(cfg.forcing(), p);
      const HexagonA A = build_hexagon(p, b.f_pow, b.F_pow, 9.0);
      const Report r = verify_inward_flux(A.region(), cfg.g(), 9.0, FluxFields{&cfg, b, 100}, 1000);
      CHECK(r.pass);
      CHECK(r.samples == 6000);
      // Doubling lambda1 pushes the HI arc outward past the tangency.
      const HexagonA bad = hexagon_with(p, b.f_pow, b.F_pow, 9.0, 2.0 * A.lambda1, A.lambda2);
      const Report rb = verify_inward_flux(bad.region(), cfg.g(), 9.0, FluxFields{&cfg, b, 100}, 1000);
      CHECK_FALSE(rb.pass);
      CHECK(rb.note.find("HI") != std::string::npos);
    }
  }

  TEST_CASE("analytic membership matches the boundary polyline (property)") {
    const ForcingBounds b = compute_forcing_bounds(oracle::sine_drive(), 2);
    const HexagonA A = build_hexagon(2, b.f_pow, b.F_pow, 9.0);
    const std::vector<Vec2> poly = A.region().polyline(2000);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(-3.0, 4.0);
    int agree = 0, total = 0;
    for (int i = 0; i < 5000; ++i) {
      const Vec2 p{ux(rng), uy(rng)};
      // Skip points within 1e-3 of the boundary.
      if (A.contains(p, 1e-3) != A.contains(p, -1e-3)) continue;
      ++total;
      agree += A.contains(p) == winding_inside(poly, p);
    }
    CHECK(total > 4000);
    CHECK(agree == total);
  }

  TEST_CASE("root of h for p = 1, F = 2, f = 1, gamma = 9") {
    const double oracle_root = -oracle::bisect([](double x) { return -2 * x * x * x + 8 * x - 243; }, -10.0, -2.0);
    CHECK(oracle_root == doctest::Approx(5.2218).epsilon(1e-4));
    const double xi = solve_xi_root(1, 1.0, 2.0, 9.0);
    CHECK(xi == doctest::Approx(oracle_root).epsilon(1e-12));
    CHECK(std::abs(xi - 5.222) < 0.01);
    CHECK(h_blowup(1, 1.0, 2.0, 9.0, -3.0) == doctest::Approx(-2 * -27.0 + 8 * -3.0 - 243));
    CHECK(count_h_sign_changes(1, 1.0, 2.0, 9.0, -1000.0, 100000) == 1);
  }

  TEST_CASE("h has one root left of -F (property)") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> uf(0.3, 1.5), ur(1.1, 3.0), ug(2.0, 30.0);
    for (int i = 0; i < 30; ++i) {
      const int p = 1 + i % 3;
      const double f = uf(rng), F = f * ur(rng), g = ug(rng);
      const double xi = solve_xi_root(p, f, F, g);
      CHECK(xi > F);
      CHECK(count_h_sign_changes(p, f, F, g, -4.0 * xi, 4000) == 1);
      CHECK(std::abs(h_blowup(p, f, F, g, -xi)) <= 1e-8 * g * g * (ipow(F, 2 * p) - ipow(f, 2 * p)) + 1e-12);
    }
  }

  TEST_CASE("b selection and the blow-up bound") {
    const double b = choose_b(1, 2.0, 9.0, 6.0);
    const double bmax = std::sqrt(8.0 * 6.0 * 4.0 / (81.0 + 12.0 * 6.0 * 2.0));
    CHECK(b > 0.0);
    CHECK(b <= 0.9 * bmax + 1e-15);
    for (int i = 0; i <= 10000; ++i) CHECK(blowup_L(1, 2.0, 9.0, 6.0, b, i * 0.01) >= 0.0);
    CHECK(blowup_time_bound(0.5, 16.0) == doctest::Approx(1.0));
    CHECK(code_of([] { choose_b(1, 2.0, 9.0, 1.5); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("blow-up sets are positively invariant") {
    for (int p : {1, 2}) {
      const SystemConfig cfg = drive(p);
      const ForcingBounds fb = compute_forcing_bounds(cfg.forcing(), p);
      const double xi = solve_xi_root(p, fb.f_pow, fb.F_pow, 9.0);
      const BlowupRegion B = build_blowup_region(p, fb.f_pow, fb.F_pow, 9.0, std::max(6.0, xi));
      for (const RegionSpec& R : {B.S_region(), B.J_region()}) {
        const Report r = verify_inward_flux(R, cfg.g(), 9.0, FluxFields{&cfg, fb, 100}, 1000);
        CHECK(r.pass);
        CHECK(r.excluded == 1);
        CHECK(R.closure_gap() < 1e-6 * std::pow(50.0 * B.X0, 2 * p));
      }
      CHECK(B.contains({-2.0 * B.X0, B.lower(-2.0 * B.X0) + 1e-3}));
      CHECK_FALSE(B.contains({-2.0 * B.X0, 1.0}));
      CHECK(B.in_J({-2.0 * B.X0, -1e-3}));
    }
    const ForcingBounds fb = compute_forcing_bounds(oracle::sine_drive(), 1);
    CHECK(code_of([&] { build_blowup_region(1, fb.f_pow, fb.F_pow, 9.0, 3.0); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("separatrix and the level-curve set") {
    const double c0 = std::sqrt(2.5);
    CHECK(separatrix_eval(c0, 2 * c0).first == doctest::Approx(0.0).scale(1.0));
    CHECK(separatrix_eval(c0, -c0).first == doctest::Approx(0.0).scale(1.0));
    // Maximum at x = c0: y^2 = 8 c0^3 / 3.
    CHECK(separatrix_eval(c0, c0).first == doctest::Approx(3.2467).epsilon(1e-4));
    CHECK(separatrix_eval(c0, c0).second == -separatrix_eval(c0, c0).first);
    CHECK(code_of([&] { separatrix_eval(c0, 3 * c0); }) == ErrorCode::InvalidArgument);

    const LevelCurveSet D = build_level_curve_set(c0, 9.0);
    CHECK(D.v_left == doctest::Approx(-2 * c0 + 1.0 / 3.0));
    CHECK(U_level_curve(c0, D.v_right) == doctest::Approx(D.energy).epsilon(1e-12));
    CHECK(D.v_right > 0.0);
    CHECK(D.v_right < c0);
    for (const Vec2& p : D.boundary) {
      const double v = p.x - c0;
      CHECK(0.5 * p.y * p.y + U_level_curve(c0, v) == doctest::Approx(D.energy).epsilon(1e-8));
    }
    CHECK(D.contains({c0, 0.0}));
    CHECK_FALSE(D.contains({-c0 + 0.1, 0.0}));
    CHECK(code_of([&] { build_level_curve_set(c0, 9.0, 100.0); }) == ErrorCode::EmptySet);
  }

  TEST_CASE("the union strictly exceeds both parts") {
    const ForcingBounds b = compute_forcing_bounds(oracle::sine_drive(), 1);
    const HexagonA A = build_hexagon(1, b.f_pow, b.F_pow, 9.0);
    const LevelCurveSet D = build_level_curve_set(std::sqrt(2.5), 9.0);
    const UnionReport U = union_D0(&D, A);
    CHECK(U.A_outside_D);
    CHECK(U.D_outside_A);
    CHECK(U.region.contains(A.H + Vec2{0.0, -1e-6}));
    CHECK(U.region.contains({D.c0 + D.v_right - 1e-6, 0.0}));
    const UnionReport only = union_D0(nullptr, A);
    CHECK_FALSE(only.A_outside_D);
    CHECK(only.region.arcs.size() == 6);
  }
}
