#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qattract/attract.hpp"

using namespace qattract;

namespace {

struct OddCase {
  SystemConfig cfg;
  FourierSolution sol;
  double alpha;
  RBounds rb;
  FrictionBound fb;
  LevelSetS S;
};

const OddCase& odd10() {
  static const OddCase c = [] {
    SystemConfig cfg(oracle::sine_drive(), FrequencyVector({1.0}), Nonlinearity::odd_monomial(1), 10.0);
    FourierSolution sol = harmonic_balance_auto(cfg);
    const double alpha = std::cbrt(2.5);
    RBounds rb = estimate_R_bounds(cfg.g(), sol, alpha);
    FrictionBound fb = estimate_friction_bound(10.0, cfg.g(), sol, alpha);
    LevelSetS S = build_S(10.0, cfg.g(), sol, alpha, rb, fb);
    return OddCase{cfg, sol, alpha, rb, fb, S};
  }();
  return c;
}

// p = 1: F(xi, x) = 3x^2 + 3 x xi + xi^2.
double F_cubic(double xi, double x) { return 3 * x * x + 3 * x * xi + xi * xi; }

}  // namespace

TEST_SUITE("attract") {
  TEST_CASE("F and its partials against closed forms") {
    const Nonlinearity g = Nonlinearity::odd_monomial(1);
    const Nonlinearity g2 = Nonlinearity::polynomial({0.5, -1.0, 2.0});
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
      const double xi = u(rng), x = u(rng);
      CHECK(F_of(g, xi, x) == doctest::Approx(F_cubic(xi, x)).epsilon(1e-12).scale(1.0));
      CHECK(F_of(g2, xi, x) == doctest::Approx((g2.value(x + xi) - g2.value(x)) / xi).epsilon(1e-8).scale(1.0));
      CHECK(dF_dxi(g, xi, x) == doctest::Approx(3 * x + 2 * xi).epsilon(1e-12).scale(1.0));
      CHECK(dF_dx(g, xi, x) == doctest::Approx(6 * x + 3 * xi).epsilon(1e-12).scale(1.0));
    }
    CHECK(F_of(g, 0.0, 1.3) == doctest::Approx(g.derivative(1.3)));
  }

  TEST_CASE("R brackets hold on fresh random samples (property)") {
    const OddCase& c = odd10();
    CHECK(c.rb.R1 > 0.0);
    CHECK(c.rb.R1 < 1.0);
    CHECK(c.rb.R2 > 1.0);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> lt(0.0, 2000.0), le(-7.0, 7.0);
    std::bernoulli_distribution sign(0.5);
    for (int i = 0; i < 20000; ++i) {
      const double t = lt(rng);
      const double xi = (sign(rng) ? 1 : -1) * std::pow(10.0, le(rng));
      const double x = eval_solution(c.sol, t).x;
      const double R = F_cubic(xi, x) / F_cubic(xi, c.alpha);
      CHECK(R >= c.rb.R1);
      CHECK(R <= c.rb.R2);
    }
    // Brute-force extremes over x in [min x0, max x0].
    double xmin = 1e300, xmax = -1e300;
    for (int i = 0; i < 4000; ++i) {
      const double x = eval_solution(c.sol, kTwoPi * i / 4000).x;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
    double rmin = 1e300;
    for (double x : {xmin, xmax})
      for (int k = -6000; k <= 6000; ++k) {
        const double xi = std::sinh(k / 500.0);
        rmin = std::min(rmin, F_cubic(xi, x) / F_cubic(xi, c.alpha));
      }
    CHECK(c.rb.R1 <= rmin);
    CHECK(c.rb.R1 >= 0.98 * rmin);
  }

  TEST_CASE("R bounds preconditions") {
    const SystemConfig even(oracle::sine_drive(), FrequencyVector({1.0}), Nonlinearity::even_monomial(1), 9.0);
    const FourierSolution sol = harmonic_balance_auto(even);
    CHECK_THROWS_WITH_AS(estimate_R_bounds(even.g(), sol, std::sqrt(2.5)), doctest::Contains("WrongNonlinearity"), Error);
    // Small mean and a large swing: x0 changes sign.
    const SystemConfig swing(oracle::sine_forcing(0.05, 3.0), FrequencyVector({1.0}), Nonlinearity::odd_monomial(1), 4.0);
    const FourierSolution s2 = harmonic_balance_auto(swing);
    CHECK_THROWS_WITH_AS(estimate_R_bounds(swing.g(), s2, std::cbrt(0.05)), doctest::Contains("SignChange"), Error);
  }

  TEST_CASE("golden times fill one period") {
    const auto t = golden_times(FrequencyVector({2.0}), 500);
    REQUIRE(t.size() == 500);
    for (double s : t) {
      CHECK(s >= 0.0);
      CHECK(s < kPi);
    }
    const auto t2 = golden_times(FrequencyVector({1.0, 1.5}, 1.0, 1.5), 10);
    CHECK(*std::max_element(t2.begin(), t2.end()) <= 1000.0);
  }

  TEST_CASE("friction envelope dominates sampled R'/2R") {
    const OddCase& c = odd10();
    CHECK(c.fb.B1 > 0.0);
    CHECK(c.fb.B2 > 0.0);
    CHECK(c.fb.wtilde == doctest::Approx((100.0 - c.fb.B1) / c.fb.B2));
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> lt(0.0, kTwoPi), lx(-30.0, 30.0), ly(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
      const double m = friction_margin(10.0, c.cfg.g(), c.sol, c.alpha, c.fb, lx(rng), ly(rng), lt(rng));
      CHECK(m >= -1e-9);
    }
  }

  TEST_CASE("level set S") {
    const OddCase& c = odd10();
    const LevelSetS& S = c.S;
    CHECK(S.contains(0.0, 0.0));
    CHECK(S.kappa >= 0.0);
    CHECK(S.xi_intercept > 0.0);
    CHECK(S.xi_intercept_neg < 0.0);
    CHECK(S.lyapunov(S.xi_intercept, 0.0) == doctest::Approx(S.energy_level).epsilon(1e-9));
    for (const Vec2& b : S.boundary) CHECK(S.lyapunov(b.x, b.y) == doctest::Approx(S.energy_level).epsilon(1e-6));
    const Report flux = verify_S_flux(S, c.sol);
    CHECK(flux.pass);
    CHECK(flux.samples == static_cast<long>(S.boundary.size()) * 100);
    // V(v) by quadrature.
    for (double v : {-2.0, 0.5, 3.0}) {
      const double q = oracle::simpson([&](double s) { return s * F_of(c.cfg.g(), s, c.alpha); }, 0.0, v);
      CHECK(potential_V(c.cfg.g(), c.alpha, v) == doctest::Approx(q).epsilon(1e-9));
    }
  }

  TEST_CASE("S needs enough friction") {
    const OddCase& c = odd10();
    FrictionBound fb = c.fb;
    fb.B1 = 60.0;
    CHECK_THROWS_WITH_AS(build_S(10.0, c.cfg.g(), c.sol, c.alpha, c.rb, fb), doctest::Contains("GammaTooSmall"), Error);
  }

  TEST_CASE("sandwich between C1 and C2") {
    const OddCase& c = odd10();
    CHECK(curve_C1(10.0, 1, 2.0) == doctest::Approx(-8.0 / 40.0));
    CHECK(curve_C2(10.0, 1, 2.0) == doctest::Approx(-32.0 / 10.0));
    const Report r = verify_sandwich(c.cfg, c.sol, &c.S, 10 * c.S.xi_intercept);
    CHECK(r.pass);
    CHECK(r.samples > 0);
  }

  TEST_CASE("quadrant transit within the bound") {
    const OddCase& c = odd10();
    std::vector<ErrorState> ics;
    for (double r : {1.0, 3.0, 10.0, 30.0, 100.0}) {
      ics.push_back({0.2 * r, r, 0.0});
      ics.push_back({-0.2 * r, -r, 0.0});
    }
    std::vector<TransitRecord> rec;
    const Report rep = quadrant_transit_check(c.cfg, c.sol, ics, &rec);
    CHECK(rep.pass);
    REQUIRE(rec.size() == ics.size());
    for (const TransitRecord& t : rec) {
      CHECK(t.entered);
      CHECK(t.time <= 1.01 * t.bound);
    }
  }

  TEST_CASE("cycle decrements outside S") {
    const OddCase& c = odd10();
    for (double k : {100.0, -300.0}) {
      const DecrementResult d = cycle_decrement(c.cfg, c.sol, c.S, k * c.S.y_intercept);
      CHECK(d.entered_S);
      CHECK(d.all_positive);
      CHECK_FALSE(d.decrements.empty());
      for (double v : d.decrements) CHECK(v > 0.0);
    }
  }

  TEST_CASE("Liouville clock increases") {
    const OddCase& c = odd10();
    IntegratorSettings set;
    set.t_max = 20.0;
    set.sample_interval = 0.05;
    const Trajectory tr = integrate(c.cfg, {4.0, -3.0, 0.0}, set);
    const auto es = to_error_states(c.sol, tr.samples);
    const auto tau = liouville_clock(c.cfg.g(), c.sol, c.alpha, es);
    REQUIRE(tau.size() == es.size());
    for (std::size_t k = 1; k < tau.size(); ++k) CHECK(tau[k] > tau[k - 1]);
  }
}
