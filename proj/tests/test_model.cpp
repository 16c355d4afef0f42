#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "qattract/lattice.hpp"
#include "qattract/model.hpp"

using namespace qattract;

namespace {

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

TEST_SUITE("lattice") {
  TEST_CASE("sizes of the l1 ball") {
    CHECK(FourierLattice(1, 5).size() == 11);
    // d = 2: 2N^2 + 2N + 1.
    for (int n : {1, 2, 7}) CHECK(FourierLattice(2, n).size() == static_cast<std::size_t>(2 * n * n + 2 * n + 1));
    CHECK(FourierLattice(3, 1).size() == 7);
  }

  TEST_CASE("graded order, mirror and positive half") {
    const FourierLattice L(2, 4);
    CHECK(L.zero_index() == 0);
    CHECK(l1_norm(L[0]) == 0);
    std::set<LatticePoint> seen;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < L.size(); ++i) {
      if (i > 0) CHECK(l1_norm(L[i - 1]) <= l1_norm(L[i]));
      CHECK(seen.insert(L[i]).second);
      CHECK(L[L.mirror(i)] == negate(L[i]));
      CHECK(L.mirror(L.mirror(i)) == i);
      CHECK(L.index_of(L[i]).value() == i);
      if (i != 0) CHECK(is_positive(L[i]) != is_positive(L[L.mirror(i)]));
      if (i != 0 && is_positive(L[i])) ++n_pos;
    }
    CHECK(L.positive().size() == n_pos);
    CHECK(2 * n_pos + 1 == L.size());
    CHECK_FALSE(L.index_of(LatticePoint{5, 0}).has_value());
  }
}

TEST_SUITE("model") {
  TEST_CASE("frequency vector validation") {
    CHECK_NOTHROW(FrequencyVector({1.0}));
    CHECK(code_of([] { FrequencyVector({0.0, 0.0}, 1.0, 2.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { FrequencyVector({1.0, 2.0}, 1.0, 1.0); }) == ErrorCode::InvalidArgument);
    CHECK_NOTHROW(FrequencyVector({1.0, 2.0}, 1.0, 1.5));
    CHECK(code_of([] { FrequencyVector({1.0}, 0.0, 0.0); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("forcing spectrum invariants") {
    CHECK(code_of([] { ForcingSpectrum(1, {{{0}, 2.0}, {{1}, {0.0, 1.0}}}, 5.0, 0.1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ForcingSpectrum(1, {{{0}, 2.0}, {{1}, {0.0, 1.0}}, {{-1}, {0.0, 1.0}}}, 5.0, 0.1); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { ForcingSpectrum(1, {{{0}, 0.0}, {{1}, 1.0}, {{-1}, 1.0}}, 5.0, 0.1); }) ==
          ErrorCode::InvalidArgument);
    // |f_1| = 1 > 1.2 e^{-1}.
    CHECK(code_of([] { ForcingSpectrum(1, {{{0}, 1.0}, {{1}, 1.0}, {{-1}, 1.0}}, 1.2, 1.0); }) ==
          ErrorCode::InvalidArgument);
    const ForcingSpectrum f = oracle::sine_drive();
    CHECK(f.mean() == 2.5);
    CHECK(f.truncation() == 1);
    CHECK(f.modes().size() == 3);
  }

  TEST_CASE("forcing evaluation against the direct complex sum") {
    const ForcingSpectrum f = oracle::sine_drive();
    const FrequencyVector w({1.0});
    CHECK(forcing_eval(f, w, kPi / 2) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(forcing_eval(f, w, -kPi / 2) == doctest::Approx(1.0).epsilon(1e-15));
    for (double t : {0.0, 0.3, 1.7, 12.5, -40.0})
      CHECK(forcing_eval(f, w, t) == doctest::Approx((5.0 + 3.0 * std::sin(t)) / 2).epsilon(1e-14));

    const ForcingSpectrum q(2, {{{0, 0}, 2.0}, {{1, 0}, {0.1, 0.2}}, {{-1, 0}, {0.1, -0.2}}, {{1, -1}, {0.05, 0.0}},
                                {{-1, 1}, {0.05, 0.0}}},
                            2.0, 0.5);
    const FrequencyVector w2({1.0, std::sqrt(2.0)}, 1.0, 1.5);
    for (double t : {0.0, 0.9, 3.3, 100.1}) CHECK(forcing_eval(q, w2, t) == doctest::Approx(oracle::forcing_sum(q, w2, t)));
  }

  TEST_CASE("forcing bounds enclose random samples (property)") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<ForcingMode> modes{{{0}, 3.0}};
      for (int k = 1; k <= 3; ++k) {
        const std::complex<double> a(0.4 * u(rng) / k, 0.4 * u(rng) / k);
        modes.push_back({{k}, a});
        modes.push_back({{-k}, std::conj(a)});
      }
      const ForcingSpectrum f(1, modes, 3.0, 0.01);
      const ForcingBounds b = compute_forcing_bounds(f, 1);
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i < 20000; ++i) {
        const double v = oracle::forcing_sum(f, FrequencyVector({1.0}), kTwoPi * i / 20000.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(b.f_low <= lo);
      CHECK(b.f_up >= hi);
      CHECK(b.f_low > lo - 1e-6);
      CHECK(b.f_up < hi + 1e-6);
      CHECK(b.f_pow == doctest::Approx(std::sqrt(b.f_low)));
    }
  }

  TEST_CASE("bounds of (5 + 3 sin t)/2 and their roots") {
    const ForcingBounds b = compute_forcing_bounds(oracle::sine_drive(), 1);
    CHECK(b.f_low == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.f_up == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(b.f_low <= 1.0);
    CHECK(b.f_up >= 4.0);
    CHECK(b.F_pow == doctest::Approx(2.0).epsilon(1e-12));
    const ForcingBounds b3 = compute_forcing_bounds(oracle::sine_drive(), 3);
    CHECK(b3.F_pow == doctest::Approx(std::pow(4.0, 1.0 / 6)).epsilon(1e-12));
  }

  TEST_CASE("nonlinearity consistency (property)") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const std::vector<Nonlinearity> gs = {Nonlinearity::odd_monomial(1), Nonlinearity::odd_monomial(2),
                                          Nonlinearity::even_monomial(1), Nonlinearity::even_monomial(3),
                                          Nonlinearity::polynomial({1.0, -2.0, 0.5})};
    for (const Nonlinearity& g : gs) {
      for (int i = 0; i < 50; ++i) {
        const double x = u(rng);
        const double fd = oracle::central_diff([&](double s) { return g.value(s); }, x);
        CHECK(g.derivative(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        const double Gfd = oracle::central_diff([&](double s) { return g.antiderivative(s); }, x);
        CHECK(g.value(x) == doctest::Approx(Gfd).epsilon(1e-6).scale(1.0));
        const double c = u(rng);
        const std::vector<double> b = g.taylor_at(c);
        double sum = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) sum += b[k] * ipow(x - c, static_cast<int>(k));
        CHECK(sum == doctest::Approx(g.value(x)).epsilon(1e-10).scale(1.0));
      }
    }
    CHECK(Nonlinearity::odd_monomial(2).value(2.0) == 32.0);
    CHECK(Nonlinearity::even_monomial(2).value(-2.0) == 16.0);
    CHECK(code_of([] { Nonlinearity::polynomial({1.0, 0.0, -1.0}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { Nonlinearity::polynomial({1.0, 1.0}); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("system config and equilibria") {
    const SystemConfig cfg(oracle::sine_drive(), FrequencyVector({1.0}), Nonlinearity::even_monomial(1), 9.0);
    CHECK(cfg.epsilon() * cfg.gamma() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cfg.with_gamma(3.0).epsilon() == doctest::Approx(1.0 / 3.0));
    CHECK(code_of([&] { cfg.with_gamma(0.0); }) == ErrorCode::InvalidArgument);
    CHECK(equilibrium_c0(Nonlinearity::odd_monomial(1), 2.5) == doctest::Approx(std::cbrt(2.5)).epsilon(1e-14));
    CHECK(equilibrium_c0(Nonlinearity::even_monomial(1), 2.5) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
    CHECK(equilibrium_c0(Nonlinearity::odd_monomial(2), 2.5) == doctest::Approx(std::pow(2.5, 0.2)).epsilon(1e-14));
    const std::vector<double> r = equilibrium_roots(Nonlinearity::even_monomial(1), 4.0);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-2.0));
    CHECK(r[1] == doctest::Approx(2.0));
    CHECK(code_of([] { equilibrium_c0(Nonlinearity::even_monomial(1), -1.0); }) == ErrorCode::NoTransversalRoot);
  }

  TEST_CASE("vector fields") {
    const SystemConfig cfg(oracle::sine_drive(), FrequencyVector({1.0}), Nonlinearity::even_monomial(1), 9.0);
    const Vec2 v = vector_field(cfg, {1.5, -2.0, kPi / 2});
    CHECK(v.x == -2.0);
    CHECK(v.y == doctest::Approx(4.0 + 18.0 - 2.25));
    const Vec2 fz = frozen_field(cfg.g(), 9.0, 1.0, {1.5, -2.0});
    CHECK(fz.y == doctest::Approx(1.0 + 18.0 - 2.25));
    const ForcingBounds b = compute_forcing_bounds(cfg.forcing(), 1);
    const ExtremeFields ex = extreme_fields(cfg, b, {1.0, 1.0, 0.0});
    CHECK(ex.upper.y - ex.lower.y == doctest::Approx(b.f_up - b.f_low));
    const SystemConfig odd(oracle::sine_drive(), FrequencyVector({1.0}), Nonlinearity::odd_monomial(1), 9.0);
    CHECK(code_of([&] { extreme_fields(odd, b, {0, 0, 0}); }) == ErrorCode::WrongNonlinearity);
  }

  TEST_CASE("Diophantine margin") {
    CHECK(diophantine_margin(FrequencyVector({1.0, 1.0}, 1.0, 1.5), 20) == 0.0);
    const double golden = diophantine_margin(FrequencyVector({1.0, (1.0 + std::sqrt(5.0)) / 2}, 1.0, 1.5), 50);
    CHECK(golden > 0.1);
    CHECK(diophantine_margin(FrequencyVector({2.0}), 10) == doctest::Approx(2.0));
  }

  TEST_CASE("polynomial real roots") {
    // (x - 1)(x + 2)(x - 3) = x^3 - 2x^2 - 5x + 6
    const std::vector<double> c{6.0, -5.0, -2.0, 1.0};
    const std::vector<double> r = polynomial_real_roots(c);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(polynomial_real_roots(std::vector<double>{1.0, 0.0, 1.0}).empty());
  }
}
