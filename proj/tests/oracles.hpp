#pragma once

// Reference computations written independently of the library code paths.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "qattract/model.hpp"

namespace oracle {

using qattract::Vec2;

/// f(t) by the plain complex sum over all stored modes.
inline double forcing_sum(const qattract::ForcingSpectrum& f, const qattract::FrequencyVector& w, double t) {
  std::complex<double> s = 0.0;
  for (const auto& m : f.modes()) {
    double phase = 0.0;
    for (std::size_t i = 0; i < m.nu.size(); ++i) phase += m.nu[i] * w.omega()[i] * t;
    s += m.amplitude * std::exp(std::complex<double>(0.0, phase));
  }
  return s.real();
}

/// Classical RK4 with a fixed step.
inline Vec2 rk4(const std::function<Vec2(double, Vec2)>& f, Vec2 y, double t0, double t1, int n) {
  const double h = (t1 - t0) / n;
  double t = t0;
  for (int i = 0; i < n; ++i) {
    const Vec2 k1 = f(t, y);
    const Vec2 k2 = f(t + h / 2, y + (h / 2) * k1);
    const Vec2 k3 = f(t + h / 2, y + (h / 2) * k2);
    const Vec2 k4 = f(t + h, y + h * k3);
    y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return y;
}

/// Plain bisection on a bracket with f(lo), f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  const bool lo_neg = f(lo) < 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == lo_neg) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Central difference.
inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

/// Composite Simpson.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// (5 + 3 sin t)/2 as a spectrum.
inline qattract::ForcingSpectrum sine_drive() {
  return qattract::ForcingSpectrum(1, {{{0}, 2.5}, {{1}, {0.0, -0.75}}, {{-1}, {0.0, 0.75}}}, 2.5, 1.0);
}

/// f0 + a sin t.
inline qattract::ForcingSpectrum sine_forcing(double f0, double a) {
  return qattract::ForcingSpectrum(1, {{{0}, f0}, {{1}, {0.0, -a / 2}}, {{-1}, {0.0, a / 2}}},
                                   std::max(f0, a), 1e-9);
}

}  // namespace oracle
