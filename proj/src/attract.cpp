#include "qattract/attract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qattract {

namespace {

constexpr double kGolden = 0.61803398874989484820;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void require_odd(const Nonlinearity& g) {
  if (g.kind() != Nonlinearity::Kind::OddMonomial)
    throw Error(ErrorCode::WrongNonlinearity, "attraction instrumentation needs an odd monomial");
}

}  // namespace

double F_of(const Nonlinearity& g, double xi, double x) {
  const auto& c = g.coefficients();
  double s = 0.0;
  for (int k = 1; k <= g.degree(); ++k) {
    if (c[k] == 0.0) continue;
    double t = 0.0;
    for (int j = 0; j <= k - 1; ++j) t += binom(k, j) * ipow(xi, k - 1 - j) * ipow(x, j);
    s += c[k] * t;
  }
  return s;
}

double dF_dxi(const Nonlinearity& g, double xi, double x) {
  const auto& c = g.coefficients();
  double s = 0.0;
  for (int k = 2; k <= g.degree(); ++k) {
    if (c[k] == 0.0) continue;
    double t = 0.0;
    for (int j = 0; j <= k - 2; ++j) t += binom(k, j) * (k - 1 - j) * ipow(xi, k - 2 - j) * ipow(x, j);
    s += c[k] * t;
  }
  return s;
}

double dF_dx(const Nonlinearity& g, double xi, double x) {
  const auto& c = g.coefficients();
  double s = 0.0;
  for (int k = 2; k <= g.degree(); ++k) {
    if (c[k] == 0.0) continue;
    double t = 0.0;
    for (int j = 1; j <= k - 1; ++j) t += binom(k, j) * j * ipow(xi, k - 1 - j) * ipow(x, j - 1);
    s += c[k] * t;
  }
  return s;
}

double R_eval(const Nonlinearity& g, const FourierSolution& sol, double alpha, double xi, double t) {
  const double Q = F_of(g, xi, alpha);
  if (std::abs(Q) < 1e-14) throw Error(ErrorCode::DegenerateQ, "F(xi, alpha) vanishes");
  return F_of(g, xi, eval_solution(sol, t).x) / Q;
}

std::vector<double> golden_times(const FrequencyVector& freq, int n) {
  const double span = freq.dim() == 1 ? kTwoPi / std::abs(freq.omega()[0]) : 1000.0;
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) {
    double f = (k + 1) * kGolden;
    t[k] = (f - std::floor(f)) * span;
  }
  return t;
}

std::vector<double> log_xi_grid(int n) {
  std::vector<double> xs{0.0};
  for (int i = 0; i < n; ++i) {
    const double e = -6.0 + 12.0 * i / std::max(1, n - 1);
    const double v = std::pow(10.0, e);
    xs.push_back(v);
    xs.push_back(-v);
  }
  return xs;
}

RBounds estimate_R_bounds(const Nonlinearity& g, const FourierSolution& sol, double alpha, int n_xi, int n_t) {
  require_odd(g);
  const std::vector<double> times = golden_times(sol.freq, n_t);
  std::vector<double> x0(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    x0[k] = eval_solution(sol, times[k]).x;
    if (!(x0[k] * alpha > 0.0))
      throw Error(ErrorCode::SignChange, "x0(t) changes sign on the sample; gamma too small");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  long count = 0;
  for (double xi : log_xi_grid(n_xi)) {
    const double Q = F_of(g, xi, alpha);
    if (std::abs(Q) < 1e-14) throw Error(ErrorCode::DegenerateQ, "F(xi, alpha) vanishes");
    for (double x : x0) {
      const double R = F_of(g, xi, x) / Q;
      lo = std::min(lo, R);
      hi = std::max(hi, R);
      ++count;
    }
  }
  return {0.99 * lo, 1.01 * hi, count};
}

FrictionBound estimate_friction_bound(double gamma, const Nonlinearity& g, const FourierSolution& sol,
                                      double alpha, int n_xi, int n_t) {
  require_odd(g);
  const std::vector<double> times = golden_times(sol.freq, n_t);
  std::vector<Vec2> x0(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) x0[k] = eval_solution(sol, times[k]);
  double b1 = 0.0;
  double b2 = 0.0;
  for (double xi : log_xi_grid(n_xi)) {
    const double Q = F_of(g, xi, alpha);
    const double dQ = dF_dxi(g, xi, alpha);
    for (const Vec2& s : x0) {
      const double P = F_of(g, xi, s.x);
      const double dtP = dF_dx(g, xi, s.x) * s.y;
      const double dP = dF_dxi(g, xi, s.x);
      b1 = std::max(b1, gamma * std::abs(dtP / (2.0 * P)));
      b2 = std::max(b2, gamma * std::abs((dP / P - dQ / Q) * std::sqrt(P / Q) / 2.0));
    }
  }
  FrictionBound fb;
  fb.B1 = std::max(b1, 1e-12);
  fb.B2 = std::max(b2, 1e-12);
  fb.wtilde = (gamma * gamma - fb.B1) / fb.B2;
  return fb;
}

double friction_margin(double gamma, const Nonlinearity& g, const FourierSolution& sol, double alpha,
                       const FrictionBound& fb, double xi, double w, double t) {
  const Vec2 s = eval_solution(sol, t);
  const double P = F_of(g, xi, s.x);
  const double Q = F_of(g, xi, alpha);
  const double R = P / Q;
  const double rdot_over_r =
      (dF_dxi(g, xi, s.x) / P - dF_dxi(g, xi, alpha) / Q) * std::sqrt(R) * w + dF_dx(g, xi, s.x) * s.y / P;
  return (fb.B1 + fb.B2 * std::abs(w)) / gamma - std::abs(rdot_over_r / 2.0);
}

double potential_V(const Nonlinearity& g, double alpha, double v) {
  const auto& c = g.coefficients();
  double s = 0.0;
  for (int k = 1; k <= g.degree(); ++k) {
    if (c[k] == 0.0) continue;
    double t = 0.0;
    for (int j = 0; j <= k - 1; ++j) t += binom(k, j) * ipow(alpha, j) * ipow(v, k + 1 - j) / (k + 1 - j);
    s += c[k] * t;
  }
  return s;
}

namespace {

// Root of the increasing function phi on [0, inf) with phi(0) <= target.
template <class Fn>
double ray_root(Fn phi, double target, double r0) {
  double lo = 0.0;
  double hi = std::max(r0, 1e-6);
  int guard = 0;
  while (phi(hi) <= target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw Error(ErrorCode::BracketFailure, "level set is unbounded along a ray");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (phi(mid) <= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> level_v_intercepts(const Nonlinearity& g, double alpha, double energy) {
  if (!(energy > 0.0)) throw Error(ErrorCode::InvalidArgument, "level must be positive");
  const double scale = std::pow(energy, 1.0 / (g.degree() + 1));
  const double vp = ray_root([&](double r) { return potential_V(g, alpha, r); }, energy, scale);
  const double vm = ray_root([&](double r) { return potential_V(g, alpha, -r); }, energy, scale);
  return {-vm, vp};
}

double LevelSetS::lyapunov(double xi, double y) const {
  return a * y * y / 2.0 + potential_V(g, alpha, xi) + kappa * a * (xi * y + gamma * xi * xi / 2.0);
}

Vec2 LevelSetS::gradient(double xi, double y) const {
  const double dV = xi * F_of(g, xi, alpha);
  return {dV + kappa * a * (y + gamma * xi), a * y + kappa * a * xi};
}

bool LevelSetS::contains(double xi, double y, double slack) const {
  return lyapunov(xi, y) <= energy_level * (1.0 + slack);
}

LevelSetS build_S(double gamma, const Nonlinearity& g, const FourierSolution& sol, double alpha, const RBounds& rb,
                  const FrictionBound& fb, int n_boundary, int n_t) {
  require_odd(g);
  if (!(gamma * gamma > 2.0 * fb.B1))
    throw Error(ErrorCode::GammaTooSmall, "gamma^2 <= 2 B1 (B1 = " + std::to_string(fb.B1) + ")");
  if (!(rb.R1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "R1 must be positive");

  LevelSetS S{g, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {}};
  S.alpha = alpha;
  S.gamma = gamma;
  S.R1 = rb.R1;
  S.a = 1.0 / rb.R1;
  S.energy_level = fb.wtilde * fb.wtilde / 2.0;
  std::tie(S.v_minus, S.v_plus) = level_v_intercepts(g, alpha, S.energy_level);

  // Smallest cross-term weight that makes L' negative definite on the xi-extent.
  const std::vector<double> times = golden_times(sol.freq, n_t);
  std::vector<double> x0(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) x0[k] = eval_solution(sol, times[k]).x;
  double c = 0.0;
  const int n_xi = 2000;
  for (int i = 0; i <= n_xi; ++i) {
    const double xi = S.v_minus + (S.v_plus - S.v_minus) * i / n_xi;
    const double Q = F_of(g, xi, alpha);
    for (double x : x0) {
      const double P = F_of(g, xi, x);
      const double d = Q - S.a * P;
      c = std::max(c, d * d / (4.0 * S.a * S.a * P));
    }
  }
  if (!(gamma * gamma > 8.0 * c))
    throw Error(ErrorCode::GammaTooSmall, "no cross-term weight keeps the level set invariant");
  S.kappa = 0.5 * (gamma - std::sqrt(gamma * gamma - 8.0 * c));

  const double r0 = std::max({S.v_plus, -S.v_minus, 1.0});
  auto along = [&](double cx, double cy) {
    return ray_root([&](double r) { return S.lyapunov(r * cx, r * cy); }, S.energy_level, r0);
  };
  S.y_intercept = std::sqrt(2.0 * S.energy_level / S.a);
  S.xi_intercept = along(1.0, 0.0);
  S.xi_intercept_neg = -along(-1.0, 0.0);
  S.boundary.reserve(n_boundary);
  for (int k = 0; k < n_boundary; ++k) {
    const double th = kTwoPi * k / n_boundary;
    const double r = along(std::cos(th), std::sin(th));
    S.boundary.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return S;
}

PlanarField error_field(const SystemConfig& cfg, const FourierSolution& sol) {
  const Nonlinearity g = cfg.g();
  const double gamma = cfg.gamma();
  return [g, gamma, &sol](double t, Vec2 s) {
    const double x0 = eval_solution(sol, t).x;
    return Vec2{s.y, -gamma * s.y - s.x * F_of(g, s.x, x0)};
  };
}

Report verify_S_flux(const LevelSetS& S, const FourierSolution& sol, int n_t) {
  Report rep;
  rep.check = "S_flux";
  const std::vector<double> times = golden_times(sol.freq, n_t);
  double worst = std::numeric_limits<double>::infinity();
  for (double t : times) {
    const double x0 = eval_solution(sol, t).x;
    for (const Vec2& b : S.boundary) {
      const Vec2 n = S.gradient(b.x, b.y);
      const Vec2 phi{b.y, -S.gamma * b.y - b.x * F_of(S.g, b.x, x0)};
      const double out = dot(n, phi) / (norm(n) * std::max(norm(phi), 1e-300));
      worst = std::min(worst, -out);
      if (-out < -1e-9) ++rep.violations;
      ++rep.samples;
    }
  }
  rep.worst_margin = worst;
  rep.pass = rep.violations == 0;
  rep.param("gamma", S.gamma);
  rep.param("kappa", S.kappa);
  return rep;
}

double curve_C1(double gamma, int p, double xi) { return -ipow(xi, 2 * p + 1) / (4.0 * gamma); }
double curve_C2(double gamma, int p, double xi) { return -4.0 * ipow(xi, 2 * p + 1) / gamma; }

Report verify_sandwich(const SystemConfig& cfg, const FourierSolution& sol, const LevelSetS* S, double xi_max,
                       int n_xi, int n_t) {
  require_odd(cfg.g());
  const int p = cfg.g().p();
  Report rep;
  rep.check = "sandwich";
  const std::vector<double> times = golden_times(sol.freq, n_t);
  double worst = std::numeric_limits<double>::infinity();
  const double lo = std::log10(std::min(1e-3, xi_max));
  const double hi = std::log10(xi_max);
  for (double t : times) {
    const double x0 = eval_solution(sol, t).x;
    for (int i = 0; i < n_xi; ++i) {
      const double mag = std::pow(10.0, lo + (hi - lo) * i / std::max(1, n_xi - 1));
      for (double xi : {mag, -mag}) {
        const double xf = xi * F_of(cfg.g(), xi, x0);
        const double y = -xf / cfg.gamma();
        if (S && S->contains(xi, y)) {
          ++rep.excluded;
          continue;
        }
        const double rho = xf / ipow(xi, 2 * p + 1);
        const double margin = std::min(rho - 0.5, 2.0 - rho);
        worst = std::min(worst, margin);
        if (margin < 0.0) ++rep.violations;
        ++rep.samples;
      }
    }
  }
  rep.worst_margin = rep.samples ? worst : 0.0;
  rep.pass = rep.violations == 0;
  rep.param("gamma", cfg.gamma());
  rep.param("xi_max", xi_max);
  return rep;
}

Report quadrant_transit_check(const SystemConfig& cfg, const FourierSolution& sol, const std::vector<ErrorState>& ics,
                              std::vector<TransitRecord>* records) {
  require_odd(cfg.g());
  Report rep;
  rep.check = "quadrant_transit";
  const PlanarField field = error_field(cfg, sol);
  const std::vector<double> times = golden_times(sol.freq, 4000);
  const double gamma = cfg.gamma();
  double worst = std::numeric_limits<double>::infinity();
  for (const ErrorState& z : ics) {
    const bool in_I = z.xi > 0.0 && z.y >= 0.0;
    const bool in_III = z.xi < 0.0 && z.y <= 0.0;
    if (!in_I && !in_III) {
      ++rep.excluded;
      continue;
    }
    double inf_F = std::numeric_limits<double>::infinity();
    for (double t : times) inf_F = std::min(inf_F, F_of(cfg.g(), z.xi, eval_solution(sol, z.t + t).x));
    const double c = std::abs(z.xi) * inf_F;
    TransitRecord rec{z, false, 0.0, std::log1p(gamma * std::abs(z.y) / c) / gamma};
    if (z.y == 0.0) {
      const Vec2 d = field(z.t, {z.xi, z.y});
      rec.entered = in_I ? d.y < 0.0 : d.y > 0.0;
    } else {
      IntegratorSettings set;
      set.t_max = z.t + 10.0 * rec.bound + 10.0;
      set.max_step = std::max(1e-3, rec.bound / 20.0);
      set.store_samples = false;
      const EventSpec ev = EventSpec::cross_x_axis(in_I ? Direction::Down : Direction::Up, "transit", true);
      const Trajectory tr = integrate_field(field, {z.xi, z.y, z.t}, set, {ev});
      if (!tr.events.empty()) {
        const PhaseState& s = tr.events.front().state;
        rec.entered = in_I ? s.x >= 0.0 : s.x <= 0.0;
        rec.time = s.t - z.t;
      }
    }
    // Sampled inf of F overestimates c slightly; allow 1% on the bound.
    const double margin = rec.entered ? 1.01 * rec.bound + 1e-12 - rec.time : -1.0;
    worst = std::min(worst, margin);
    if (margin < 0.0) ++rep.violations;
    ++rep.samples;
    if (records) records->push_back(rec);
  }
  rep.worst_margin = rep.samples ? worst : 0.0;
  rep.pass = rep.violations == 0;
  rep.param("gamma", gamma);
  return rep;
}

DecrementResult cycle_decrement(const SystemConfig& cfg, const FourierSolution& sol, const LevelSetS& S, double y0,
                                double t_max) {
  if (y0 == 0.0 || S.contains(0.0, y0))
    throw Error(ErrorCode::InvalidArgument, "cycle start (0, y0) must lie outside S");
  const PlanarField field = error_field(cfg, sol);
  IntegratorSettings set;
  set.t_max = t_max;
  set.max_step = 0.05;
  set.store_samples = false;
  const Direction dir = y0 > 0.0 ? Direction::Up : Direction::Down;
  const std::vector<EventSpec> events{
      EventSpec::cross_y_axis(dir, "cycle"),
      EventSpec::enter_region([&S](Vec2 z) { return S.contains(z.x, z.y); }, "enter_S", true)};
  const Trajectory tr = integrate_field(field, {0.0, y0, 0.0}, set, events);

  DecrementResult res;
  res.magnitudes.push_back(std::abs(y0));
  for (const auto& e : tr.events) {
    if (e.tag == "cycle") res.magnitudes.push_back(std::abs(e.state.y));
    if (e.tag == "enter_S") res.entered_S = true;
  }
  for (std::size_t k = 0; k + 1 < res.magnitudes.size(); ++k) {
    const double d = res.magnitudes[k] - res.magnitudes[k + 1];
    res.decrements.push_back(d);
    res.all_positive = res.all_positive && d > 0.0;
  }
  res.never_returns = !res.entered_S && res.magnitudes.size() == 1;
  res.t_end = tr.t_end;
  return res;
}

std::vector<ErrorState> to_error_states(const FourierSolution& sol, const std::vector<PhaseState>& samples) {
  std::vector<ErrorState> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const Vec2 x0 = eval_solution(sol, s.t);
    out.push_back({s.x - x0.x, s.y - x0.y, s.t});
  }
  return out;
}

std::vector<double> liouville_clock(const Nonlinearity& g, const FourierSolution& sol, double alpha,
                                    const std::vector<ErrorState>& samples) {
  std::vector<double> tau;
  tau.reserve(samples.size());
  double prev_root = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double root = std::sqrt(R_eval(g, sol, alpha, samples[k].xi, samples[k].t));
    if (k == 0) {
      tau.push_back(0.0);
    } else {
      tau.push_back(tau.back() + 0.5 * (samples[k].t - samples[k - 1].t) * (root + prev_root));
    }
    prev_root = root;
  }
  return tau;
}

}  // namespace qattract
