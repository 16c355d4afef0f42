#pragma once

#include <optional>
#include <vector>

#include "qattract/integrate.hpp"
#include "qattract/model.hpp"
#include "qattract/qpsolve.hpp"
#include "qattract/report.hpp"

namespace qattract {

/// Error coordinates: xi = x - x0(t), y = xi'.
struct ErrorState {
  double xi = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// F(xi, x) = (g(x + xi) - g(x)) / xi, evaluated by its binomial expansion.
double F_of(const Nonlinearity& g, double xi, double x);
double dF_dxi(const Nonlinearity& g, double xi, double x);
double dF_dx(const Nonlinearity& g, double xi, double x);

/// F(xi, x0(t)) / F(xi, alpha); DegenerateQ when |F(xi, alpha)| < 1e-14.
double R_eval(const Nonlinearity& g, const FourierSolution& sol, double alpha, double xi, double t);

/// Quasi-random times t_k = frac(k phi) T, with T one period for d = 1 and 1000 otherwise.
std::vector<double> golden_times(const FrequencyVector& freq, int n);

/// 0 followed by +-10^s for s on a uniform grid over [-6, 6].
std::vector<double> log_xi_grid(int n = 400);

struct RBounds {
  double R1 = 0.0;
  double R2 = 0.0;
  long sample_count = 0;
};

/// Min/max of R over log_xi_grid x golden_times, widened by 1%.
/// SignChange when x0 changes sign (or vanishes) on the sample.
RBounds estimate_R_bounds(const Nonlinearity& g, const FourierSolution& sol, double alpha, int n_xi = 400,
                          int n_t = 1000);

struct FrictionBound {
  double B1 = 0.0;
  double B2 = 0.0;
  double wtilde = 0.0;
};

/// |R'/2R| <= (B1 + B2 |w|)/gamma with
///   B1 = gamma sup |d_t P / 2P|,  B2 = gamma sup |(d_xi P/P - d_xi Q/Q) sqrt(R) / 2|,
/// both floored at 1e-12; wtilde = (gamma^2 - B1)/B2.
FrictionBound estimate_friction_bound(double gamma, const Nonlinearity& g, const FourierSolution& sol,
                                      double alpha, int n_xi = 400, int n_t = 1000);

/// Value of the friction envelope check at one sample: (B1 + B2|w|)/gamma - |R'/2R|.
double friction_margin(double gamma, const Nonlinearity& g, const FourierSolution& sol, double alpha,
                       const FrictionBound& fb, double xi, double w, double t);

/// V(v) = int_0^v s F(s, alpha) ds.
double potential_V(const Nonlinearity& g, double alpha, double v);
/// Negative and positive roots of V(v) = energy.
std::pair<double, double> level_v_intercepts(const Nonlinearity& g, double alpha, double energy);

/// Convex trapping set in error coordinates,
///   L(xi, y) = a y^2/2 + V(xi) + kappa a (xi y + gamma xi^2/2) <= w~^2/2,  a = 1/R1.
/// kappa = 0 gives the sqrt(R1)-shrunk level set of H; kappa > 0 adds the
/// cross term that keeps the boundary flux non-positive near the xi-axis.
struct LevelSetS {
  Nonlinearity g;
  double alpha = 0.0;
  double gamma = 0.0;
  double R1 = 0.0;
  double a = 0.0;
  double kappa = 0.0;
  double energy_level = 0.0;
  double y_intercept = 0.0;
  double xi_intercept = 0.0;      // positive xi-axis crossing
  double xi_intercept_neg = 0.0;  // negative xi-axis crossing
  double v_minus = 0.0;           // roots of V = energy (the H level curve on w = 0)
  double v_plus = 0.0;
  std::vector<Vec2> boundary;

  double lyapunov(double xi, double y) const;
  Vec2 gradient(double xi, double y) const;
  bool contains(double xi, double y, double slack = 0.0) const;
};

/// GammaTooSmall when gamma^2 <= 2 B1 or when no kappa fits.
LevelSetS build_S(double gamma, const Nonlinearity& g, const FourierSolution& sol, double alpha,
                  const RBounds& rb, const FrictionBound& fb, int n_boundary = 720, int n_t = 200);

/// Outward flux of the error field through the boundary of S at n_t golden times.
Report verify_S_flux(const LevelSetS& S, const FourierSolution& sol, int n_t = 100);

double curve_C1(double gamma, int p, double xi);
double curve_C2(double gamma, int p, double xi);

/// Checks 1/2 <= xi F(xi, x0(t)) / xi^{2p+1} <= 2 at points (xi, g(xi, t)) outside S.
/// With S null every sampled point is checked.
Report verify_sandwich(const SystemConfig& cfg, const FourierSolution& sol, const LevelSetS* S, double xi_max,
                       int n_xi = 400, int n_t = 200);

/// Error-system field (y, -gamma y - xi F(xi, x0(t))).
PlanarField error_field(const SystemConfig& cfg, const FourierSolution& sol);

struct TransitRecord {
  ErrorState start;
  bool entered = false;
  double time = 0.0;
  double bound = 0.0;  // (1/gamma) log(1 + gamma |y0| / c)
};

/// Starts in quadrant I must reach II, starts in III must reach IV.
Report quadrant_transit_check(const SystemConfig& cfg, const FourierSolution& sol,
                              const std::vector<ErrorState>& ics, std::vector<TransitRecord>* records = nullptr);

struct DecrementResult {
  std::vector<double> magnitudes;  // |y| at y0 and at each later same-direction crossing
  std::vector<double> decrements;
  bool entered_S = false;
  bool never_returns = false;
  bool all_positive = true;
  double t_end = 0.0;
};

DecrementResult cycle_decrement(const SystemConfig& cfg, const FourierSolution& sol, const LevelSetS& S, double y0,
                                double t_max = 200.0);

/// tau_k = int_0^{t_k} sqrt(R(xi, t)) dt by the trapezoid rule along error-state samples.
std::vector<double> liouville_clock(const Nonlinearity& g, const FourierSolution& sol, double alpha,
                                    const std::vector<ErrorState>& samples);

/// Converts a trajectory of the original system to error coordinates.
std::vector<ErrorState> to_error_states(const FourierSolution& sol, const std::vector<PhaseState>& samples);

}  // namespace qattract
