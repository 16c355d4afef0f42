#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "qattract/lattice.hpp"
#include "qattract/model.hpp"

namespace qattract {

/// Fourier coefficients of the quasi-periodic response on a truncated lattice.
/// coeffs[i] belongs to lattice[i]; x_{-nu} = conj(x_nu).
struct FourierSolution {
  FourierLattice lattice;
  std::vector<std::complex<double>> coeffs;
  FrequencyVector freq;
  double gamma = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;

  double mean() const { return coeffs[lattice.zero_index()].real(); }
  std::complex<double> coeff(std::span<const int> nu) const;
  /// sum_{|nu| = N} |x_nu|.
  double outer_shell_mass() const;
};

struct SolutionPoint {
  double x = 0.0;
  double dx = 0.0;
  double ddx = 0.0;
};

/// (x0(t), x0'(t)); the sum runs over the positive half so the value is real by construction.
Vec2 eval_solution(const FourierSolution& sol, double t);
SolutionPoint eval_solution_full(const FourierSolution& sol, double t);

/// Time-synchronized distance between s and (x0(s.t), x0'(s.t)).
double orbit_distance(const FourierSolution& sol, const PhaseState& s);

struct NewtonOptions {
  int max_iterations = 60;
  int max_halvings = 8;
  /// Residual tolerance relative to max(1, |f0|).
  double tolerance = 1e-10;
};

/// Newton on the real-ified coefficient vector with a torus-grid evaluation of g(x).
/// Throws NewtonDiverged when the residual is not reduced 10x over 5 steps.
FourierSolution harmonic_balance_solve(const SystemConfig& cfg, const FourierLattice& lattice,
                                       const std::optional<FourierSolution>& guess = std::nullopt,
                                       const NewtonOptions& opts = {});

/// max(2 N_f, 16) for d = 1, N_f + 8 otherwise.
int default_truncation(const SystemConfig& cfg);

/// Solves at the default truncation and doubles N (at most 3 times) while the
/// outer shell carries >= 1e-12.
FourierSolution harmonic_balance_auto(const SystemConfig& cfg, const NewtonOptions& opts = {});

/// Sup over lattice modes of |(i w.nu)^2 x_nu + gamma (i w.nu) x_nu + (g o x)_nu - f_nu|.
double harmonic_balance_residual(const SystemConfig& cfg, const FourierSolution& sol);

/// Torus grid points per dimension used for a lattice of radius n and a nonlinearity of given degree.
int torus_grid_size(int n, int degree);

/// Terms x^(k), k = 0..K, of x0 = sum_k eps^k x^(k).
struct PerturbationSeries {
  FourierLattice lattice;
  FrequencyVector freq;
  double c0 = 0.0;
  std::vector<std::vector<std::complex<double>>> terms;

  int order() const { return static_cast<int>(terms.size()) - 1; }
  /// x^(k)(t).
  double term_value(int k, double t) const;
  /// Partial sum sum_{k <= order} eps^k x^(k), packaged as a solution.
  FourierSolution partial_sum(double gamma, int order) const;
};

/// Throws SmallDivisorOverflow if some |omega.nu| < 1e-12 on the lattice.
PerturbationSeries perturbation_series(const SystemConfig& cfg, const FourierLattice& lattice, int K);

/// Smallest gamma of the (descending) list for which Newton converges from the
/// default guess, scanning until the first failure. Empty when the first fails.
std::optional<double> empirical_min_gamma(const SystemConfig& cfg, const std::vector<double>& gammas);

}  // namespace qattract
