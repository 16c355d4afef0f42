#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "qattract/common.hpp"
#include "qattract/lattice.hpp"

namespace qattract {

/// Frequency vector omega in R^d together with the Diophantine constants
/// (C0, tau) of |omega.nu| >= C0 |nu|^-tau.
class FrequencyVector {
 public:
  explicit FrequencyVector(std::vector<double> omega, double c0_dioph = 1.0, double tau = 0.0);

  int dim() const { return static_cast<int>(omega_.size()); }
  const std::vector<double>& omega() const { return omega_; }
  double c0_dioph() const { return c0_; }
  double tau() const { return tau_; }
  double dot(std::span<const int> nu) const;
  double l1() const;

 private:
  std::vector<double> omega_;
  double c0_;
  double tau_;
};

struct ForcingMode {
  LatticePoint nu;
  std::complex<double> amplitude;
};

/// Truncated Fourier spectrum of the quasi-periodic drive,
///   f(psi) = sum_nu f_nu exp(i nu.psi),
/// with f_{-nu} = conj(f_nu), real nonzero f_0 and
/// |f_nu| <= envelope_F exp(-envelope_xi |nu|_1).
///
/// `truncated` marks spectra that only approximate the intended drive; for
/// those the geometric tail beyond the stored modes is added to the forcing
/// bounds.
class ForcingSpectrum {
 public:
  ForcingSpectrum(int dim, std::vector<ForcingMode> modes, double envelope_F, double envelope_xi,
                  bool truncated = false);

  /// f(t) = f0.
  static ForcingSpectrum constant(double f0);
  /// f(t) = f0 + a cos t + b sin t (d = 1), envelope fitted with rate 1.
  static ForcingSpectrum single_harmonic(double f0, double a, double b);
  /// Smallest F with |f_nu| <= F exp(-xi |nu|).
  static double fit_envelope(std::span<const ForcingMode> modes, double xi);

  int dim() const { return dim_; }
  const std::vector<ForcingMode>& modes() const { return modes_; }
  double mean() const { return mean_; }
  /// Largest |nu|_1 among stored modes (N_f).
  int truncation() const { return truncation_; }
  double envelope_F() const { return envelope_F_; }
  double envelope_xi() const { return envelope_xi_; }
  bool truncated() const { return truncated_; }
  double abs_sum() const;
  /// sum_{|nu| > N_f} F exp(-xi |nu|) over Z^d; zero unless truncated().
  double tail_bound() const;
  std::complex<double> coeff(std::span<const int> nu) const;

 private:
  int dim_;
  std::vector<ForcingMode> modes_;
  double envelope_F_;
  double envelope_xi_;
  bool truncated_;
  double mean_ = 0.0;
  int truncation_ = 0;
};

/// g(x): odd monomial x^{2p+1}, even monomial x^{2p}, or a polynomial
/// a_1 x + ... + a_{2p+1} x^{2p+1} with a_{2p+1} > 0.
class Nonlinearity {
 public:
  enum class Kind { OddMonomial, EvenMonomial, Polynomial };

  static Nonlinearity odd_monomial(int p);
  static Nonlinearity even_monomial(int p);
  /// coeffs = (a_1, ..., a_{2p+1}).
  static Nonlinearity polynomial(std::vector<double> coeffs);

  Kind kind() const { return kind_; }
  int p() const { return p_; }
  int degree() const { return static_cast<int>(poly_.size()) - 1; }
  /// Full coefficient vector c_0..c_n of g (c_0 = 0).
  const std::vector<double>& coefficients() const { return poly_; }

  double value(double x) const;
  double derivative(double x) const;
  /// G with G' = g and G(0) = 0.
  double antiderivative(double x) const;
  /// b_k with g(c + d) = sum_k b_k d^k.
  std::vector<double> taylor_at(double c) const;

 private:
  Nonlinearity(Kind kind, int p, std::vector<double> poly);

  Kind kind_;
  int p_;
  std::vector<double> poly_;
};

const char* to_string(Nonlinearity::Kind kind);

/// Full system  x'' + gamma x' + g(x) = f(omega t).
class SystemConfig {
 public:
  SystemConfig(ForcingSpectrum forcing, FrequencyVector freq, Nonlinearity g, double gamma);

  const ForcingSpectrum& forcing() const { return forcing_; }
  const FrequencyVector& freq() const { return freq_; }
  const Nonlinearity& g() const { return g_; }
  double gamma() const { return gamma_; }
  double epsilon() const { return epsilon_; }

  SystemConfig with_gamma(double gamma) const;

 private:
  ForcingSpectrum forcing_;
  FrequencyVector freq_;
  Nonlinearity g_;
  double gamma_;
  double epsilon_;
};

/// Bounds f_low <= f(omega t) <= f_up, together with the 2p-th roots used by
/// the even-case constructions (f_pow = f_low^{1/2p}, F_pow = f_up^{1/2p}).
struct ForcingBounds {
  double f_low = 0.0;
  double f_up = 0.0;
  double f_pow = 0.0;
  double F_pow = 0.0;

  static ForcingBounds from_powers(int p, double f_pow, double F_pow);
};

double forcing_eval(const ForcingSpectrum& forcing, const FrequencyVector& freq, double t);
/// Value on the torus, f(psi).
double forcing_on_torus(const ForcingSpectrum& forcing, std::span<const double> psi);

/// Torus sampling (2^16 points) with Newton polishing of the extremes,
/// widened by rounding slack and, for truncated spectra, the tail bound.
/// The 2p-th roots are filled when p > 0 and f_low > 0.
ForcingBounds compute_forcing_bounds(const ForcingSpectrum& forcing, int p = 0);

/// min over 0 < |nu|_1 <= n of |omega.nu| |nu|^tau / C0.
double diophantine_margin(const FrequencyVector& freq, int n = 200);

/// All real roots of g(c) = f0 with g'(c) != 0, ascending.
std::vector<double> equilibrium_roots(const Nonlinearity& g, double f0);
/// The transversal root of g(c) = f0 (largest |g'| when several exist).
double equilibrium_c0(const Nonlinearity& g, double f0);

/// (y, f(omega t) - gamma y - g(x)).
Vec2 vector_field(const SystemConfig& cfg, const PhaseState& s);
/// Same field with the forcing frozen at a constant value.
Vec2 frozen_field(const Nonlinearity& g, double gamma, double forcing_value, Vec2 s);

struct ExtremeFields {
  Vec2 lower;  // phi_f, forcing frozen at f_low
  Vec2 upper;  // phi_F, forcing frozen at f_up
};

/// Requires an even monomial; throws WrongNonlinearity otherwise.
ExtremeFields extreme_fields(const SystemConfig& cfg, const ForcingBounds& bounds, const PhaseState& s);

/// Real roots of a polynomial c_0 + c_1 x + ... + c_n x^n in ascending order.
/// Roots are isolated between critical points and refined by bisection.
std::vector<double> polynomial_real_roots(std::span<const double> coeffs);
double polynomial_eval(std::span<const double> coeffs, double x);

}  // namespace qattract
