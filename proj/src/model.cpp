#include "qattract/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <limits>
#include <map>

namespace qattract {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoTransversalRoot: return "NoTransversalRoot";
    case ErrorCode::WrongNonlinearity: return "WrongNonlinearity";
    case ErrorCode::MissingEvent: return "MissingEvent";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::SmallDivisorOverflow: return "SmallDivisorOverflow";
    case ErrorCode::DegenerateQ: return "DegenerateQ";
    case ErrorCode::SignChange: return "SignChange";
    case ErrorCode::GammaTooSmall: return "GammaTooSmall";
    case ErrorCode::GammaBelowThreshold: return "GammaBelowThreshold";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NoValidB: return "NoValidB";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

const char* to_string(Nonlinearity::Kind kind) {
  switch (kind) {
    case Nonlinearity::Kind::OddMonomial: return "odd";
    case Nonlinearity::Kind::EvenMonomial: return "even";
    case Nonlinearity::Kind::Polynomial: return "polynomial";
  }
  return "unknown";
}

// ---------------------------------------------------------------- frequency

FrequencyVector::FrequencyVector(std::vector<double> omega, double c0_dioph, double tau)
    : omega_(std::move(omega)), c0_(c0_dioph), tau_(tau) {
  if (omega_.empty()) throw Error(ErrorCode::InvalidArgument, "frequency vector is empty");
  bool nonzero = false;
  for (double w : omega_) {
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "non-finite frequency");
    nonzero = nonzero || w != 0.0;
  }
  if (!nonzero) throw Error(ErrorCode::InvalidArgument, "frequency vector is zero");
  if (!(c0_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "Diophantine constant C0 must be positive");
  if (!(tau_ >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Diophantine exponent tau must be >= 0");
  if (dim() > 1 && !(tau_ > dim() - 1))
    throw Error(ErrorCode::InvalidArgument, "Diophantine exponent tau must exceed d - 1");
}

double FrequencyVector::dot(std::span<const int> nu) const {
  double s = 0.0;
  for (std::size_t i = 0; i < omega_.size(); ++i) s += omega_[i] * nu[i];
  return s;
}

double FrequencyVector::l1() const {
  double s = 0.0;
  for (double w : omega_) s += std::abs(w);
  return s;
}

// ------------------------------------------------------------------ forcing

ForcingSpectrum::ForcingSpectrum(int dim, std::vector<ForcingMode> modes, double envelope_F,
                                 double envelope_xi, bool truncated)
    : dim_(dim), envelope_F_(envelope_F), envelope_xi_(envelope_xi), truncated_(truncated) {
  if (dim_ < 1) throw Error(ErrorCode::InvalidArgument, "forcing dimension must be >= 1");
  if (!(envelope_F_ > 0.0) || !(envelope_xi_ > 0.0))
    throw Error(ErrorCode::InvalidArgument, "forcing envelope constants must be positive");

  std::map<LatticePoint, std::complex<double>> by_nu;
  double scale = 0.0;
  for (auto& m : modes) {
    if (static_cast<int>(m.nu.size()) != dim_)
      throw Error(ErrorCode::InvalidArgument, "forcing mode has wrong dimension");
    if (!std::isfinite(m.amplitude.real()) || !std::isfinite(m.amplitude.imag()))
      throw Error(ErrorCode::InvalidArgument, "non-finite forcing amplitude");
    if (!by_nu.emplace(m.nu, m.amplitude).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate forcing mode");
    scale = std::max(scale, std::abs(m.amplitude));
  }
  const double tol = 1e-14 * std::max(1.0, scale);
  for (const auto& [nu, a] : by_nu) {
    auto it = by_nu.find(negate(nu));
    if (it == by_nu.end())
      throw Error(ErrorCode::InvalidArgument, "forcing spectrum lacks the mirror of a mode");
    if (std::abs(it->second - std::conj(a)) > tol)
      throw Error(ErrorCode::InvalidArgument, "forcing spectrum violates f_{-nu} = conj(f_nu)");
    const int n1 = l1_norm(nu);
    if (std::abs(a) > envelope_F_ * std::exp(-envelope_xi_ * n1) * (1.0 + 1e-12))
      throw Error(ErrorCode::InvalidArgument, "forcing mode exceeds the decay envelope");
    truncation_ = std::max(truncation_, n1);
  }
  auto zero = by_nu.find(LatticePoint(dim_, 0));
  if (zero == by_nu.end() || zero->second.real() == 0.0)
    throw Error(ErrorCode::InvalidArgument, "forcing average f_0 must be nonzero");
  mean_ = zero->second.real();
  zero->second = mean_;

  // Store in lattice order so evaluation is deterministic.
  for (const auto& nu : enumerate_lattice(dim_, truncation_)) {
    auto it = by_nu.find(nu);
    if (it != by_nu.end()) modes_.push_back({nu, it->second});
  }
}

ForcingSpectrum ForcingSpectrum::constant(double f0) {
  return ForcingSpectrum(1, {{{0}, f0}}, std::abs(f0), 1.0);
}

ForcingSpectrum ForcingSpectrum::single_harmonic(double f0, double a, double b) {
  std::vector<ForcingMode> modes{{{0}, f0}};
  if (a != 0.0 || b != 0.0) {
    const std::complex<double> c(a / 2.0, -b / 2.0);
    modes.push_back({{1}, c});
    modes.push_back({{-1}, std::conj(c)});
  }
  return ForcingSpectrum(1, modes, fit_envelope(modes, 1.0), 1.0);
}

double ForcingSpectrum::fit_envelope(std::span<const ForcingMode> modes, double xi) {
  double F = 0.0;
  for (const auto& m : modes) F = std::max(F, std::abs(m.amplitude) * std::exp(xi * l1_norm(m.nu)));
  return F;
}

double ForcingSpectrum::abs_sum() const {
  double s = 0.0;
  for (const auto& m : modes_) s += std::abs(m.amplitude);
  return s;
}

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of nu in Z^d with |nu|_1 == n.
double shell_count(int d, int n) {
  if (n == 0) return 1.0;
  double c = 0.0;
  for (int k = 1; k <= std::min(d, n); ++k) c += std::ldexp(binomial(d, k) * binomial(n - 1, k - 1), k);
  return c;
}

}  // namespace

double ForcingSpectrum::tail_bound() const {
  if (!truncated_) return 0.0;
  double sum = 0.0;
  for (int n = truncation_ + 1; n < truncation_ + 100000; ++n) {
    const double term = shell_count(dim_, n) * envelope_F_ * std::exp(-envelope_xi_ * n);
    sum += term;
    if (n > truncation_ + 10 && term < 1e-18 * std::max(sum, 1e-300)) break;
  }
  return sum;
}

std::complex<double> ForcingSpectrum::coeff(std::span<const int> nu) const {
  for (const auto& m : modes_) {
    if (std::equal(m.nu.begin(), m.nu.end(), nu.begin(), nu.end())) return m.amplitude;
  }
  return 0.0;
}

double forcing_on_torus(const ForcingSpectrum& forcing, std::span<const double> psi) {
  double re = 0.0;
  double im = 0.0;
  for (const auto& m : forcing.modes()) {
    double phase = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) phase += m.nu[i] * psi[i];
    const std::complex<double> term = m.amplitude * std::polar(1.0, phase);
    re += term.real();
    im += term.imag();
  }
  assert(std::abs(im) <= 1e-12 * forcing.abs_sum() + 1e-300);
  (void)im;
  return re;
}

double forcing_eval(const ForcingSpectrum& forcing, const FrequencyVector& freq, double t) {
  if (freq.dim() != forcing.dim())
    throw Error(ErrorCode::InvalidArgument, "forcing and frequency dimensions differ");
  thread_local std::vector<double> psi;
  psi.resize(freq.dim());
  for (int i = 0; i < freq.dim(); ++i) psi[i] = freq.omega()[i] * t;
  return forcing_on_torus(forcing, psi);
}

namespace {

// Newton polish of a torus extremum; sign = +1 for maxima, -1 for minima.
double polish_extremum(const ForcingSpectrum& forcing, std::vector<double> psi, double sign) {
  const int d = forcing.dim();
  double best = sign * forcing_on_torus(forcing, psi);
  for (int iter = 0; iter < 40; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);
    for (const auto& m : forcing.modes()) {
      double phase = 0.0;
      for (int i = 0; i < d; ++i) phase += m.nu[i] * psi[i];
      const std::complex<double> term = m.amplitude * std::polar(1.0, phase);
      for (int a = 0; a < d; ++a) {
        grad[a] -= sign * m.nu[a] * term.imag();
        for (int b = 0; b < d; ++b) hess(a, b) -= sign * m.nu[a] * m.nu[b] * term.real();
      }
    }
    if (grad.norm() < 1e-15) break;
    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    if (!step.allFinite() || step.dot(grad) <= 0.0) step = 1e-3 * grad;
    bool improved = false;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> trial = psi;
      for (int i = 0; i < d; ++i) trial[i] += step[i];
      const double v = sign * forcing_on_torus(forcing, trial);
      if (v >= best) {
        improved = v > best;
        best = v;
        psi = trial;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return sign * best;
}

}  // namespace

ForcingBounds compute_forcing_bounds(const ForcingSpectrum& forcing, int p) {
  const int d = forcing.dim();
  const auto per_dim = static_cast<std::size_t>(
      std::max(4.0, std::floor(std::pow(65536.0, 1.0 / d) + 1e-9)));
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= per_dim;

  std::vector<double> psi(d), arg_min(d), arg_max(d);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t r = k;
    for (int i = 0; i < d; ++i) {
      psi[i] = kTwoPi * static_cast<double>(r % per_dim) / static_cast<double>(per_dim);
      r /= per_dim;
    }
    const double v = forcing_on_torus(forcing, psi);
    if (v < lo) lo = v, arg_min = psi;
    if (v > hi) hi = v, arg_max = psi;
  }
  lo = std::min(lo, polish_extremum(forcing, arg_min, -1.0));
  hi = std::max(hi, polish_extremum(forcing, arg_max, +1.0));

  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * forcing.abs_sum() + forcing.tail_bound();
  ForcingBounds b;
  b.f_low = lo - slack;
  b.f_up = hi + slack;
  if (p > 0 && b.f_low > 0.0) {
    b.f_pow = std::pow(b.f_low, 1.0 / (2.0 * p));
    b.F_pow = std::pow(b.f_up, 1.0 / (2.0 * p));
  }
  return b;
}

ForcingBounds ForcingBounds::from_powers(int p, double f_pow, double F_pow) {
  ForcingBounds b;
  b.f_pow = f_pow;
  b.F_pow = F_pow;
  b.f_low = ipow(f_pow, 2 * p);
  b.f_up = ipow(F_pow, 2 * p);
  return b;
}

double diophantine_margin(const FrequencyVector& freq, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Diophantine scan radius must be >= 1");
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& nu : enumerate_lattice(freq.dim(), n)) {
    if (!is_positive(nu)) continue;
    const double k = l1_norm(nu);
    margin = std::min(margin, std::abs(freq.dot(nu)) * std::pow(k, freq.tau()) / freq.c0_dioph());
  }
  return margin;
}

// ------------------------------------------------------------- nonlinearity

Nonlinearity::Nonlinearity(Kind kind, int p, std::vector<double> poly)
    : kind_(kind), p_(p), poly_(std::move(poly)) {}

Nonlinearity Nonlinearity::odd_monomial(int p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "odd monomial needs p >= 1");
  std::vector<double> c(2 * p + 2, 0.0);
  c.back() = 1.0;
  return Nonlinearity(Kind::OddMonomial, p, std::move(c));
}

Nonlinearity Nonlinearity::even_monomial(int p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "even monomial needs p >= 1");
  std::vector<double> c(2 * p + 1, 0.0);
  c.back() = 1.0;
  return Nonlinearity(Kind::EvenMonomial, p, std::move(c));
}

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs) {
  if (coeffs.size() < 3 || coeffs.size() % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "polynomial needs 2p+1 coefficients a_1..a_{2p+1}, p >= 1");
  if (!(coeffs.back() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "polynomial leading coefficient must be positive");
  for (double a : coeffs) {
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "non-finite polynomial coefficient");
  }
  const int p = static_cast<int>(coeffs.size() - 1) / 2;
  std::vector<double> c{0.0};
  c.insert(c.end(), coeffs.begin(), coeffs.end());
  return Nonlinearity(Kind::Polynomial, p, std::move(c));
}

double Nonlinearity::value(double x) const {
  if (kind_ != Kind::Polynomial) return ipow(x, degree());
  return polynomial_eval(poly_, x);
}

double Nonlinearity::derivative(double x) const {
  if (kind_ != Kind::Polynomial) return degree() * ipow(x, degree() - 1);
  double r = 0.0;
  for (int k = degree(); k >= 1; --k) r = r * x + k * poly_[k];
  return r;
}

double Nonlinearity::antiderivative(double x) const {
  double r = 0.0;
  for (int k = degree(); k >= 0; --k) r = r * x + poly_[k] / (k + 1);
  return r * x;
}

std::vector<double> Nonlinearity::taylor_at(double c) const {
  // Repeated synthetic division by (x - c).
  std::vector<double> a = poly_;
  const int n = degree();
  for (int k = 0; k <= n; ++k) {
    for (int j = n - 1; j >= k; --j) a[j] += c * a[j + 1];
  }
  return a;
}

// --------------------------------------------------------------- polynomials

double polynomial_eval(std::span<const double> coeffs, double x) {
  double r = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) r = r * x + coeffs[k];
  return r;
}

std::vector<double> polynomial_real_roots(std::span<const double> coeffs) {
  std::vector<double> c(coeffs.begin(), coeffs.end());
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() <= 1) return {};
  if (c.size() == 2) return {-c[0] / c[1]};

  std::vector<double> deriv(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) deriv[k - 1] = k * c[k];
  std::vector<double> crit = polynomial_real_roots(deriv);

  double bound = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) bound = std::max(bound, std::abs(c[k] / c.back()));
  bound += 1.0;

  std::vector<double> breaks{-bound};
  for (double x : crit) {
    if (x > -bound && x < bound) breaks.push_back(x);
  }
  breaks.push_back(bound);

  std::vector<double> roots;
  auto push = [&roots](double r) {
    if (roots.empty() || std::abs(r - roots.back()) > 1e-12 * std::max(1.0, std::abs(r))) roots.push_back(r);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i];
    double b = breaks[i + 1];
    double fa = polynomial_eval(c, a);
    const double fb = polynomial_eval(c, b);
    if (fa == 0.0) {
      push(a);
      continue;
    }
    if ((fa < 0.0) == (fb < 0.0) || fb == 0.0) continue;
    for (int it = 0; it < 2000; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double fm = polynomial_eval(c, m);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    push(0.5 * (a + b));
  }
  if (polynomial_eval(c, breaks.back()) == 0.0) push(breaks.back());
  return roots;
}

std::vector<double> equilibrium_roots(const Nonlinearity& g, double f0) {
  const double scale = std::max(1.0, std::abs(f0));
  auto polish = [&](double c) {
    for (int i = 0; i < 3; ++i) {
      const double dg = g.derivative(c);
      if (dg == 0.0) break;
      const double next = c - (g.value(c) - f0) / dg;
      if (std::abs(g.value(next) - f0) >= std::abs(g.value(c) - f0)) break;
      c = next;
    }
    return c;
  };
  std::vector<double> candidates;
  switch (g.kind()) {
    case Nonlinearity::Kind::OddMonomial:
      candidates.push_back(std::copysign(std::pow(std::abs(f0), 1.0 / g.degree()), f0));
      break;
    case Nonlinearity::Kind::EvenMonomial:
      if (f0 > 0.0) {
        const double r = std::pow(f0, 1.0 / g.degree());
        candidates = {-r, r};
      }
      break;
    case Nonlinearity::Kind::Polynomial: {
      std::vector<double> c = g.coefficients();
      c[0] -= f0;
      candidates = polynomial_real_roots(c);
      break;
    }
  }
  std::vector<double> roots;
  for (double c : candidates) {
    c = polish(c);
    const double dg = g.derivative(c);
    if (std::abs(dg) > 1e-12 * scale && std::abs(g.value(c) - f0) <= 1e-12 * scale) roots.push_back(c);
  }
  return roots;
}

double equilibrium_c0(const Nonlinearity& g, double f0) {
  const std::vector<double> roots = equilibrium_roots(g, f0);
  if (roots.empty())
    throw Error(ErrorCode::NoTransversalRoot, "no real c0 with g(c0) = f0 and g'(c0) != 0");
  if (g.kind() == Nonlinearity::Kind::EvenMonomial) return roots.back();
  double best = roots.front();
  for (double c : roots) {
    if (std::abs(g.derivative(c)) >= std::abs(g.derivative(best))) best = c;
  }
  return best;
}

// ------------------------------------------------------------------- system

SystemConfig::SystemConfig(ForcingSpectrum forcing, FrequencyVector freq, Nonlinearity g, double gamma)
    : forcing_(std::move(forcing)), freq_(std::move(freq)), g_(std::move(g)), gamma_(gamma),
      epsilon_(1.0 / gamma) {
  if (forcing_.dim() != freq_.dim())
    throw Error(ErrorCode::InvalidArgument, "forcing and frequency dimensions differ");
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_))
    throw Error(ErrorCode::InvalidArgument, "dissipation gamma must be positive");
}

SystemConfig SystemConfig::with_gamma(double gamma) const {
  return SystemConfig(forcing_, freq_, g_, gamma);
}

Vec2 frozen_field(const Nonlinearity& g, double gamma, double forcing_value, Vec2 s) {
  return {s.y, forcing_value - gamma * s.y - g.value(s.x)};
}

Vec2 vector_field(const SystemConfig& cfg, const PhaseState& s) {
  return frozen_field(cfg.g(), cfg.gamma(), forcing_eval(cfg.forcing(), cfg.freq(), s.t), {s.x, s.y});
}

ExtremeFields extreme_fields(const SystemConfig& cfg, const ForcingBounds& bounds, const PhaseState& s) {
  if (cfg.g().kind() != Nonlinearity::Kind::EvenMonomial)
    throw Error(ErrorCode::WrongNonlinearity, "extreme fields need an even monomial nonlinearity");
  return {frozen_field(cfg.g(), cfg.gamma(), bounds.f_low, {s.x, s.y}),
          frozen_field(cfg.g(), cfg.gamma(), bounds.f_up, {s.x, s.y})};
}

}  // namespace qattract
