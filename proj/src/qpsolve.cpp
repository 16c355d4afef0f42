#include "qattract/qpsolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace qattract {

namespace {

using cplx = std::complex<double>;

// Uniform grid on the d-torus with n points per dimension. Phases are
// reduced to integer multiples of 2 pi / n so every exponential is a table
// lookup.
class TorusGrid {
 public:
  TorusGrid(int dim, int n) : dim_(dim), n_(n) {
    size_ = 1;
    for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);
    roots_.resize(n);
    for (int m = 0; m < n; ++m) roots_[m] = std::polar(1.0, kTwoPi * m / n);
    index_.resize(size_ * dim);
    for (std::size_t j = 0; j < size_; ++j) {
      std::size_t r = j;
      for (int a = 0; a < dim; ++a) {
        index_[j * dim + a] = static_cast<int>(r % n);
        r /= n;
      }
    }
  }

  std::size_t size() const { return size_; }

  cplx phase(std::span<const int> nu, std::size_t j) const {
    long s = 0;
    for (int a = 0; a < dim_; ++a) s += static_cast<long>(nu[a]) * index_[j * dim_ + a];
    s %= n_;
    if (s < 0) s += n_;
    return roots_[s];
  }

  // Real function with coefficients on the lattice, evaluated on the grid.
  std::vector<double> synth(const FourierLattice& lat, const std::vector<cplx>& c) const {
    std::vector<double> out(size_, c[lat.zero_index()].real());
    for (std::size_t i : lat.positive()) {
      if (c[i] == 0.0) continue;
      for (std::size_t j = 0; j < size_; ++j) out[j] += 2.0 * (c[i] * phase(lat[i], j)).real();
    }
    return out;
  }

  cplx project(const std::vector<double>& v, std::span<const int> k) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < size_; ++j) s += v[j] * std::conj(phase(k, j));
    return s / static_cast<double>(size_);
  }

 private:
  int dim_;
  int n_;
  std::size_t size_;
  std::vector<cplx> roots_;
  std::vector<int> index_;
};

// Spectrum G_k of a grid function for |k|_1 <= radius, stored in a dense box.
class BoxSpectrum {
 public:
  BoxSpectrum(const TorusGrid& grid, const std::vector<double>& v, int dim, int radius)
      : dim_(dim), radius_(radius), side_(2 * radius + 1) {
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= side_;
    data_.assign(total, 0.0);
    for (const auto& k : enumerate_lattice(dim, radius)) {
      if (!is_positive(k) && l1_norm(k) != 0) continue;
      const cplx gk = grid.project(v, k);
      data_[key(k)] = gk;
      data_[key(negate(k))] = std::conj(gk);
    }
  }

  cplx at(std::span<const int> k) const {
    if (l1_norm(k) > radius_) return 0.0;
    return data_[key(k)];
  }

 private:
  std::size_t key(std::span<const int> k) const {
    std::size_t s = 0;
    for (int a = dim_ - 1; a >= 0; --a) s = s * side_ + static_cast<std::size_t>(k[a] + radius_);
    return s;
  }

  int dim_;
  int radius_;
  std::size_t side_;
  std::vector<cplx> data_;
};

double relative_scale(const SystemConfig& cfg) { return std::max(1.0, std::abs(cfg.forcing().mean())); }

void check_lattice(const SystemConfig& cfg, const FourierLattice& lattice) {
  if (lattice.dim() != cfg.freq().dim())
    throw Error(ErrorCode::InvalidArgument, "lattice dimension differs from the frequency vector");
  if (lattice.truncation() < cfg.forcing().truncation())
    throw Error(ErrorCode::InvalidArgument, "lattice truncation is below the forcing truncation");
}

cplx linear_symbol(const SystemConfig& cfg, std::span<const int> nu) {
  const double w = cfg.freq().dot(nu);
  return cplx(-w * w, cfg.gamma() * w);
}

struct Balance {
  const SystemConfig& cfg;
  const FourierLattice& lat;
  TorusGrid grid;
  std::vector<cplx> forcing;

  Balance(const SystemConfig& c, const FourierLattice& l)
      : cfg(c), lat(l), grid(l.dim(), torus_grid_size(l.truncation(), c.g().degree())), forcing(l.size()) {
    for (std::size_t i = 0; i < lat.size(); ++i) forcing[i] = cfg.forcing().coeff(lat[i]);
  }

  std::size_t unknowns() const { return lat.size(); }

  std::vector<cplx> unpack(const Eigen::VectorXd& u) const {
    std::vector<cplx> c(lat.size(), 0.0);
    c[lat.zero_index()] = u[0];
    const auto& pos = lat.positive();
    for (std::size_t j = 0; j < pos.size(); ++j) {
      const cplx v(u[1 + 2 * j], u[2 + 2 * j]);
      c[pos[j]] = v;
      c[lat.mirror(pos[j])] = std::conj(v);
    }
    return c;
  }

  Eigen::VectorXd pack(const std::vector<cplx>& c) const {
    Eigen::VectorXd u(lat.size());
    u[0] = c[lat.zero_index()].real();
    const auto& pos = lat.positive();
    for (std::size_t j = 0; j < pos.size(); ++j) {
      u[1 + 2 * j] = c[pos[j]].real();
      u[2 + 2 * j] = c[pos[j]].imag();
    }
    return u;
  }

  // Complex residual on every lattice mode.
  std::vector<cplx> residual(const std::vector<cplx>& c, std::vector<double>* xgrid = nullptr) const {
    std::vector<double> x = grid.synth(lat, c);
    std::vector<double> gx(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) gx[j] = cfg.g().value(x[j]);
    std::vector<cplx> r(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (i != lat.zero_index() && !is_positive(lat[i])) continue;
      r[i] = linear_symbol(cfg, lat[i]) * c[i] + grid.project(gx, lat[i]) - forcing[i];
      r[lat.mirror(i)] = std::conj(r[i]);
    }
    if (xgrid) *xgrid = std::move(x);
    return r;
  }

  Eigen::VectorXd pack_residual(const std::vector<cplx>& r) const {
    Eigen::VectorXd out(lat.size());
    out[0] = r[lat.zero_index()].real();
    const auto& pos = lat.positive();
    for (std::size_t j = 0; j < pos.size(); ++j) {
      out[1 + 2 * j] = r[pos[j]].real();
      out[2 + 2 * j] = r[pos[j]].imag();
    }
    return out;
  }

  static double sup(const std::vector<cplx>& r) {
    double m = 0.0;
    for (const auto& v : r) m = std::max(m, std::abs(v));
    return m;
  }

  Eigen::MatrixXd jacobian(const std::vector<double>& xgrid) const {
    std::vector<double> dg(xgrid.size());
    for (std::size_t j = 0; j < xgrid.size(); ++j) dg[j] = cfg.g().derivative(xgrid[j]);
    const BoxSpectrum G(grid, dg, lat.dim(), 2 * lat.truncation());

    const auto& pos = lat.positive();
    const std::size_t M = lat.size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M, M);
    // Row layout matches pack_residual; complex entry split into Re/Im rows.
    auto put = [&](std::size_t row_mode, std::size_t col, cplx v) {
      if (row_mode == 0) {
        J(0, col) = v.real();
      } else {
        J(2 * row_mode - 1, col) = v.real();
        J(2 * row_mode, col) = v.imag();
      }
    };
    std::vector<const LatticePoint*> rows{&lat[lat.zero_index()]};
    for (std::size_t i : pos) rows.push_back(&lat[i]);

    LatticePoint sum(lat.dim()), diff(lat.dim());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const LatticePoint& nu = *rows[r];
      put(r, 0, G.at(nu));
      for (std::size_t m = 0; m < pos.size(); ++m) {
        const LatticePoint& mu = lat[pos[m]];
        for (int a = 0; a < lat.dim(); ++a) {
          diff[a] = nu[a] - mu[a];
          sum[a] = nu[a] + mu[a];
        }
        const cplx gm = G.at(diff);
        const cplx gp = G.at(sum);
        cplx re_col = gm + gp;
        cplx im_col = cplx(0.0, 1.0) * (gm - gp);
        if (r == m + 1) {
          const cplx L = linear_symbol(cfg, nu);
          re_col += L;
          im_col += cplx(0.0, 1.0) * L;
        }
        put(r, 1 + 2 * m, re_col);
        put(r, 2 + 2 * m, im_col);
      }
    }
    return J;
  }
};

}  // namespace

int torus_grid_size(int n, int degree) { return std::max(4 * (n + 1), (degree + 1) * n + 1); }

std::complex<double> FourierSolution::coeff(std::span<const int> nu) const {
  auto i = lattice.index_of(nu);
  return i ? coeffs[*i] : std::complex<double>(0.0);
}

double FourierSolution::outer_shell_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (l1_norm(lattice[i]) == lattice.truncation()) s += std::abs(coeffs[i]);
  }
  return s;
}

SolutionPoint eval_solution_full(const FourierSolution& sol, double t) {
  SolutionPoint p;
  p.x = sol.coeffs[sol.lattice.zero_index()].real();
  for (std::size_t i : sol.lattice.positive()) {
    const double w = sol.freq.dot(sol.lattice[i]);
    const cplx v = sol.coeffs[i] * std::polar(1.0, w * t);
    p.x += 2.0 * v.real();
    p.dx -= 2.0 * w * v.imag();
    p.ddx -= 2.0 * w * w * v.real();
  }
  return p;
}

Vec2 eval_solution(const FourierSolution& sol, double t) {
  const SolutionPoint p = eval_solution_full(sol, t);
  return {p.x, p.dx};
}

double orbit_distance(const FourierSolution& sol, const PhaseState& s) {
  const Vec2 x = eval_solution(sol, s.t);
  return std::hypot(s.x - x.x, s.y - x.y);
}

FourierSolution harmonic_balance_solve(const SystemConfig& cfg, const FourierLattice& lattice,
                                       const std::optional<FourierSolution>& guess, const NewtonOptions& opts) {
  check_lattice(cfg, lattice);
  const double c0 = equilibrium_c0(cfg.g(), cfg.forcing().mean());
  const Balance bal(cfg, lattice);
  const double scale = relative_scale(cfg);
  const double tol = opts.tolerance * scale;

  std::vector<cplx> c(lattice.size(), 0.0);
  if (guess) {
    for (std::size_t i = 0; i < lattice.size(); ++i) c[i] = guess->coeff(lattice[i]);
  } else {
    c[lattice.zero_index()] = c0;
  }
  Eigen::VectorXd u = bal.pack(c);

  std::vector<double> xgrid;
  std::vector<cplx> r = bal.residual(bal.unpack(u), &xgrid);
  double res = Balance::sup(r);
  std::vector<double> history{res};
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (!std::isfinite(res)) break;
    if (res <= 1e-4 * tol) break;
    const Eigen::MatrixXd J = bal.jacobian(xgrid);
    const Eigen::VectorXd delta = J.partialPivLu().solve(-bal.pack_residual(r));
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings && delta.allFinite(); ++h, lambda *= 0.5) {
      const Eigen::VectorXd trial = u + lambda * delta;
      std::vector<double> tgrid;
      std::vector<cplx> tr = bal.residual(bal.unpack(trial), &tgrid);
      const double tres = Balance::sup(tr);
      if (tres < res) {
        const double gain = res / tres;
        u = trial;
        r = std::move(tr);
        xgrid = std::move(tgrid);
        res = tres;
        accepted = true;
        if (res <= tol && gain < 2.0) it = opts.max_iterations;  // stagnated at roundoff
        break;
      }
    }
    history.push_back(res);
    if (!accepted && res <= tol) break;
    const std::size_t n = history.size();
    if (res > tol && n > 5 && res > history[n - 6] / 10.0)
      throw Error(ErrorCode::NewtonDiverged, "residual " + std::to_string(res) +
                                                 " not reduced 10x over 5 damped Newton steps");
  }
  if (!(res <= tol))
    throw Error(ErrorCode::NewtonDiverged, "Newton stopped with residual " + std::to_string(res));

  FourierSolution sol{lattice, bal.unpack(u), cfg.freq(), cfg.gamma(), res, std::min(it, opts.max_iterations)};
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    assert(sol.coeffs[lattice.mirror(i)] == std::conj(sol.coeffs[i]));
  }
  return sol;
}

int default_truncation(const SystemConfig& cfg) {
  const int nf = cfg.forcing().truncation();
  return cfg.freq().dim() == 1 ? std::max(2 * nf, 16) : nf + 8;
}

FourierSolution harmonic_balance_auto(const SystemConfig& cfg, const NewtonOptions& opts) {
  int n = default_truncation(cfg);
  FourierSolution sol = harmonic_balance_solve(cfg, FourierLattice(cfg.freq().dim(), n), std::nullopt, opts);
  for (int k = 0; k < 3 && sol.outer_shell_mass() >= 1e-12; ++k) {
    n *= 2;
    FourierLattice lat(cfg.freq().dim(), n);
    if (lat.size() > 4001) break;  // dense Jacobian would not fit comfortably
    sol = harmonic_balance_solve(cfg, lat, sol, opts);
  }
  return sol;
}

double harmonic_balance_residual(const SystemConfig& cfg, const FourierSolution& sol) {
  check_lattice(cfg, sol.lattice);
  const Balance bal(cfg, sol.lattice);
  return Balance::sup(bal.residual(sol.coeffs));
}

// ------------------------------------------------------------------- series

double PerturbationSeries::term_value(int k, double t) const {
  const auto& c = terms.at(k);
  double x = c[lattice.zero_index()].real();
  for (std::size_t i : lattice.positive()) x += 2.0 * (c[i] * std::polar(1.0, freq.dot(lattice[i]) * t)).real();
  return x;
}

FourierSolution PerturbationSeries::partial_sum(double gamma, int order) const {
  if (order < 0 || order > this->order())
    throw Error(ErrorCode::InvalidArgument, "partial sum order out of range");
  std::vector<cplx> c(lattice.size(), 0.0);
  double ek = 1.0;
  for (int k = 0; k <= order; ++k, ek /= gamma) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += ek * terms[k][i];
  }
  return FourierSolution{lattice, std::move(c), freq, gamma, std::numeric_limits<double>::quiet_NaN(), 0};
}

PerturbationSeries perturbation_series(const SystemConfig& cfg, const FourierLattice& lattice, int K) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "series order must be >= 1");
  check_lattice(cfg, lattice);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (i != lattice.zero_index() && std::abs(cfg.freq().dot(lattice[i])) < 1e-12)
      throw Error(ErrorCode::SmallDivisorOverflow, "|omega.nu| < 1e-12 on the lattice");
  }
  const double c0 = equilibrium_c0(cfg.g(), cfg.forcing().mean());
  const std::vector<double> b = cfg.g().taylor_at(c0);
  const double gp = b[1];
  const int deg = cfg.g().degree();
  const TorusGrid grid(lattice.dim(), torus_grid_size(lattice.truncation(), deg));
  const std::size_t M = lattice.size();
  const std::size_t zero = lattice.zero_index();

  PerturbationSeries s{lattice, cfg.freq(), c0, {}};
  s.terms.emplace_back(M, 0.0);
  s.terms[0][zero] = c0;
  std::vector<std::vector<double>> on_grid(1);  // x^(k) on the grid, k >= 1

  // Coefficient of eps^m in g(c0 + sum_{k>=1} eps^k x^(k)), pointwise.
  auto g_order = [&](int m) {
    std::vector<double> out(grid.size(), 0.0);
    if (m == 0) {
      std::fill(out.begin(), out.end(), b[0]);
      return out;
    }
    std::vector<double> base(m + 1), pw(m + 1), next(m + 1);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      base[0] = 0.0;
      for (int k = 1; k <= m; ++k) base[k] = on_grid[k][j];
      pw = base;
      double acc = b[1] * pw[m];
      for (int n = 2; n <= deg; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int a = 1; a <= m; ++a) {
          for (int c = 1; a + c <= m; ++c) next[a + c] += pw[a] * base[c];
        }
        pw.swap(next);
        acc += b[n] * pw[m];
      }
      out[j] = acc;
    }
    return out;
  };

  for (int k = 1; k <= K; ++k) {
    std::vector<cplx> xk(M, 0.0);
    const std::vector<double> gprev = g_order(k - 1);
    for (std::size_t i = 0; i < M; ++i) {
      if (i == zero || !is_positive(lattice[i])) continue;
      const cplx iw(0.0, cfg.freq().dot(lattice[i]));
      cplx rhs = -(iw * iw) * s.terms[k - 1][i] - grid.project(gprev, lattice[i]);
      if (k == 1) rhs += cfg.forcing().coeff(lattice[i]);
      xk[i] = rhs / iw;
      xk[lattice.mirror(i)] = std::conj(xk[i]);
    }
    on_grid.push_back(grid.synth(lattice, xk));
    // Solvability at the next order fixes the zero mode.
    const std::vector<double> gk = g_order(k);
    double mean = 0.0;
    for (double v : gk) mean += v;
    mean /= static_cast<double>(gk.size());
    xk[zero] = -mean / gp;
    for (double& v : on_grid.back()) v += xk[zero].real();
    s.terms.push_back(std::move(xk));
  }
  return s;
}

std::optional<double> empirical_min_gamma(const SystemConfig& cfg, const std::vector<double>& gammas) {
  std::optional<double> best;
  for (double g : gammas) {
    try {
      const SystemConfig c = cfg.with_gamma(g);
      harmonic_balance_solve(c, FourierLattice(c.freq().dim(), default_truncation(c)));
      best = g;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NewtonDiverged) throw;
      break;
    }
  }
  return best;
}

}  // namespace qattract
