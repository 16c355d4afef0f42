#pragma once

#include <optional>
#include <vector>

#include "qattract/model.hpp"
#include "qattract/region.hpp"
#include "qattract/report.hpp"

namespace qattract {

/// Hexagon GHIJKL for the even case x'' + gamma x' + x^{2p} = f(omega t),
/// f^{2p} <= f(omega t) <= F^{2p}. HI: y = lambda1 (F^{2p} - x^{2p}) on [0, F];
/// KL: y = lambda2 (f^{2p} - (x + 2f)^{2p}) on [-f, 0].
struct HexagonA {
  int p = 1;
  double f_pow = 0.0;
  double F_pow = 0.0;
  double gamma = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec2 G, H, I, J, K, L;

  bool contains(Vec2 s, double slack = 0.0) const;
  RegionSpec region() const;
};

struct HexagonThreshold {
  double reality = 0.0;  // 8 p F^{2p-1}
  double below = 0.0;    // p (F^{2p} - f^{2p}) / (f (1 - 4^{-p}))
  double required() const { return reality > below ? reality : below; }
};

HexagonThreshold hexagon_threshold(int p, double f_pow, double F_pow);

/// GammaBelowThreshold (both operands in the message) when gamma^2 is too small.
HexagonA build_hexagon(int p, double f_pow, double F_pow, double gamma);

/// Same vertex construction with explicit lambdas, no threshold check.
HexagonA hexagon_with(int p, double f_pow, double F_pow, double gamma, double lambda1, double lambda2);

/// h(x) = 2p x^{2p-1} (F^{2p} - x^{2p}) - gamma^2 (F^{2p} - f^{2p}).
double h_blowup(int p, double f_pow, double F_pow, double gamma, double x);

/// xi > F with h(-xi) = 0.
double solve_xi_root(int p, double f_pow, double F_pow, double gamma);

/// Sign changes of h on n uniform points of [x_lo, -F].
int count_h_sign_changes(int p, double f_pow, double F_pow, double gamma, double x_lo, int n = 1000);

/// L(v) = (X0 + v^2)^{2p} - F^{2p} - b v^3 (3 b v / 2 + gamma).
double blowup_L(int p, double F_pow, double gamma, double X0, double b, double v);

/// 0.9 times the largest b allowed by the discriminant of M(v), halved until
/// the curve and L(v) checks pass. NoValidB when nothing survives.
double choose_b(int p, double F_pow, double gamma, double X0);

/// t_inf = 2 / (b sqrt(u0)).
double blowup_time_bound(double b, double u0);

struct BlowupRegion {
  int p = 1;
  double f_pow = 0.0;
  double F_pow = 0.0;
  double gamma = 0.0;
  double xi_root = 0.0;
  double X0 = 0.0;
  double b = 0.0;
  double rho = 1.5;

  double lower(double x) const;  // (F^{2p} - x^{2p}) / gamma
  double upper(double x) const;  // -b (-X0 - x)^{3/2} for x <= -X0, else 0
  /// Member of the blow-up subset S(-X0).
  bool contains(Vec2 s, double slack = 0.0) const;
  /// Member of the invariant set J.
  bool in_J(Vec2 s, double slack = 0.0) const;
  /// Rendered with the window [x_min, -xi]; x_min defaults to -50 X0.
  RegionSpec S_region(double x_min = 0.0) const;
  RegionSpec J_region(double x_min = 0.0) const;
};

/// InvalidArgument when X0 < xi_root.
BlowupRegion build_blowup_region(int p, double f_pow, double F_pow, double gamma, double X0);

/// Level-curve set around (c0, 0) for x'' + gamma x' + x^2 = f,
/// w^2/2 + U(v) <= E with U(v) = v^3/3 + c0 v^2, x = c0 + v, y = w,
/// E = U(-2 c0 + C2 sqrt(eps)).
struct LevelCurveSet {
  double c0 = 0.0;
  double gamma = 0.0;
  double C2 = 1.0;
  double beta = 0.5;
  double energy = 0.0;
  double v_left = 0.0;  // -2 c0 + C2 eps^beta
  double v_right = 0.0;
  std::vector<Vec2> boundary;  // (x, y), clockwise, closed

  double xi_neg_crossing() const { return v_left; }
  bool contains(Vec2 s, double slack = 0.0) const;
  RegionSpec region() const;
};

double U_level_curve(double c0, double v);

/// EmptySet when C2 sqrt(eps) >= 2 c0.
LevelCurveSet build_level_curve_set(double c0, double gamma, double C2 = 1.0, int n_boundary = 720);

/// (+y, -y) on the separatrix y^2 = 2 (2 c0^3 - x^3 + 3 c0^2 x) / 3, x in [-c0, 2 c0].
std::pair<double, double> separatrix_eval(double c0, double x);

struct UnionReport {
  RegionSpec region;
  bool A_outside_D = false;  // A has points outside D
  bool D_outside_A = false;  // D has points outside A
};

/// D0 = D u A. With D null the result is A.
UnionReport union_D0(const LevelCurveSet* level_curve, const HexagonA& hex);

}  // namespace qattract
