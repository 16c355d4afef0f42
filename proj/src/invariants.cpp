#include "qattract/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qattract {

// ------------------------------------------------------------------ hexagon

HexagonThreshold hexagon_threshold(int p, double f_pow, double F_pow) {
  HexagonThreshold t;
  t.reality = 8.0 * p * ipow(F_pow, 2 * p - 1);
  t.below = p * (ipow(F_pow, 2 * p) - ipow(f_pow, 2 * p)) / (f_pow * (1.0 - std::ldexp(1.0, -2 * p)));
  return t;
}

HexagonA hexagon_with(int p, double f_pow, double F_pow, double gamma, double lambda1, double lambda2) {
  HexagonA A;
  A.p = p;
  A.f_pow = f_pow;
  A.F_pow = F_pow;
  A.gamma = gamma;
  A.lambda1 = lambda1;
  A.lambda2 = lambda2;
  const double yH = lambda1 * ipow(F_pow, 2 * p);
  const double yK = -lambda2 * ipow(f_pow, 2 * p) * (std::ldexp(1.0, 2 * p) - 1.0);
  A.G = {-f_pow, yH};
  A.H = {0.0, yH};
  A.I = {F_pow, 0.0};
  A.J = {F_pow, yK};
  A.K = {0.0, yK};
  A.L = {-f_pow, 0.0};
  return A;
}

HexagonA build_hexagon(int p, double f_pow, double F_pow, double gamma) {
  if (p < 1 || !(f_pow > 0.0) || !(F_pow >= f_pow) || !(gamma > 0.0))
    throw Error(ErrorCode::InvalidArgument, "hexagon needs p >= 1, F >= f > 0 and gamma > 0");
  const HexagonThreshold th = hexagon_threshold(p, f_pow, F_pow);
  if (gamma * gamma < th.required()) {
    std::ostringstream msg;
    msg << "gamma^2 = " << gamma * gamma << " below max(8pF^{2p-1} = " << th.reality
        << ", p(F^{2p}-f^{2p})/(f(1-4^-p)) = " << th.below << ")";
    throw Error(ErrorCode::GammaBelowThreshold, msg.str());
  }
  const double q = 4.0 * p * ipow(F_pow, 2 * p - 1);
  const double disc = std::max(0.0, 1.0 - th.reality / (gamma * gamma));
  const double lambda1 = gamma / q * (1.0 + std::sqrt(disc));
  const double lambda2 = gamma / (2.0 * p * ipow(2.0 * f_pow, 2 * p - 1));
  return hexagon_with(p, f_pow, F_pow, gamma, lambda1, lambda2);
}

bool HexagonA::contains(Vec2 s, double slack) const {
  if (s.x < -f_pow - slack || s.x > F_pow + slack) return false;
  const double top = s.x <= 0.0 ? H.y : lambda1 * (ipow(F_pow, 2 * p) - ipow(s.x, 2 * p));
  const double bottom =
      s.x <= 0.0 ? lambda2 * (ipow(f_pow, 2 * p) - ipow(s.x + 2.0 * f_pow, 2 * p)) : K.y;
  return s.y <= top + slack && s.y >= bottom - slack;
}

RegionSpec HexagonA::region() const {
  RegionSpec r;
  r.kind = "hexagon";
  r.arcs.push_back(Arc::segment(G, H, "GH"));
  r.arcs.push_back(Arc::power(lambda1 * ipow(F_pow, 2 * p), -lambda1, 0.0, 2 * p, 0.0, F_pow, "HI"));
  r.arcs.push_back(Arc::segment(I, J, "IJ"));
  r.arcs.push_back(Arc::segment(J, K, "JK"));
  r.arcs.push_back(
      Arc::power(lambda2 * ipow(f_pow, 2 * p), -lambda2, 2.0 * f_pow, 2 * p, 0.0, -f_pow, "KL"));
  r.arcs.push_back(Arc::segment(L, G, "LG"));
  const HexagonA self = *this;
  r.member = [self](Vec2 s, double slack) { return self.contains(s, slack); };
  r.params = {{"p", p},       {"f", f_pow},         {"F", F_pow},
              {"gamma", gamma}, {"lambda1", lambda1}, {"lambda2", lambda2}};
  return r;
}

// ------------------------------------------------------------------ blow-up

double h_blowup(int p, double f_pow, double F_pow, double gamma, double x) {
  const double F2p = ipow(F_pow, 2 * p);
  return 2.0 * p * ipow(x, 2 * p - 1) * (F2p - ipow(x, 2 * p)) - gamma * gamma * (F2p - ipow(f_pow, 2 * p));
}

double solve_xi_root(int p, double f_pow, double F_pow, double gamma) {
  if (p < 1 || !(f_pow > 0.0) || !(F_pow > f_pow))
    throw Error(ErrorCode::InvalidArgument, "root of h needs p >= 1 and F > f > 0");
  auto h = [&](double x) { return h_blowup(p, f_pow, F_pow, gamma, x); };
  double hi = -F_pow;
  double lo = -2.0 * F_pow;
  int guard = 0;
  while (h(lo) <= 0.0) {
    hi = lo;
    lo *= 2.0;
    if (++guard > 200) throw Error(ErrorCode::BracketFailure, "h has no sign change left of -F");
  }
  if (!(h(hi) < 0.0)) throw Error(ErrorCode::BracketFailure, "h(-F) is not negative");
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return -0.5 * (lo + hi);
}

int count_h_sign_changes(int p, double f_pow, double F_pow, double gamma, double x_lo, int n) {
  int changes = 0;
  int prev = 0;
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + (-F_pow - x_lo) * i / std::max(1, n - 1);
    const double v = h_blowup(p, f_pow, F_pow, gamma, x);
    const int s = v > 0.0 ? 1 : v < 0.0 ? -1 : 0;
    if (s != 0) {
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
  }
  return changes;
}

double blowup_L(int p, double F_pow, double gamma, double X0, double b, double v) {
  return ipow(X0 + v * v, 2 * p) - ipow(F_pow, 2 * p) - b * v * v * v * (1.5 * b * v + gamma);
}

double blowup_time_bound(double b, double u0) {
  if (!(b > 0.0) || !(u0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "blow-up bound needs b > 0 and u0 > 0");
  return 2.0 / (b * std::sqrt(u0));
}

namespace {

bool b_is_valid(int p, double F_pow, double gamma, double X0, double b) {
  const double c = p * ipow(F_pow, 2 * p - 2);
  const double a2 = c - 1.5 * b * b;
  if (!(a2 > 0.0)) return false;
  if (gamma * gamma * b * b > 8.0 * a2 * X0 * c) return false;
  const double F2p = ipow(F_pow, 2 * p);
  for (int i = 0; i <= 10000; ++i) {
    const double u = std::pow(10.0, -6.0 + (std::log10(999.0 * X0) + 6.0) * i / 10000.0);
    const double x = -X0 - u;
    const double upper = -b * std::pow(u, 1.5);
    const double lower = (F2p - ipow(x, 2 * p)) / gamma;
    if (!(upper > lower)) return false;
  }
  for (int i = 0; i <= 1000; ++i) {
    if (blowup_L(p, F_pow, gamma, X0, b, 0.1 * i) < 0.0) return false;
    if (blowup_L(p, F_pow, gamma, X0, b, std::pow(10.0, -3.0 + 6.0 * i / 1000.0)) < 0.0) return false;
  }
  return true;
}

}  // namespace

double choose_b(int p, double F_pow, double gamma, double X0) {
  if (p < 1 || !(F_pow > 0.0) || !(gamma > 0.0))
    throw Error(ErrorCode::InvalidArgument, "choose_b needs p >= 1, F > 0, gamma > 0");
  if (!(X0 > F_pow)) throw Error(ErrorCode::InvalidArgument, "choose_b needs X0 > F");
  const double c = p * ipow(F_pow, 2 * p - 2);
  const double b2 = 8.0 * X0 * c * c / (gamma * gamma + 12.0 * X0 * c);
  if (!(b2 > 0.0)) throw Error(ErrorCode::NoValidB, "discriminant forces b <= 0");
  double b = 0.9 * std::sqrt(b2);
  for (int k = 0; k < 60; ++k, b *= 0.5) {
    if (b_is_valid(p, F_pow, gamma, X0, b)) return b;
  }
  throw Error(ErrorCode::NoValidB, "no b passed the invariance checks");
}

double BlowupRegion::lower(double x) const { return (ipow(F_pow, 2 * p) - ipow(x, 2 * p)) / gamma; }

double BlowupRegion::upper(double x) const { return x <= -X0 ? -b * std::pow(-X0 - x, 1.5) : 0.0; }

bool BlowupRegion::contains(Vec2 s, double slack) const {
  return s.x <= -xi_root + slack && s.y >= lower(s.x) - slack && s.y <= upper(s.x) + slack;
}

bool BlowupRegion::in_J(Vec2 s, double slack) const {
  return s.x <= -xi_root + slack && s.y >= lower(s.x) - slack && s.y <= slack;
}

RegionSpec BlowupRegion::S_region(double x_min) const {
  if (x_min == 0.0) x_min = -50.0 * X0;
  RegionSpec r;
  r.kind = "blowup";
  r.arcs.push_back(Arc::power(0.0, -b, X0, 1.5, x_min, -X0, "U"));
  r.arcs.push_back(Arc::segment({-X0, 0.0}, {-xi_root, 0.0}, "top"));
  r.arcs.push_back(Arc::segment({-xi_root, 0.0}, {-xi_root, lower(-xi_root)}, "right"));
  r.arcs.push_back(Arc::power(ipow(F_pow, 2 * p) / gamma, -1.0 / gamma, 0.0, 2 * p, -xi_root, x_min, "P_F"));
  r.arcs.push_back(Arc::segment({x_min, lower(x_min)}, {x_min, upper(x_min)}, "window", true));
  const BlowupRegion self = *this;
  r.member = [self](Vec2 s, double slack) { return self.contains(s, slack); };
  r.params = {{"p", p}, {"f", f_pow}, {"F", F_pow}, {"gamma", gamma}, {"xi", xi_root},
              {"X0", X0}, {"b", b}, {"rho", rho}, {"x_min", x_min}};
  return r;
}

RegionSpec BlowupRegion::J_region(double x_min) const {
  if (x_min == 0.0) x_min = -50.0 * X0;
  RegionSpec r;
  r.kind = "J";
  r.arcs.push_back(Arc::segment({x_min, 0.0}, {-xi_root, 0.0}, "top"));
  r.arcs.push_back(Arc::segment({-xi_root, 0.0}, {-xi_root, lower(-xi_root)}, "right"));
  r.arcs.push_back(Arc::power(ipow(F_pow, 2 * p) / gamma, -1.0 / gamma, 0.0, 2 * p, -xi_root, x_min, "P_F"));
  r.arcs.push_back(Arc::segment({x_min, lower(x_min)}, {x_min, 0.0}, "window", true));
  const BlowupRegion self = *this;
  r.member = [self](Vec2 s, double slack) { return self.in_J(s, slack); };
  r.params = {{"p", p}, {"f", f_pow}, {"F", F_pow}, {"gamma", gamma}, {"xi", xi_root}, {"x_min", x_min}};
  return r;
}

BlowupRegion build_blowup_region(int p, double f_pow, double F_pow, double gamma, double X0) {
  BlowupRegion B;
  B.p = p;
  B.f_pow = f_pow;
  B.F_pow = F_pow;
  B.gamma = gamma;
  B.xi_root = solve_xi_root(p, f_pow, F_pow, gamma);
  if (X0 < B.xi_root) {
    std::ostringstream msg;
    msg << "X0 = " << X0 << " must be >= xi = " << B.xi_root;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  B.X0 = X0;
  B.b = choose_b(p, F_pow, gamma, X0);
  return B;
}

// ------------------------------------------------------------- level curves

double U_level_curve(double c0, double v) { return v * v * v / 3.0 + c0 * v * v; }

bool LevelCurveSet::contains(Vec2 s, double slack) const {
  const double v = s.x - c0;
  if (v < v_left - slack || v > v_right + slack) return false;
  return 0.5 * s.y * s.y + U_level_curve(c0, v) <= energy + slack;
}

RegionSpec LevelCurveSet::region() const {
  RegionSpec r;
  r.kind = "level_curve";
  r.arcs.push_back(Arc::sampled(boundary, "C_E"));
  const LevelCurveSet self = *this;
  r.member = [self](Vec2 s, double slack) { return self.contains(s, slack); };
  r.params = {{"c0", c0}, {"gamma", gamma}, {"C2", C2}, {"beta", beta}, {"E", energy}};
  return r;
}

LevelCurveSet build_level_curve_set(double c0, double gamma, double C2, int n_boundary) {
  if (!(c0 > 0.0) || !(gamma > 0.0) || !(C2 > 0.0))
    throw Error(ErrorCode::InvalidArgument, "level-curve set needs c0, gamma, C2 > 0");
  LevelCurveSet S;
  S.c0 = c0;
  S.gamma = gamma;
  S.C2 = C2;
  S.v_left = -2.0 * c0 + C2 * std::pow(1.0 / gamma, S.beta);
  if (!(S.v_left < 0.0)) throw Error(ErrorCode::EmptySet, "C2 eps^beta >= 2 c0 leaves no level curve");
  S.energy = U_level_curve(c0, S.v_left);
  double lo = 0.0;
  double hi = c0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (U_level_curve(c0, mid) <= S.energy ? lo : hi) = mid;
  }
  S.v_right = lo;
  const double r_max = 4.0 * c0 + 2.0 * std::sqrt(2.0 * S.energy) + 1.0;
  S.boundary = radial_boundary([&S](Vec2 p) { return S.contains(p); }, {c0, 0.0}, r_max, n_boundary);
  return S;
}

std::pair<double, double> separatrix_eval(double c0, double x) {
  const double tol = 1e-12 * std::max(1.0, c0);
  if (x < -c0 - tol || x > 2.0 * c0 + tol)
    throw Error(ErrorCode::InvalidArgument, "separatrix is defined on [-c0, 2 c0]");
  const double val = 2.0 * (2.0 * c0 * c0 * c0 - x * x * x + 3.0 * c0 * c0 * x) / 3.0;
  const double y = std::sqrt(std::max(0.0, val));
  return {y, -y};
}

UnionReport union_D0(const LevelCurveSet* level_curve, const HexagonA& hex) {
  UnionReport out;
  if (!level_curve) {
    out.region = hex.region();
    out.region.kind = "D0";
    return out;
  }
  const LevelCurveSet D = *level_curve;
  const HexagonA A = hex;
  auto inside = [D, A](Vec2 s, double slack) { return A.contains(s, slack) || D.contains(s, slack); };

  // Boundary extent and set differences on a common grid.
  const double x_lo = std::min(-A.f_pow, D.c0 + D.v_left);
  const double x_hi = std::max(A.F_pow, D.c0 + D.v_right);
  const double y_hi = std::max(A.H.y, std::sqrt(2.0 * D.energy) + 1.0);
  const double y_lo = std::min(A.K.y, -std::sqrt(2.0 * D.energy) - 1.0);
  const int n = 400;
  for (int i = 0; i <= n && !(out.A_outside_D && out.D_outside_A); ++i) {
    for (int j = 0; j <= n; ++j) {
      const Vec2 s{x_lo + (x_hi - x_lo) * i / n, y_lo + (y_hi - y_lo) * j / n};
      const bool a = A.contains(s);
      const bool d = D.contains(s);
      out.A_outside_D = out.A_outside_D || (a && !d);
      out.D_outside_A = out.D_outside_A || (d && !a);
    }
  }

  RegionSpec r;
  r.kind = "D0";
  const double r_max = 2.0 * std::hypot(x_hi - x_lo, y_hi - y_lo);
  r.arcs.push_back(Arc::sampled(
      radial_boundary([&inside](Vec2 s) { return inside(s, 0.0); }, {D.c0, 0.0}, r_max, 1440), "D0"));
  r.member = inside;
  r.params = {{"c0", D.c0}, {"gamma", D.gamma}, {"lambda1", A.lambda1}, {"lambda2", A.lambda2}};
  out.region = std::move(r);
  return out;
}

}  // namespace qattract
