#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qattract/model.hpp"
#include "qattract/report.hpp"

namespace qattract {

/// One boundary piece of a planar region. Arcs are traversed clockwise, so
/// the region lies on the right and the inward normal is (t_y, -t_x).
struct Arc {
  enum class Kind { Segment, PowerArc, CircleArc, Sampled };

  Kind kind = Kind::Segment;
  std::string label;
  /// Artificial window edges closing an unbounded region; skipped by flux checks.
  bool artificial = false;

  Vec2 a, b;  // Segment

  // PowerArc: y = A + B |x + s|^q for x running from x0 to x1.
  double A = 0.0, B = 0.0, s = 0.0, q = 1.0, x0 = 0.0, x1 = 0.0;

  // CircleArc: center, radius, angle from th0 to th1 (th1 < th0 for clockwise).
  Vec2 center;
  double radius = 0.0, th0 = 0.0, th1 = 0.0;

  std::vector<Vec2> pts;  // Sampled polyline

  static Arc segment(Vec2 a, Vec2 b, std::string label = "", bool artificial = false);
  static Arc power(double A, double B, double s, double q, double x0, double x1, std::string label = "");
  static Arc circle(Vec2 center, double radius, double th0, double th1, std::string label = "");
  static Arc sampled(std::vector<Vec2> pts, std::string label = "");

  /// u in [0, 1].
  Vec2 point(double u) const;
  /// Unnormalized tangent d point / du.
  Vec2 tangent(double u) const;
  Vec2 inward_normal(double u) const;
  Vec2 start() const { return point(0.0); }
  Vec2 end() const { return point(1.0); }
  /// Formula name used in exports.
  const char* formula_id() const;
};

/// Closed region: ordered boundary arcs plus an analytic membership predicate.
struct RegionSpec {
  std::string kind;
  std::vector<Arc> arcs;
  std::function<bool(Vec2, double)> member;  // (point, slack)
  std::vector<std::pair<std::string, double>> params;

  bool contains(Vec2 p, double slack = 0.0) const { return member(p, slack); }
  bool empty() const { return arcs.empty(); }
  /// Largest gap between consecutive arc endpoints.
  double closure_gap() const;
  /// n points per arc, concatenated.
  std::vector<Vec2> polyline(int n_per_arc = 200) const;
  void bounding_box(Vec2& lo, Vec2& hi, int n_per_arc = 200) const;
};

/// Field used for flux sampling: frozen extremes plus the true field at sampled phases.
struct FluxFields {
  const SystemConfig* cfg = nullptr;  // true field; may be null
  ForcingBounds bounds;
  int n_time = 100;
};

/// Samples each non-artificial arc at n_boundary points and checks
/// min over {phi_f, phi_F} of (unit inward normal . field) >= -1e-9;
/// straight edges also see the true field at n_time phases.
Report verify_inward_flux(const RegionSpec& region, const Nonlinearity& g, double gamma, const FluxFields& fields,
                          int n_boundary = 1000);

/// Star-shaped boundary around `center` by ray bisection on the membership predicate.
std::vector<Vec2> radial_boundary(const std::function<bool(Vec2)>& inside, Vec2 center, double r_max, int n);

/// Disk, clockwise, with analytic membership.
RegionSpec make_disk(Vec2 center, double radius);

}  // namespace qattract
