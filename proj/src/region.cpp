#include "qattract/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qattract {

Arc Arc::segment(Vec2 a, Vec2 b, std::string label, bool artificial) {
  Arc arc;
  arc.kind = Kind::Segment;
  arc.a = a;
  arc.b = b;
  arc.label = std::move(label);
  arc.artificial = artificial;
  return arc;
}

Arc Arc::power(double A, double B, double s, double q, double x0, double x1, std::string label) {
  Arc arc;
  arc.kind = Kind::PowerArc;
  arc.A = A;
  arc.B = B;
  arc.s = s;
  arc.q = q;
  arc.x0 = x0;
  arc.x1 = x1;
  arc.label = std::move(label);
  return arc;
}

Arc Arc::circle(Vec2 center, double radius, double th0, double th1, std::string label) {
  Arc arc;
  arc.kind = Kind::CircleArc;
  arc.center = center;
  arc.radius = radius;
  arc.th0 = th0;
  arc.th1 = th1;
  arc.label = std::move(label);
  return arc;
}

Arc Arc::sampled(std::vector<Vec2> pts, std::string label) {
  if (pts.size() < 2) throw Error(ErrorCode::InvalidArgument, "sampled arc needs two points");
  Arc arc;
  arc.kind = Kind::Sampled;
  arc.pts = std::move(pts);
  arc.label = std::move(label);
  return arc;
}

Vec2 Arc::point(double u) const {
  switch (kind) {
    case Kind::Segment: return a + u * (b - a);
    case Kind::PowerArc: {
      const double x = x0 + u * (x1 - x0);
      return {x, A + B * std::pow(std::abs(x + s), q)};
    }
    case Kind::CircleArc: {
      const double th = th0 + u * (th1 - th0);
      return {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
    }
    case Kind::Sampled: {
      const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(pts.size() - 1);
      const std::size_t i = std::min(static_cast<std::size_t>(pos), pts.size() - 2);
      return pts[i] + (pos - static_cast<double>(i)) * (pts[i + 1] - pts[i]);
    }
  }
  return {};
}

Vec2 Arc::tangent(double u) const {
  switch (kind) {
    case Kind::Segment: return b - a;
    case Kind::PowerArc: {
      const double x = x0 + u * (x1 - x0);
      const double z = x + s;
      const double dydx = z == 0.0 ? 0.0 : B * q * std::pow(std::abs(z), q - 1.0) * (z > 0.0 ? 1.0 : -1.0);
      return {x1 - x0, dydx * (x1 - x0)};
    }
    case Kind::CircleArc: {
      const double th = th0 + u * (th1 - th0);
      const double w = th1 - th0;
      return {-radius * std::sin(th) * w, radius * std::cos(th) * w};
    }
    case Kind::Sampled: {
      const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(pts.size() - 1);
      const std::size_t i = std::min(static_cast<std::size_t>(pos), pts.size() - 2);
      return pts[i + 1] - pts[i];
    }
  }
  return {};
}

Vec2 Arc::inward_normal(double u) const {
  const Vec2 t = tangent(u);
  return {t.y, -t.x};
}

const char* Arc::formula_id() const {
  switch (kind) {
    case Kind::Segment: return "segment";
    case Kind::PowerArc: return "power";
    case Kind::CircleArc: return "circle";
    case Kind::Sampled: return "sampled";
  }
  return "unknown";
}

double RegionSpec::closure_gap() const {
  double gap = 0.0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& next = arcs[(i + 1) % arcs.size()];
    gap = std::max(gap, norm(arcs[i].end() - next.start()));
  }
  return gap;
}

std::vector<Vec2> RegionSpec::polyline(int n_per_arc) const {
  std::vector<Vec2> out;
  for (const Arc& arc : arcs) {
    const int n = arc.kind == Arc::Kind::Segment ? 2
                  : arc.kind == Arc::Kind::Sampled ? static_cast<int>(arc.pts.size())
                                                   : n_per_arc;
    if (arc.kind == Arc::Kind::Sampled) {
      out.insert(out.end(), arc.pts.begin(), arc.pts.end());
      continue;
    }
    for (int k = 0; k < n; ++k) out.push_back(arc.point(static_cast<double>(k) / (n - 1)));
  }
  return out;
}

void RegionSpec::bounding_box(Vec2& lo, Vec2& hi, int n_per_arc) const {
  lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  hi = {-lo.x, -lo.y};
  for (const Vec2& p : polyline(n_per_arc)) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
}

Report verify_inward_flux(const RegionSpec& region, const Nonlinearity& g, double gamma, const FluxFields& fields,
                          int n_boundary) {
  Report rep;
  rep.check = "inward_flux:" + region.kind;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_arc;

  std::vector<double> phases;
  if (fields.cfg) {
    const FrequencyVector& freq = fields.cfg->freq();
    const double span = freq.dim() == 1 ? kTwoPi / std::abs(freq.omega()[0]) : 1000.0;
    for (int j = 0; j < fields.n_time; ++j) {
      const double f = (j + 1) * 0.61803398874989484820;
      phases.push_back((f - std::floor(f)) * span);
    }
  }

  for (const Arc& arc : region.arcs) {
    if (arc.artificial) {
      ++rep.excluded;
      continue;
    }
    for (int k = 0; k < n_boundary; ++k) {
      const double u = n_boundary == 1 ? 0.5 : static_cast<double>(k) / (n_boundary - 1);
      const Vec2 p = arc.point(u);
      Vec2 n = arc.inward_normal(u);
      const double nn = norm(n);
      if (nn == 0.0) continue;
      n = (1.0 / nn) * n;
      double flux = std::min(dot(n, frozen_field(g, gamma, fields.bounds.f_low, p)),
                             dot(n, frozen_field(g, gamma, fields.bounds.f_up, p)));
      if (arc.kind == Arc::Kind::Segment && fields.cfg) {
        for (double t : phases) flux = std::min(flux, dot(n, vector_field(*fields.cfg, {p.x, p.y, t})));
      }
      if (flux < worst) {
        worst = flux;
        worst_arc = arc.label;
      }
      if (flux < -1e-9) ++rep.violations;
      ++rep.samples;
    }
  }
  rep.worst_margin = rep.samples ? worst : 0.0;
  rep.pass = rep.violations == 0;
  rep.note = "worst arc " + worst_arc;
  rep.param("gamma", gamma);
  rep.param("f_low", fields.bounds.f_low);
  rep.param("f_up", fields.bounds.f_up);
  return rep;
}

std::vector<Vec2> radial_boundary(const std::function<bool(Vec2)>& inside, Vec2 center, double r_max, int n) {
  std::vector<Vec2> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    // Clockwise: angle decreasing from pi/2.
    const double th = kPi / 2 - kTwoPi * k / n;
    const Vec2 d{std::cos(th), std::sin(th)};
    double lo = 0.0;
    double hi = r_max;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(center + mid * d) ? lo : hi) = mid;
    }
    out.push_back(center + lo * d);
  }
  return out;
}

RegionSpec make_disk(Vec2 center, double radius) {
  RegionSpec r;
  r.kind = "disk";
  r.arcs.push_back(Arc::circle(center, radius, kPi / 2, kPi / 2 - kTwoPi, "circle"));
  r.member = [center, radius](Vec2 p, double slack) { return norm(p - center) <= radius + slack; };
  r.params = {{"cx", center.x}, {"cy", center.y}, {"r", radius}};
  return r;
}

}  // namespace qattract
