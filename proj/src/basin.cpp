#include "qattract/basin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace qattract {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidArgument, "grid needs nx, ny >= 2");
  if (!(x1 > x0) || !(y1 > y0)) throw Error(ErrorCode::InvalidArgument, "grid ranges must be nondegenerate");
  if (!std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) || !std::isfinite(y1) ||
      !std::isfinite(t_phase))
    throw Error(ErrorCode::InvalidArgument, "grid ranges must be finite");
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
  std::istringstream in(text);
  in >> g.x0 >> c1 >> g.x1 >> c2 >> g.nx >> c3 >> g.y0 >> c4 >> g.y1 >> c5 >> g.ny;
  std::string rest;
  in >> rest;
  if (!in.eof() && in.fail()) throw Error(ErrorCode::InvalidArgument, "grid must look like x0:x1:nx,y0:y1:ny");
  if (c1 != ':' || c2 != ':' || c3 != ',' || c4 != ':' || c5 != ':' || !rest.empty())
    throw Error(ErrorCode::InvalidArgument, "grid must look like x0:x1:nx,y0:y1:ny, got '" + text + "'");
  g.validate();
  return g;
}

const char* to_string(Label l) {
  switch (l) {
    case Label::Attracted: return "attracted";
    case Label::BlownUp: return "blown_up";
    case Label::Undecided: return "undecided";
  }
  return "undecided";
}

char label_char(Label l) {
  switch (l) {
    case Label::Attracted: return 'A';
    case Label::BlownUp: return 'B';
    case Label::Undecided: return 'U';
  }
  return 'U';
}

Classification classify_point(const SystemConfig& cfg, const FourierSolution& sol, const PhaseState& s0,
                              const BasinBudget& budget) {
  if (!(budget.t_max > 0.0)) return {Label::Undecided, s0.t};
  const FrequencyVector& freq = cfg.freq();
  double window = budget.window;
  if (!(window > 0.0)) {
    if (freq.dim() == 1) {
      window = kTwoPi / std::abs(freq.omega()[0]);
    } else {
      window = 10.0;
    }
  }

  IntegratorSettings set = budget.integrator;
  set.t_max = s0.t + budget.t_max;
  set.store_samples = false;

  // Distance checked at the step ends and three interior points of the interpolant.
  double since = std::numeric_limits<double>::quiet_NaN();
  double decided = 0.0;
  bool attracted = false;
  auto close = [&](double t, Vec2 s) { return orbit_distance(sol, {s.x, s.y, t}) < budget.tolerance; };
  if (close(s0.t, {s0.x, s0.y})) since = s0.t;
  const StepObserver observer = [&](const DenseSegment& seg) {
    for (int k = 1; k <= 4; ++k) {
      const double t = seg.t0() + seg.h() * k / 4.0;
      const Vec2 s = k == 4 ? seg.end() : seg.eval(t);
      if (!close(t, s)) {
        since = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      if (std::isnan(since)) since = t;
      if (t - since >= window) {
        attracted = true;
        decided = t;
        return false;
      }
    }
    return true;
  };
  const Trajectory tr = integrate(cfg, s0, set, {}, observer);
  if (attracted) return {Label::Attracted, decided};
  if (tr.outcome != Outcome::Completed) return {Label::BlownUp, tr.t_end};
  return {Label::Undecided, tr.t_end};
}

std::size_t BasinMap::count(Label l) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l)); }

BasinMap sweep(const SystemConfig& cfg, const FourierSolution& sol, const GridSpec& grid, const BasinBudget& budget,
               int workers) {
  grid.validate();
  budget.integrator.validate();
  BasinMap map;
  map.grid = grid;
  map.labels.assign(grid.size(), Label::Undecided);
  map.times.assign(grid.size(), grid.t_phase);

  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), grid.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      const int ix = static_cast<int>(i % static_cast<std::size_t>(grid.nx));
      const int iy = static_cast<int>(i / static_cast<std::size_t>(grid.nx));
      const Classification c = classify_point(cfg, sol, {grid.x(ix), grid.y(iy), grid.t_phase}, budget);
      map.labels[i] = c.label;
      map.times[i] = c.time;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return map;
}

Report containment_check(const BasinMap& map, const RegionSpec& region) {
  Report rep;
  rep.check = "containment:" + region.kind;
  const GridSpec& g = map.grid;
  long attracted = 0;
  long blown = 0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!region.contains({g.x(ix), g.y(iy)})) continue;
      ++rep.samples;
      switch (map.at(ix, iy)) {
        case Label::Attracted: ++attracted; break;
        case Label::BlownUp: ++blown; break;
        case Label::Undecided: ++rep.excluded; break;
      }
    }
  }
  rep.violations = blown;
  const long decided = attracted + blown;
  rep.worst_margin = decided > 0 ? static_cast<double>(attracted) / static_cast<double>(decided) : 1.0;
  rep.pass = blown == 0;

  std::ostringstream note;
  if (rep.samples == 0) note << "vacuous: no grid point inside the region";
  else note << attracted << " attracted, " << blown << " blown up, " << rep.excluded << " undecided";
  if (!region.empty()) {
    Vec2 lo, hi;
    region.bounding_box(lo, hi);
    if (lo.x < g.x0 || hi.x > g.x1 || lo.y < g.y0 || hi.y > g.y1) note << "; region exceeds the grid, intersection only";
  }
  rep.note = note.str();
  rep.param("fraction_attracted", rep.worst_margin);
  rep.param("inside", static_cast<double>(rep.samples));
  return rep;
}

AxisCrossing axis_boundary_crossing(const SystemConfig& cfg, const FourierSolution& sol, double x_lo, double x_hi,
                                    const BasinBudget& budget, int n, int bisections, double t_phase) {
  AxisCrossing out;
  if (!(x_hi > x_lo) || n < 2) throw Error(ErrorCode::InvalidArgument, "axis crossing needs x_lo < x_hi and n >= 2");
  auto label = [&](double x) {
    ++out.classified;
    return classify_point(cfg, sol, {x, 0.0, t_phase}, budget).label;
  };
  double a = x_lo;
  Label la = label(a);
  for (int i = 1; i < n; ++i) {
    const double b = x_lo + (x_hi - x_lo) * i / (n - 1);
    const Label lb = label(b);
    const bool flip = (la == Label::BlownUp && lb == Label::Attracted) || (la == Label::Attracted && lb == Label::BlownUp);
    if (flip) {
      double blown = la == Label::BlownUp ? a : b;
      double attr = la == Label::BlownUp ? b : a;
      for (int k = 0; k < bisections; ++k) {
        const double mid = 0.5 * (blown + attr);
        const Label lm = label(mid);
        if (lm == Label::BlownUp) blown = mid;
        else if (lm == Label::Attracted) attr = mid;
        else break;
      }
      out.found = true;
      out.x_blown = blown;
      out.x_attr = attr;
      out.x = 0.5 * (blown + attr);
      return out;
    }
    a = b;
    la = lb;
  }
  return out;
}

}  // namespace qattract
