#include "qattract/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qattract {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Hairer's dense output coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;
constexpr double kSafety = 0.9;
constexpr double kEventTol = 1e-12;

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace

void IntegratorSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "integrator tolerances must be positive");
  if (!(min_step > 0.0) || !(min_step < max_step))
    throw Error(ErrorCode::InvalidArgument, "integrator needs 0 < min_step < max_step");
  if (!(escape_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "escape radius must be positive");
  if (!std::isfinite(t_max)) throw Error(ErrorCode::InvalidArgument, "t_max must be finite");
  if (sample_interval < 0.0) throw Error(ErrorCode::InvalidArgument, "sample interval must be >= 0");
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "Completed";
    case Outcome::Escaped: return "Escaped";
    case Outcome::StepCollapse: return "StepCollapse";
  }
  return "Unknown";
}

std::string default_tag(const EventSpec& e) {
  const char* dir = e.direction == Direction::Up ? "up" : e.direction == Direction::Down ? "down" : "any";
  switch (e.kind) {
    case EventSpec::Kind::CrossYAxis: return std::string("cross_y_") + dir;
    case EventSpec::Kind::CrossXAxis: return std::string("cross_x_") + dir;
    case EventSpec::Kind::EnterRegion: return "enter";
    case EventSpec::Kind::ExitRegion: return "exit";
  }
  return "event";
}

EventSpec EventSpec::cross_y_axis(Direction dir, std::string tag, bool terminal) {
  EventSpec e;
  e.kind = Kind::CrossYAxis;
  e.direction = dir;
  e.terminal = terminal;
  e.tag = tag.empty() ? default_tag(e) : std::move(tag);
  return e;
}

EventSpec EventSpec::cross_x_axis(Direction dir, std::string tag, bool terminal) {
  EventSpec e;
  e.kind = Kind::CrossXAxis;
  e.direction = dir;
  e.terminal = terminal;
  e.tag = tag.empty() ? default_tag(e) : std::move(tag);
  return e;
}

EventSpec EventSpec::enter_region(std::function<bool(Vec2)> inside, std::string tag, bool terminal) {
  EventSpec e;
  e.kind = Kind::EnterRegion;
  e.inside = std::move(inside);
  e.tag = std::move(tag);
  e.terminal = terminal;
  return e;
}

EventSpec EventSpec::exit_region(std::function<bool(Vec2)> inside, std::string tag, bool terminal) {
  EventSpec e;
  e.kind = Kind::ExitRegion;
  e.inside = std::move(inside);
  e.tag = std::move(tag);
  e.terminal = terminal;
  return e;
}

Vec2 DenseSegment::eval(double t) const {
  const double s = (t - t0_) / h_;
  const double s1 = 1.0 - s;
  return rc_[0] + s * (rc_[1] + s1 * (rc_[2] + s * (rc_[3] + s1 * rc_[4])));
}

// ------------------------------------------------------------------ stepper

Stepper::Stepper(PlanarField field, PhaseState s0, double t_end, const IntegratorSettings& set)
    : f_(std::move(field)), set_(set), t_(s0.t), t_end_(t_end), dir_(t_end >= s0.t ? 1.0 : -1.0),
      y_{s0.x, s0.y} {
  set_.validate();
  if (!std::isfinite(s0.x) || !std::isfinite(s0.y) || !std::isfinite(s0.t))
    throw Error(ErrorCode::InvalidArgument, "initial state must be finite");
  k1_ = f_(t_, y_);
  h_ = initial_step();
}

double Stepper::error_norm(Vec2 y0, Vec2 y1, Vec2 err) const {
  const double sx = set_.abs_tol + set_.rel_tol * std::max(std::abs(y0.x), std::abs(y1.x));
  const double sy = set_.abs_tol + set_.rel_tol * std::max(std::abs(y0.y), std::abs(y1.y));
  return std::sqrt(0.5 * ((err.x / sx) * (err.x / sx) + (err.y / sy) * (err.y / sy)));
}

double Stepper::initial_step() const {
  auto scaled = [&](Vec2 v, Vec2 ref) {
    const double sx = set_.abs_tol + set_.rel_tol * std::abs(ref.x);
    const double sy = set_.abs_tol + set_.rel_tol * std::abs(ref.y);
    return std::sqrt(0.5 * ((v.x / sx) * (v.x / sx) + (v.y / sy) * (v.y / sy)));
  };
  const double d0 = scaled(y_, y_);
  const double d1n = scaled(k1_, y_);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, set_.max_step);
  const Vec2 y1 = y_ + (dir_ * h0) * k1_;
  const Vec2 f1 = f_(t_ + dir_ * h0, y1);
  const double d2 = finite(f1) ? scaled(f1 - k1_, y_) / h0 : std::numeric_limits<double>::infinity();
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::max(std::min({100.0 * h0, h1, set_.max_step}), 2.0 * set_.min_step);
}

Stepper::Status Stepper::step() {
  if (dir_ * (t_end_ - t_) <= 0.0) return Status::Done;
  bool last_rejected = false;
  for (;;) {
    if (h_ < set_.min_step) return Status::Collapse;
    const double remaining = std::abs(t_end_ - t_);
    const bool final_step = h_ >= remaining;
    const double h = dir_ * (final_step ? remaining : h_);
    if (t_ + h == t_) return Status::Collapse;

    const Vec2 k1 = k1_;
    const Vec2 k2 = f_(t_ + c2 * h, y_ + h * (a21 * k1));
    const Vec2 k3 = f_(t_ + c3 * h, y_ + h * (a31 * k1 + a32 * k2));
    const Vec2 k4 = f_(t_ + c4 * h, y_ + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 = f_(t_ + c5 * h, y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = f_(t_ + h, y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec2 y1 = y_ + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t1 = final_step ? t_end_ : t_ + h;
    const Vec2 k7 = f_(t1, y1);
    const Vec2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = error_norm(y_, y1, err);
    if (!std::isfinite(en) || !finite(y1) || !finite(k7)) en = std::numeric_limits<double>::infinity();

    if (en <= 1.0) {
      const double fac = std::clamp(kSafety * std::pow(std::max(en, 1e-10), -0.2), kFacMin,
                                    last_rejected ? 1.0 : kFacMax);
      seg_.t0_ = t_;
      seg_.h_ = t1 - t_;
      seg_.rc_[0] = y_;
      seg_.rc_[1] = y1 - y_;
      seg_.rc_[2] = h * k1 - seg_.rc_[1];
      seg_.rc_[3] = seg_.rc_[1] - h * k7 - seg_.rc_[2];
      seg_.rc_[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      t_ = t1;
      y_ = y1;
      k1_ = k7;
      if (!final_step) h_ = std::min(std::abs(h) * fac, set_.max_step);
      ++accepted_;
      if (norm(y_) > set_.escape_radius) return Status::Escaped;
      return Status::Ok;
    }
    ++rejected_;
    last_rejected = true;
    const double fac = std::isfinite(en) ? std::max(kFacMin, kSafety * std::pow(en, -0.2)) : kFacMin;
    h_ = std::abs(h) * fac;
  }
}

// --------------------------------------------------------------- integrate

namespace {

double watched(const EventSpec& e, Vec2 s) { return e.kind == EventSpec::Kind::CrossYAxis ? s.x : s.y; }

bool crossed(Direction dir, double g0, double g1) {
  const bool up = g0 < 0.0 && g1 >= 0.0;
  const bool down = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Direction::Up: return up;
    case Direction::Down: return down;
    case Direction::Any: return up || down;
  }
  return false;
}

// Returns the located event time inside the segment, or NaN when no event fires.
double locate(const EventSpec& e, const DenseSegment& seg) {
  const Vec2 a = seg.start();
  const Vec2 b = seg.end();
  std::function<bool(double)> fired;
  if (e.kind == EventSpec::Kind::CrossYAxis || e.kind == EventSpec::Kind::CrossXAxis) {
    const double g0 = watched(e, a);
    if (!crossed(e.direction, g0, watched(e, b))) return std::numeric_limits<double>::quiet_NaN();
    fired = [&](double t) { return crossed(e.direction, g0, watched(e, seg.eval(t))); };
  } else {
    const bool in0 = e.inside(a);
    const bool want = e.kind == EventSpec::Kind::EnterRegion;
    if (in0 == want || e.inside(b) != want) return std::numeric_limits<double>::quiet_NaN();
    fired = [&](double t) { return e.inside(seg.eval(t)) == want; };
  }
  double lo = seg.t0();
  double hi = seg.t1();
  while (std::abs(hi - lo) > kEventTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (fired(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

Trajectory integrate_field(const PlanarField& field, const PhaseState& s0, const IntegratorSettings& set,
                           const std::vector<EventSpec>& events, const StepObserver& observer) {
  Trajectory traj;
  for (const auto& e : events) {
    if ((e.kind == EventSpec::Kind::EnterRegion || e.kind == EventSpec::Kind::ExitRegion) && !e.inside)
      throw Error(ErrorCode::InvalidArgument, "region event without membership predicate");
    traj.registered.push_back(e.tag.empty() ? default_tag(e) : e.tag);
  }

  Stepper stepper(field, s0, set.t_max, set);
  const double dir = set.t_max >= s0.t ? 1.0 : -1.0;
  if (set.store_samples) traj.samples.push_back(s0);
  PhaseState last = s0;
  traj.t_end = s0.t;
  if (norm({s0.x, s0.y}) > set.escape_radius) {
    traj.outcome = Outcome::Escaped;
    if (!set.store_samples) traj.samples = {s0};
    return traj;
  }
  double next_sample = s0.t + dir * set.sample_interval;

  for (;;) {
    const Stepper::Status status = stepper.step();
    if (status == Stepper::Status::Done) break;
    if (status == Stepper::Status::Collapse) {
      traj.outcome = Outcome::StepCollapse;
      traj.t_end = stepper.state().t;
      break;
    }
    const DenseSegment& seg = stepper.last();

    // Events in this step, ordered along the direction of integration.
    std::vector<std::pair<double, std::size_t>> fired;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double te = locate(events[i], seg);
      if (!std::isnan(te)) fired.emplace_back(te, i);
    }
    std::sort(fired.begin(), fired.end(), [dir](const auto& a, const auto& b) {
      return dir * a.first < dir * b.first || (a.first == b.first && a.second < b.second);
    });
    double stop_at = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [te, i] : fired) {
      const Vec2 s = seg.eval(te);
      traj.events.push_back({traj.registered[i], {s.x, s.y, te}});
      if (events[i].terminal) {
        stop_at = te;
        break;
      }
    }

    const double seg_end = std::isnan(stop_at) ? seg.t1() : stop_at;
    if (set.store_samples) {
      if (set.sample_interval > 0.0) {
        while (dir * (next_sample - seg_end) <= 0.0) {
          const Vec2 s = seg.eval(next_sample);
          traj.samples.push_back({s.x, s.y, next_sample});
          next_sample += dir * set.sample_interval;
        }
      }
      const Vec2 s = seg.eval(seg_end);
      const bool at_end = !std::isnan(stop_at) || status == Stepper::Status::Escaped ||
                          set.sample_interval == 0.0 || seg_end == set.t_max;
      if (at_end && (traj.samples.empty() || traj.samples.back().t != seg_end))
        traj.samples.push_back(std::isnan(stop_at) && seg_end == seg.t1()
                                   ? stepper.state()
                                   : PhaseState{s.x, s.y, seg_end});
    } else {
      const Vec2 s = seg.eval(seg_end);
      last = std::isnan(stop_at) ? stepper.state() : PhaseState{s.x, s.y, seg_end};
    }
    traj.t_end = seg_end;

    if (!std::isnan(stop_at)) {
      traj.stopped = true;
      break;
    }
    if (status == Stepper::Status::Escaped) {
      traj.outcome = Outcome::Escaped;
      break;
    }
    if (observer && !observer(seg)) {
      traj.stopped = true;
      break;
    }
  }
  if (!set.store_samples) traj.samples = {last};
  traj.accepted = stepper.accepted();
  traj.rejected = stepper.rejected();
  return traj;
}

Trajectory integrate(const SystemConfig& cfg, const PhaseState& s0, const IntegratorSettings& set,
                     const std::vector<EventSpec>& events, const StepObserver& observer) {
  const PlanarField field = [&cfg](double t, Vec2 s) { return vector_field(cfg, {s.x, s.y, t}); };
  return integrate_field(field, s0, set, events, observer);
}

std::vector<PhaseState> crossing_sequence(const Trajectory& traj, const EventSpec& axis) {
  const std::string tag = axis.tag.empty() ? default_tag(axis) : axis.tag;
  if (std::find(traj.registered.begin(), traj.registered.end(), tag) == traj.registered.end())
    throw Error(ErrorCode::MissingEvent, "event '" + tag + "' was not registered for this trajectory");
  std::vector<PhaseState> out;
  for (const auto& e : traj.events) {
    if (e.tag == tag) out.push_back(e.state);
  }
  return out;
}

}  // namespace qattract
