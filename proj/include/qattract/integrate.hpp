#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qattract/common.hpp"
#include "qattract/model.hpp"

namespace qattract {

struct IntegratorSettings {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = 0.5;
  double t_max = 100.0;  // end time; below s0.t integrates backward
  double escape_radius = 1e6;
  double min_step = 1e-13;
  /// 0 stores every accepted step, otherwise a uniform grid from the dense output.
  double sample_interval = 0.0;
  /// false keeps only the final state.
  bool store_samples = true;

  void validate() const;
};

enum class Outcome { Completed, Escaped, StepCollapse };
const char* to_string(Outcome o);

enum class Direction { Up, Down, Any };

/// Axis crossings and region entry/exit. CrossYAxis watches x (the y-axis is
/// x = 0), CrossXAxis watches y. Up means the watched coordinate increases
/// through zero.
struct EventSpec {
  enum class Kind { CrossYAxis, CrossXAxis, EnterRegion, ExitRegion };

  Kind kind = Kind::CrossYAxis;
  Direction direction = Direction::Any;
  std::function<bool(Vec2)> inside;  // region events only
  std::string tag;
  bool terminal = false;

  static EventSpec cross_y_axis(Direction dir, std::string tag = "", bool terminal = false);
  static EventSpec cross_x_axis(Direction dir, std::string tag = "", bool terminal = false);
  static EventSpec enter_region(std::function<bool(Vec2)> inside, std::string tag = "enter",
                                bool terminal = false);
  static EventSpec exit_region(std::function<bool(Vec2)> inside, std::string tag = "exit",
                               bool terminal = false);
};

struct EventRecord {
  std::string tag;
  PhaseState state;
};

struct Trajectory {
  std::vector<PhaseState> samples;
  std::vector<EventRecord> events;
  std::vector<std::string> registered;
  Outcome outcome = Outcome::Completed;
  double t_end = 0.0;  // time of the outcome (escape or collapse time when not Completed)
  bool stopped = false;  // terminal event or observer stop
  long accepted = 0;
  long rejected = 0;

  PhaseState final_state() const { return samples.empty() ? PhaseState{} : samples.back(); }
};

/// One accepted step with its quartic interpolant.
class DenseSegment {
 public:
  double t0() const { return t0_; }
  double t1() const { return t0_ + h_; }
  double h() const { return h_; }
  Vec2 start() const { return rc_[0]; }
  Vec2 end() const { return rc_[0] + rc_[1]; }
  Vec2 eval(double t) const;

 private:
  friend class Stepper;
  double t0_ = 0.0;
  double h_ = 0.0;
  Vec2 rc_[5];
};

using PlanarField = std::function<Vec2(double t, Vec2 s)>;

/// Dormand-Prince 5(4) stepper with FSAL and dense output.
class Stepper {
 public:
  Stepper(PlanarField field, PhaseState s0, double t_end, const IntegratorSettings& set);

  enum class Status { Ok, Done, Escaped, Collapse };
  /// Advances one accepted step (never past t_end).
  Status step();

  PhaseState state() const { return {y_.x, y_.y, t_}; }
  const DenseSegment& last() const { return seg_; }
  long accepted() const { return accepted_; }
  long rejected() const { return rejected_; }

 private:
  double initial_step() const;
  double error_norm(Vec2 y0, Vec2 y1, Vec2 err) const;

  PlanarField f_;
  IntegratorSettings set_;
  double t_;
  double t_end_;
  double dir_;
  Vec2 y_;
  Vec2 k1_;
  double h_;
  DenseSegment seg_;
  long accepted_ = 0;
  long rejected_ = 0;
};

/// Called after every accepted step; returning false stops the integration.
using StepObserver = std::function<bool(const DenseSegment&)>;

Trajectory integrate_field(const PlanarField& field, const PhaseState& s0, const IntegratorSettings& set,
                           const std::vector<EventSpec>& events = {}, const StepObserver& observer = {});

Trajectory integrate(const SystemConfig& cfg, const PhaseState& s0, const IntegratorSettings& set,
                     const std::vector<EventSpec>& events = {}, const StepObserver& observer = {});

/// Crossing states recorded for the event's tag; MissingEvent when the tag was
/// not registered for the run.
std::vector<PhaseState> crossing_sequence(const Trajectory& traj, const EventSpec& axis);

/// The default tag used when an EventSpec is given an empty one.
std::string default_tag(const EventSpec& e);

}  // namespace qattract
