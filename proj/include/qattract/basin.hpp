#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qattract/integrate.hpp"
#include "qattract/qpsolve.hpp"
#include "qattract/region.hpp"
#include "qattract/report.hpp"

namespace qattract {

struct GridSpec {
  double x0 = -1.0, x1 = 1.0;
  double y0 = -1.0, y1 = 1.0;
  int nx = 2, ny = 2;
  double t_phase = 0.0;  // initial time of every run

  void validate() const;
  double x(int ix) const { return x0 + (x1 - x0) * ix / (nx - 1); }
  double y(int iy) const { return y0 + (y1 - y0) * iy / (ny - 1); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

/// Parses "x0:x1:nx,y0:y1:ny".
GridSpec parse_grid(const std::string& text);

enum class Label : std::uint8_t { Attracted, BlownUp, Undecided };
const char* to_string(Label l);
char label_char(Label l);  // A, B, U

struct BasinBudget {
  double t_max = 200.0;     // integration length past the start time
  double tolerance = 1e-6;  // orbit distance
  double window = 0.0;      // 0: 2 pi / |omega|_1 for d = 1, else 10
  IntegratorSettings integrator;
};

struct Classification {
  Label label = Label::Undecided;
  double time = 0.0;
};

/// Attracted once the orbit distance stays below tolerance for one window,
/// BlownUp on escape or step collapse, Undecided otherwise.
Classification classify_point(const SystemConfig& cfg, const FourierSolution& sol, const PhaseState& s0,
                              const BasinBudget& budget);

/// Row-major over (iy, ix).
struct BasinMap {
  GridSpec grid;
  std::vector<Label> labels;
  std::vector<double> times;

  Label at(int ix, int iy) const { return labels[static_cast<std::size_t>(iy) * grid.nx + ix]; }
  double time_at(int ix, int iy) const { return times[static_cast<std::size_t>(iy) * grid.nx + ix]; }
  std::size_t count(Label l) const;
};

/// workers <= 0 uses the hardware concurrency. Output does not depend on it.
BasinMap sweep(const SystemConfig& cfg, const FourierSolution& sol, const GridSpec& grid, const BasinBudget& budget,
               int workers = 0);

/// Fraction of grid points inside the region labeled Attracted; Undecided are
/// counted in `excluded`. An empty intersection passes and says so in the note.
Report containment_check(const BasinMap& map, const RegionSpec& region);

struct AxisCrossing {
  bool found = false;
  double x = 0.0;       // midpoint of the final bracket
  double x_blown = 0.0;  // BlownUp side
  double x_attr = 0.0;   // Attracted side
  int classified = 0;
};

/// Attracted/BlownUp switch along y = 0 between x_lo and x_hi: n uniform
/// probes, then bisection of the first adjacent BlownUp/Attracted pair.
AxisCrossing axis_boundary_crossing(const SystemConfig& cfg, const FourierSolution& sol, double x_lo, double x_hi,
                                    const BasinBudget& budget, int n = 16, int bisections = 30, double t_phase = 0.0);

}  // namespace qattract
