#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qattract/basin.hpp"
#include "qattract/integrate.hpp"
#include "qattract/qpsolve.hpp"
#include "qattract/region.hpp"
#include "qattract/report.hpp"

namespace qattract {

using Json = nlohmann::ordered_json;

/// Parsed system file.
///
///   [forcing]       dim, nu(k1,..,kd) = re, im, envelope_F, envelope_xi, truncated
///   [freq]          omega = w1, .., wd   C0   tau
///   [nonlinearity]  kind = odd | even | polynomial, p, coeffs = a1, .., a_{2p+1}
///   [params]        gamma, X0, C2
///
/// '#' starts a comment. A mode given without its mirror gets the conjugate.
struct SystemFile {
  SystemConfig cfg;
  std::optional<double> X0;
  std::optional<double> C2;
};

/// ConfigError with "line L, column C" for anything malformed or unknown.
SystemFile parse_system(const std::string& text);
SystemFile load_system(const std::filesystem::path& path);

/// %.17g.
std::string fmt17(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

/// "t,x,y".
std::string trajectory_csv(const Trajectory& traj);
/// "tag,t,x,y".
std::string events_csv(const Trajectory& traj);

/// "nu_1,..,nu_d,re,im", positive half and zero mode included, one row per lattice point.
std::string solution_csv(const FourierSolution& sol);
Json solution_summary(const SystemConfig& cfg, const FourierSolution& sol);

Json report_json(const Report& rep);

/// {kind, params, arcs: [{formula_id, label, artificial, domain, coeffs}]}.
Json region_json(const RegionSpec& region);
/// "arc,x,y", n points per analytic arc.
std::string region_csv(const RegionSpec& region, int n_per_arc = 200);
/// Polyline-only region rebuilt from region_json output (membership by winding number).
RegionSpec region_from_json(const Json& j);

/// "x0,y0,label,t_decide".
std::string basin_csv(const BasinMap& map);
/// Header line with the grid, then one row of A/B/U per y, top row first.
std::string basin_matrix(const BasinMap& map);
/// Inverse of basin_csv; the grid is recovered from the distinct coordinates.
BasinMap basin_from_csv(const std::string& text);

/// Trajectory samples from trajectory_csv output.
std::vector<PhaseState> trajectory_from_csv(const std::string& text);

std::string read_text(const std::filesystem::path& path);

}  // namespace qattract
