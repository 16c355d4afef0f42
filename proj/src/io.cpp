#include "qattract/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qattract {

namespace {

[[noreturn]] void config_error(int line, int col, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line << ", column " << col << ": " << what;
  throw Error(ErrorCode::ConfigError, msg.str());
}

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  int col = 0;  // of the value
};

double to_double(const Entry& e, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
    config_error(e.line, e.col, "expected a number, got '" + t + "'");
  return v;
}

std::vector<double> to_list(const Entry& e) {
  std::vector<double> out;
  std::stringstream in(e.value);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_double(e, item));
  if (out.empty()) config_error(e.line, e.col, "empty list");
  return out;
}

int to_int(const Entry& e) {
  const double v = to_double(e, e.value);
  if (v != std::floor(v) || std::abs(v) > 1e9) config_error(e.line, e.col, "expected an integer, got '" + e.value + "'");
  return static_cast<int>(v);
}

}  // namespace

SystemFile parse_system(const std::string& text) {
  static const std::map<std::string, std::set<std::string>> known = {
      {"forcing", {"dim", "envelope_F", "envelope_xi", "truncated"}},
      {"freq", {"omega", "C0", "tau"}},
      {"nonlinearity", {"kind", "p", "coeffs"}},
      {"params", {"gamma", "X0", "C2"}},
  };
  std::map<std::string, std::map<std::string, Entry>> sections;
  struct RawMode {
    LatticePoint nu;
    std::complex<double> amp;
    Entry where;
  };
  std::vector<RawMode> raw_modes;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t lead = 0;
    const std::string body = trim(line, &lead);
    if (body.empty()) continue;
    const int col0 = static_cast<int>(lead) + 1;
    if (body.front() == '[') {
      if (body.back() != ']') config_error(lineno, col0, "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!known.count(section)) config_error(lineno, col0 + 1, "unknown section '" + section + "'");
      if (sections.count(section)) config_error(lineno, col0 + 1, "duplicate section '" + section + "'");
      sections[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) config_error(lineno, col0, "expected 'key = value'");
    if (section.empty()) config_error(lineno, col0, "key outside of any section");
    const std::string key = trim(body.substr(0, eq));
    std::size_t vlead = 0;
    const std::string value = trim(body.substr(eq + 1), &vlead);
    const Entry entry{value, lineno, col0 + static_cast<int>(eq + 1 + vlead)};
    if (value.empty()) config_error(lineno, entry.col, "missing value for '" + key + "'");

    if (section == "forcing" && key.rfind("nu(", 0) == 0) {
      if (key.back() != ')') config_error(lineno, col0, "malformed mode key '" + key + "'");
      RawMode m;
      const Entry inner{key.substr(3, key.size() - 4), lineno, col0 + 3};
      if (trim(inner.value).empty()) config_error(lineno, col0, "mode key '" + key + "' has no index");
      for (double k : to_list(inner)) {
        if (k != std::floor(k)) config_error(lineno, col0 + 3, "mode index must be an integer in '" + key + "'");
        m.nu.push_back(static_cast<int>(k));
      }
      const std::vector<double> amp = to_list(entry);
      if (amp.size() > 2) config_error(lineno, entry.col, "mode value is 're' or 're, im'");
      m.amp = {amp[0], amp.size() == 2 ? amp[1] : 0.0};
      m.where = entry;
      for (const RawMode& other : raw_modes)
        if (other.nu == m.nu) config_error(lineno, col0, "duplicate mode '" + key + "'");
      raw_modes.push_back(std::move(m));
      continue;
    }
    if (!known.at(section).count(key)) config_error(lineno, col0, "unknown key '" + key + "' in [" + section + "]");
    if (sections[section].count(key)) config_error(lineno, col0, "duplicate key '" + key + "'");
    sections[section][key] = entry;
  }

  auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  auto require = [&](const std::string& sec, const std::string& key) -> const Entry& {
    const Entry* e = get(sec, key);
    if (!e) config_error(lineno + 1, 1, "missing key '" + key + "' in [" + sec + "]");
    return *e;
  };

  try {
    // Frequencies.
    const Entry& om = require("freq", "omega");
    const std::vector<double> omega = to_list(om);
    const double C0 = get("freq", "C0") ? to_double(*get("freq", "C0"), get("freq", "C0")->value) : 1.0;
    const double tau = get("freq", "tau") ? to_double(*get("freq", "tau"), get("freq", "tau")->value) : 0.0;
    FrequencyVector freq(omega, C0, tau);

    // Forcing.
    const int dim = get("forcing", "dim") ? to_int(*get("forcing", "dim")) : freq.dim();
    if (dim != freq.dim()) config_error(om.line, om.col, "omega has " + std::to_string(freq.dim()) + " entries, dim is " + std::to_string(dim));
    if (raw_modes.empty()) config_error(lineno + 1, 1, "no forcing modes nu(..) given");
    std::vector<ForcingMode> modes;
    for (const RawMode& m : raw_modes) {
      if (static_cast<int>(m.nu.size()) != dim)
        config_error(m.where.line, 1, "mode index has " + std::to_string(m.nu.size()) + " entries, dim is " + std::to_string(dim));
      modes.push_back({m.nu, m.amp});
    }
    for (const RawMode& m : raw_modes) {
      const LatticePoint mirror = negate(m.nu);
      const bool present = std::any_of(raw_modes.begin(), raw_modes.end(), [&](const RawMode& o) { return o.nu == mirror; });
      if (!present) modes.push_back({mirror, std::conj(m.amp)});
    }
    const double xi = get("forcing", "envelope_xi") ? to_double(*get("forcing", "envelope_xi"), get("forcing", "envelope_xi")->value) : 1.0;
    const double F = get("forcing", "envelope_F") ? to_double(*get("forcing", "envelope_F"), get("forcing", "envelope_F")->value)
                                                  : ForcingSpectrum::fit_envelope(modes, xi);
    bool truncated = false;
    if (const Entry* t = get("forcing", "truncated")) {
      if (t->value == "true") truncated = true;
      else if (t->value != "false") config_error(t->line, t->col, "truncated is 'true' or 'false'");
    }
    ForcingSpectrum forcing(dim, modes, F, xi, truncated);

    // Nonlinearity.
    const Entry& kind = require("nonlinearity", "kind");
    std::optional<Nonlinearity> g;
    if (kind.value == "odd" || kind.value == "even") {
      if (get("nonlinearity", "coeffs")) config_error(get("nonlinearity", "coeffs")->line, 1, "coeffs only apply to kind = polynomial");
      const int p = to_int(require("nonlinearity", "p"));
      g = kind.value == "odd" ? Nonlinearity::odd_monomial(p) : Nonlinearity::even_monomial(p);
    } else if (kind.value == "polynomial") {
      std::vector<double> c = to_list(require("nonlinearity", "coeffs"));
      g = Nonlinearity::polynomial(c);
      if (const Entry* p = get("nonlinearity", "p"); p && to_int(*p) != g->p())
        config_error(p->line, p->col, "p disagrees with the number of coeffs");
    } else {
      config_error(kind.line, kind.col, "kind must be odd, even or polynomial, got '" + kind.value + "'");
    }

    const Entry& ge = require("params", "gamma");
    const double gamma = to_double(ge, ge.value);
    SystemFile out{SystemConfig(forcing, freq, *g, gamma), std::nullopt, std::nullopt};
    if (const Entry* e = get("params", "X0")) out.X0 = to_double(*e, e->value);
    if (const Entry* e = get("params", "C2")) out.C2 = to_double(*e, e->value);
    return out;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, std::string("invalid system: ") + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SystemFile load_system(const std::filesystem::path& path) {
  try {
    return parse_system(read_text(path));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.message());
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Written to a sibling first so readers never see half a file.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x,y\n";
  for (const PhaseState& s : traj.samples) out += fmt17(s.t) + "," + fmt17(s.x) + "," + fmt17(s.y) + "\n";
  return out;
}

std::string events_csv(const Trajectory& traj) {
  std::string out = "tag,t,x,y\n";
  for (const EventRecord& e : traj.events)
    out += e.tag + "," + fmt17(e.state.t) + "," + fmt17(e.state.x) + "," + fmt17(e.state.y) + "\n";
  return out;
}

std::string solution_csv(const FourierSolution& sol) {
  std::string out;
  const int d = sol.lattice.dim();
  for (int i = 1; i <= d; ++i) out += "nu_" + std::to_string(i) + ",";
  out += "re,im\n";
  for (std::size_t k = 0; k < sol.lattice.size(); ++k) {
    for (int v : sol.lattice[k]) out += std::to_string(v) + ",";
    out += fmt17(sol.coeffs[k].real()) + "," + fmt17(sol.coeffs[k].imag()) + "\n";
  }
  return out;
}

Json solution_summary(const SystemConfig& cfg, const FourierSolution& sol) {
  Json j;
  j["gamma"] = cfg.gamma();
  j["residual_norm"] = sol.residual_norm;
  j["mean"] = sol.mean();
  j["c0"] = equilibrium_c0(cfg.g(), cfg.forcing().mean());
  j["truncation"] = sol.lattice.truncation();
  j["modes"] = sol.lattice.size();
  j["iterations"] = sol.iterations;
  j["outer_shell_mass"] = sol.outer_shell_mass();
  return j;
}

Json report_json(const Report& rep) {
  Json j;
  j["check"] = rep.check;
  j["pass"] = rep.pass;
  j["worst_margin"] = std::isfinite(rep.worst_margin) ? Json(rep.worst_margin) : Json(nullptr);
  j["samples"] = rep.samples;
  j["violations"] = rep.violations;
  j["excluded"] = rep.excluded;
  j["note"] = rep.note;
  Json params = Json::object();
  for (const auto& [k, v] : rep.params) params[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
  j["params"] = params;
  return j;
}

Json region_json(const RegionSpec& region) {
  Json j;
  j["kind"] = region.kind;
  Json params = Json::object();
  for (const auto& [k, v] : region.params) params[k] = v;
  j["params"] = params;
  Json arcs = Json::array();
  for (const Arc& a : region.arcs) {
    Json arc;
    arc["formula_id"] = a.formula_id();
    arc["label"] = a.label;
    arc["artificial"] = a.artificial;
    switch (a.kind) {
      case Arc::Kind::Segment:
        arc["domain"] = {0.0, 1.0};
        arc["coeffs"] = {{"a", {a.a.x, a.a.y}}, {"b", {a.b.x, a.b.y}}};
        break;
      case Arc::Kind::PowerArc:
        arc["domain"] = {a.x0, a.x1};
        arc["coeffs"] = {{"A", a.A}, {"B", a.B}, {"s", a.s}, {"q", a.q}};
        break;
      case Arc::Kind::CircleArc:
        arc["domain"] = {a.th0, a.th1};
        arc["coeffs"] = {{"cx", a.center.x}, {"cy", a.center.y}, {"r", a.radius}};
        break;
      case Arc::Kind::Sampled: {
        arc["domain"] = {0.0, 1.0};
        Json pts = Json::array();
        for (const Vec2& p : a.pts) pts.push_back({p.x, p.y});
        arc["coeffs"] = {{"points", pts}};
        break;
      }
    }
    arcs.push_back(arc);
  }
  j["arcs"] = arcs;
  return j;
}

std::string region_csv(const RegionSpec& region, int n_per_arc) {
  std::string out = "arc,x,y\n";
  for (std::size_t i = 0; i < region.arcs.size(); ++i) {
    const Arc& a = region.arcs[i];
    const std::string tag = a.label.empty() ? std::to_string(i) : a.label;
    std::vector<Vec2> pts;
    if (a.kind == Arc::Kind::Sampled) {
      pts = a.pts;
    } else {
      const int n = a.kind == Arc::Kind::Segment ? 2 : n_per_arc;
      for (int k = 0; k < n; ++k) pts.push_back(a.point(static_cast<double>(k) / (n - 1)));
    }
    for (const Vec2& p : pts) out += tag + "," + fmt17(p.x) + "," + fmt17(p.y) + "\n";
  }
  return out;
}

RegionSpec region_from_json(const Json& j) {
  RegionSpec r;
  try {
    r.kind = j.at("kind").get<std::string>();
    for (const auto& [k, v] : j.at("params").items()) r.params.emplace_back(k, v.get<double>());
    for (const Json& a : j.at("arcs")) {
      const std::string id = a.at("formula_id").get<std::string>();
      const std::string label = a.value("label", "");
      const Json& c = a.at("coeffs");
      const Json& dom = a.at("domain");
      Arc arc;
      if (id == "segment") {
        arc = Arc::segment({c.at("a")[0], c.at("a")[1]}, {c.at("b")[0], c.at("b")[1]}, label);
      } else if (id == "power") {
        arc = Arc::power(c.at("A"), c.at("B"), c.at("s"), c.at("q"), dom[0], dom[1], label);
      } else if (id == "circle") {
        arc = Arc::circle({c.at("cx"), c.at("cy")}, c.at("r"), dom[0], dom[1], label);
      } else if (id == "sampled") {
        std::vector<Vec2> pts;
        for (const Json& p : c.at("points")) pts.push_back({p[0], p[1]});
        arc = Arc::sampled(std::move(pts), label);
      } else {
        throw Error(ErrorCode::ConfigError, "unknown arc formula '" + id + "'");
      }
      arc.artificial = a.value("artificial", false);
      r.arcs.push_back(std::move(arc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed region JSON: ") + e.what());
  }
  const std::vector<Vec2> poly = r.polyline(400);
  r.member = [poly](Vec2 p, double) {
    bool in = false;
    for (std::size_t i = 0, k = poly.size() - 1; i < poly.size(); k = i++) {
      const Vec2 a = poly[i], b = poly[k];
      if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
  };
  return r;
}

std::string basin_csv(const BasinMap& map) {
  std::string out = "x0,y0,label,t_decide\n";
  for (int iy = 0; iy < map.grid.ny; ++iy)
    for (int ix = 0; ix < map.grid.nx; ++ix)
      out += fmt17(map.grid.x(ix)) + "," + fmt17(map.grid.y(iy)) + "," + to_string(map.at(ix, iy)) + "," +
             fmt17(map.time_at(ix, iy)) + "\n";
  return out;
}

std::string basin_matrix(const BasinMap& map) {
  const GridSpec& g = map.grid;
  std::string out = "# grid " + fmt17(g.x0) + ":" + fmt17(g.x1) + ":" + std::to_string(g.nx) + "," + fmt17(g.y0) + ":" +
                    fmt17(g.y1) + ":" + std::to_string(g.ny) + " t_phase " + fmt17(g.t_phase) +
                    " (A attracted, B blown up, U undecided; top row is y1)\n";
  for (int iy = g.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < g.nx; ++ix) out += label_char(map.at(ix, iy));
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != header)
    throw Error(ErrorCode::ConfigError, "expected CSV header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    rows.push_back(std::move(cells));
  }
  return rows;
}

double cell_double(const std::string& s, std::size_t row) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ConfigError, "row " + std::to_string(row + 2) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

BasinMap basin_from_csv(const std::string& text) {
  const auto rows = csv_rows(text, "x0,y0,label,t_decide");
  std::set<double> xs, ys;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 4) throw Error(ErrorCode::ConfigError, "row " + std::to_string(i + 2) + ": expected 4 cells");
    xs.insert(cell_double(rows[i][0], i));
    ys.insert(cell_double(rows[i][1], i));
  }
  if (xs.size() < 2 || ys.size() < 2 || xs.size() * ys.size() != rows.size())
    throw Error(ErrorCode::ConfigError, "basin CSV is not a full grid");
  BasinMap map;
  map.grid.x0 = *xs.begin();
  map.grid.x1 = *xs.rbegin();
  map.grid.y0 = *ys.begin();
  map.grid.y1 = *ys.rbegin();
  map.grid.nx = static_cast<int>(xs.size());
  map.grid.ny = static_cast<int>(ys.size());
  map.labels.assign(rows.size(), Label::Undecided);
  map.times.assign(rows.size(), 0.0);
  const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ix = std::lower_bound(xv.begin(), xv.end(), cell_double(rows[i][0], i)) - xv.begin();
    const auto iy = std::lower_bound(yv.begin(), yv.end(), cell_double(rows[i][1], i)) - yv.begin();
    const std::size_t k = static_cast<std::size_t>(iy) * xv.size() + static_cast<std::size_t>(ix);
    const std::string& l = rows[i][2];
    if (l == "attracted") map.labels[k] = Label::Attracted;
    else if (l == "blown_up") map.labels[k] = Label::BlownUp;
    else if (l == "undecided") map.labels[k] = Label::Undecided;
    else throw Error(ErrorCode::ConfigError, "row " + std::to_string(i + 2) + ": unknown label '" + l + "'");
    map.times[k] = cell_double(rows[i][3], i);
  }
  return map;
}

std::vector<PhaseState> trajectory_from_csv(const std::string& text) {
  const auto rows = csv_rows(text, "t,x,y");
  std::vector<PhaseState> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 3) throw Error(ErrorCode::ConfigError, "row " + std::to_string(i + 2) + ": expected 3 cells");
    out.push_back({cell_double(rows[i][1], i), cell_double(rows[i][2], i), cell_double(rows[i][0], i)});
  }
  return out;
}

}  // namespace qattract
