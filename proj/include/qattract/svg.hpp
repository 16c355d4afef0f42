#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qattract/basin.hpp"
#include "qattract/region.hpp"

namespace qattract {

/// Phase-plane figure. The canvas is 800 x 600 user units with a 60-unit
/// margin; x grows to the right, y upward. The data window is the union of
/// everything added unless set_window is called.
class SvgPlot {
 public:
  void set_window(Vec2 lo, Vec2 hi);
  void set_title(std::string title) { title_ = std::move(title); }

  /// One rectangle per grid cell; attracted light blue, blown up light red,
  /// undecided grey.
  void add_basin(const BasinMap& map);
  void add_region(const RegionSpec& region, const std::string& color, const std::string& name);
  void add_curve(std::vector<Vec2> pts, const std::string& color, const std::string& name, bool closed = false);

  bool empty() const { return curves_.empty() && !basin_; }
  std::string render() const;

 private:
  struct Curve {
    std::vector<Vec2> pts;
    std::string color;
    std::string name;
    bool closed = false;
  };
  std::vector<Curve> curves_;
  std::optional<BasinMap> basin_;
  std::optional<std::pair<Vec2, Vec2>> window_;
  std::string title_;
};

}  // namespace qattract
