#include "qattract/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qattract {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* label_color(Label l) {
  switch (l) {
    case Label::Attracted: return "#bcd7f0";
    case Label::BlownUp: return "#f3c1bd";
    case Label::Undecided: return "#d0d0d0";
  }
  return "#d0d0d0";
}

}  // namespace

void SvgPlot::set_window(Vec2 lo, Vec2 hi) {
  if (!(hi.x > lo.x) || !(hi.y > lo.y)) throw Error(ErrorCode::InvalidArgument, "plot window is degenerate");
  window_ = {lo, hi};
}

void SvgPlot::add_basin(const BasinMap& map) { basin_ = map; }

void SvgPlot::add_region(const RegionSpec& region, const std::string& color, const std::string& name) {
  add_curve(region.polyline(200), color, name, true);
}

void SvgPlot::add_curve(std::vector<Vec2> pts, const std::string& color, const std::string& name, bool closed) {
  std::erase_if(pts, [](Vec2 p) { return !std::isfinite(p.x) || !std::isfinite(p.y); });
  if (pts.empty()) return;
  curves_.push_back({std::move(pts), color, name, closed});
}

std::string SvgPlot::render() const {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-lo.x, -lo.y};
  if (window_) {
    lo = window_->first;
    hi = window_->second;
  } else {
    auto grow = [&](Vec2 p) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    };
    if (basin_) {
      grow({basin_->grid.x0, basin_->grid.y0});
      grow({basin_->grid.x1, basin_->grid.y1});
    }
    for (const Curve& c : curves_)
      for (Vec2 p : c.pts) grow(p);
    if (!std::isfinite(lo.x)) {
      lo = {-1.0, -1.0};
      hi = {1.0, 1.0};
    }
    if (hi.x - lo.x <= 0.0) hi.x = lo.x + 1.0;
    if (hi.y - lo.y <= 0.0) hi.y = lo.y + 1.0;
  }
  const double sx = (kWidth - 2 * kMargin) / (hi.x - lo.x);
  const double sy = (kHeight - 2 * kMargin) / (hi.y - lo.y);
  auto X = [&](double x) { return kMargin + (x - lo.x) * sx; };
  auto Y = [&](double y) { return kHeight - kMargin - (y - lo.y) * sy; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" width=\"" +
       num(kWidth) + "\" height=\"" + num(kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
  s += "<clipPath id=\"plot\"><rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" +
       num(kWidth - 2 * kMargin) + "\" height=\"" + num(kHeight - 2 * kMargin) + "\"/></clipPath>\n";
  s += "<g clip-path=\"url(#plot)\">\n";

  if (basin_) {
    const GridSpec& g = basin_->grid;
    const double dx = (g.x1 - g.x0) / (g.nx - 1);
    const double dy = (g.y1 - g.y0) / (g.ny - 1);
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const double x = g.x(ix) - dx / 2;
        const double y = g.y(iy) + dy / 2;
        s += "<rect x=\"" + num(X(x)) + "\" y=\"" + num(Y(y)) + "\" width=\"" + num(dx * sx) + "\" height=\"" +
             num(dy * sy) + "\" fill=\"" + label_color(basin_->at(ix, iy)) + "\"/>\n";
      }
    }
  }

  // Axes through the origin when visible.
  if (lo.x <= 0.0 && hi.x >= 0.0)
    s += "<line x1=\"" + num(X(0)) + "\" y1=\"" + num(Y(lo.y)) + "\" x2=\"" + num(X(0)) + "\" y2=\"" + num(Y(hi.y)) +
         "\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";
  if (lo.y <= 0.0 && hi.y >= 0.0)
    s += "<line x1=\"" + num(X(lo.x)) + "\" y1=\"" + num(Y(0)) + "\" x2=\"" + num(X(hi.x)) + "\" y2=\"" + num(Y(0)) +
         "\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";

  for (const Curve& c : curves_) {
    s += std::string("<") + (c.closed ? "polygon" : "polyline") + " fill=\"none\" stroke=\"" + escape(c.color) +
         "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.pts.size(); ++i) {
      if (i) s += " ";
      s += num(X(c.pts[i].x)) + "," + num(Y(c.pts[i].y));
    }
    s += "\"/>\n";
  }
  s += "</g>\n";

  // Frame, tick labels and legend.
  s += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(kWidth - 2 * kMargin) +
       "\" height=\"" + num(kHeight - 2 * kMargin) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string font = "\" font-family=\"sans-serif\" font-size=\"12\"";
  s += "<text x=\"" + num(kMargin) + "\" y=\"" + num(kHeight - kMargin + 18) + font + ">" + num(lo.x) + "</text>\n";
  s += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kHeight - kMargin + 18) + font +
       " text-anchor=\"end\">" + num(hi.x) + "</text>\n";
  s += "<text x=\"" + num(kMargin - 6) + "\" y=\"" + num(kHeight - kMargin) + font + " text-anchor=\"end\">" +
       num(lo.y) + "</text>\n";
  s += "<text x=\"" + num(kMargin - 6) + "\" y=\"" + num(kMargin + 10) + font + " text-anchor=\"end\">" + num(hi.y) +
       "</text>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 20) + font + " text-anchor=\"middle\">x</text>\n";
  s += "<text x=\"20\" y=\"" + num(kHeight / 2) + font + " text-anchor=\"middle\">y</text>\n";
  if (!title_.empty())
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"30\"" + font.substr(1) + " text-anchor=\"middle\">" + escape(title_) +
         "</text>\n";

  double ly = kMargin + 16;
  const double lx = kWidth - kMargin - 150;
  auto legend = [&](const std::string& color, const std::string& name, bool box) {
    if (box)
      s += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 9) + "\" width=\"14\" height=\"10\" fill=\"" + color + "\"/>\n";
    else
      s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 14) + "\" y2=\"" + num(ly - 4) +
           "\" stroke=\"" + escape(color) + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 20) + "\" y=\"" + num(ly) + font + ">" + escape(name) + "</text>\n";
    ly += 16;
  };
  if (basin_) {
    legend(label_color(Label::Attracted), "attracted", true);
    legend(label_color(Label::BlownUp), "blown up", true);
    if (basin_->count(Label::Undecided) > 0) legend(label_color(Label::Undecided), "undecided", true);
  }
  for (const Curve& c : curves_)
    if (!c.name.empty()) legend(c.color, c.name, false);
  s += "</svg>\n";
  return s;
}

}  // namespace qattract
