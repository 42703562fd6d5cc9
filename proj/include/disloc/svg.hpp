#pragma once

#include <string>
#include <vector>

#include "disloc/vec.hpp"

namespace disloc {

// Minimal deterministic SVG 1.1 writer: fixed number formatting, no metadata
// or timestamps, so identical inputs produce byte-identical files.
class SvgCanvas {
 public:
  // world-coordinate view box, rendered at the given pixel width
  SvgCanvas(Vec2 lo, Vec2 hi, int width_px = 720);

  void polyline(const std::vector<Vec2>& pts, const std::string& color, double width_px,
                double opacity = 1.0);
  void closed_path(const std::vector<Vec2>& pts, const std::string& stroke, double width_px,
                   const std::string& fill = "none");
  void circle(Vec2 c, double r_world, const std::string& stroke, double width_px,
              const std::string& fill = "none");
  void rect_world(Vec2 lo, Vec2 hi, const std::string& fill);
  void text(Vec2 at_world, const std::string& s, int font_px, const std::string& color = "#333");
  void line(Vec2 a, Vec2 b, const std::string& color, double width_px);

  std::string str() const;

 private:
  Vec2 to_px(Vec2 w) const;
  double scale_ = 1.0;
  Vec2 lo_, hi_;
  int wpx_ = 0, hpx_ = 0;
  std::string body_;
};

// simple vertical-bar histogram plot
std::string histogram_svg(const std::vector<double>& bin_edges, const std::vector<long>& counts,
                          const std::string& title);

}  // namespace disloc
