#include "disloc/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace disloc {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace

SvgCanvas::SvgCanvas(Vec2 lo, Vec2 hi, int width_px) : lo_(lo), hi_(hi), wpx_(width_px) {
  const double w = hi.x - lo.x, h = hi.y - lo.y;
  scale_ = width_px / w;
  hpx_ = static_cast<int>(h * scale_ + 0.5);
}

Vec2 SvgCanvas::to_px(Vec2 w) const {
  return {(w.x - lo_.x) * scale_, (hi_.y - w.y) * scale_};  // y grows downward in SVG
}

void SvgCanvas::polyline(const std::vector<Vec2>& pts, const std::string& color, double width_px,
                         double opacity) {
  if (pts.size() < 2) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + fmt(width_px) +
           "\"";
  if (opacity < 1.0) body_ += " stroke-opacity=\"" + fmt(opacity) + "\"";
  body_ += " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 p = to_px(pts[i]);
    if (i) body_ += ' ';
    body_ += fmt(p.x) + "," + fmt(p.y);
  }
  body_ += "\"/>\n";
}

void SvgCanvas::closed_path(const std::vector<Vec2>& pts, const std::string& stroke,
                            double width_px, const std::string& fill) {
  if (pts.size() < 3) return;
  body_ += "<path fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           fmt(width_px) + "\" d=\"M";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 p = to_px(pts[i]);
    body_ += (i ? " L" : "") + std::string(" ") + fmt(p.x) + " " + fmt(p.y);
  }
  body_ += " Z\"/>\n";
}

void SvgCanvas::circle(Vec2 c, double r_world, const std::string& stroke, double width_px,
                       const std::string& fill) {
  const Vec2 p = to_px(c);
  body_ += "<circle cx=\"" + fmt(p.x) + "\" cy=\"" + fmt(p.y) + "\" r=\"" +
           fmt(r_world * scale_) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
           "\" stroke-width=\"" + fmt(width_px) + "\"/>\n";
}

void SvgCanvas::rect_world(Vec2 lo, Vec2 hi, const std::string& fill) {
  const Vec2 a = to_px({lo.x, hi.y}), b = to_px({hi.x, lo.y});
  body_ += "<rect x=\"" + fmt(a.x) + "\" y=\"" + fmt(a.y) + "\" width=\"" + fmt(b.x - a.x) +
           "\" height=\"" + fmt(b.y - a.y) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(Vec2 at_world, const std::string& s, int font_px, const std::string& color) {
  const Vec2 p = to_px(at_world);
  body_ += "<text x=\"" + fmt(p.x) + "\" y=\"" + fmt(p.y) + "\" font-size=\"" +
           std::to_string(font_px) + "\" font-family=\"sans-serif\" fill=\"" + color + "\">" + s +
           "</text>\n";
}

void SvgCanvas::line(Vec2 a, Vec2 b, const std::string& color, double width_px) {
  const Vec2 pa = to_px(a), pb = to_px(b);
  body_ += "<line x1=\"" + fmt(pa.x) + "\" y1=\"" + fmt(pa.y) + "\" x2=\"" + fmt(pb.x) +
           "\" y2=\"" + fmt(pb.y) + "\" stroke=\"" + color + "\" stroke-width=\"" + fmt(width_px) +
           "\"/>\n";
}

std::string SvgCanvas::str() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(wpx_) + "\" height=\"" + std::to_string(hpx_) + "\" viewBox=\"0 0 " +
         std::to_string(wpx_) + " " + std::to_string(hpx_) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

std::string histogram_svg(const std::vector<double>& bin_edges, const std::vector<long>& counts,
                          const std::string& title) {
  const long peak = counts.empty() ? 1 : std::max<long>(1, *std::max_element(counts.begin(), counts.end()));
  const double x_lo = bin_edges.empty() ? 0.0 : bin_edges.front();
  const double x_hi = bin_edges.empty() ? 1.0 : bin_edges.back();
  const double pad_x = 0.08 * (x_hi - x_lo + 1e-12);
  SvgCanvas svg({x_lo - pad_x, -0.18 * peak}, {x_hi + pad_x, 1.12 * peak}, 720);
  for (std::size_t i = 0; i + 1 < bin_edges.size() && i < counts.size(); ++i) {
    if (counts[i] <= 0) continue;
    svg.rect_world({bin_edges[i], 0.0}, {bin_edges[i + 1], static_cast<double>(counts[i])},
                   "#4878b0");
  }
  svg.line({x_lo, 0.0}, {x_hi, 0.0}, "#333", 1.0);
  svg.text({x_lo, 1.07 * peak}, title, 14);
  svg.text({x_lo, -0.1 * peak}, fmt(x_lo), 11);
  svg.text({x_hi - pad_x, -0.1 * peak}, fmt(x_hi), 11);
  return svg.str();
}

}  // namespace disloc
