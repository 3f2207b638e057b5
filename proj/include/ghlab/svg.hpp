// Minimal standalone SVG writer for portraits, curves, level sets and chord overlays.
//
// Elements are emitted in insertion order, so a fixed call sequence yields identical bytes.
// Coordinates are plane coordinates; the y axis is flipped so that it points up.
#pragma once

#include "ghlab/core.hpp"

#include <cstdio>
#include <array>
#include <limits>
#include <string>
#include <vector>

namespace ghlab::svg {

class Document {
 public:
  explicit Document(std::string title = {}) : title_(std::move(title)) {}

  /// Strokes: "curve", "chord", "hull", "level", "snapshot", "arrow".
  void polyline(const std::vector<Vec2>& pts, const std::string& cls, bool closed = false) {
    if (pts.empty()) return;
    for (const auto& p : pts) extend(p);
    std::string s = closed ? "<polygon" : "<polyline";
    s += " class=\"" + cls + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s += ' ';
      s += num(pts[i].x()) + "," + num(-pts[i].y());
    }
    s += "\"/>";
    elements_.push_back({s, false, Vec2::Zero()});
  }

  void segment(const Vec2& a, const Vec2& b, const std::string& cls) { polyline({a, b}, cls); }

  /// Arrow from p along v (already scaled to plane units).
  void arrow(const Vec2& p, const Vec2& v, const std::string& cls = "arrow") {
    const Vec2 tip = p + v;
    const double len = v.norm();
    if (!(len > 0.0) || !tip.allFinite()) return;
    const Vec2 d = v / len, n(-d.y(), d.x());
    const double head = 0.3 * len;
    polyline({p, tip}, cls);
    polyline({tip - head * d + 0.5 * head * n, tip, tip - head * d - 0.5 * head * n}, cls);
  }

  /// Point marks: "center" (disc), "saddle" (square), "source", "sink", "critical" (ring).
  /// Sized relative to the final canvas, so they are resolved when the document is written.
  void mark(const Vec2& p, const std::string& cls, const std::string& label = {}) {
    extend(p);
    std::string s = "class=\"" + cls + "\"";
    if (!label.empty()) s += " data-label=\"" + label + "\"";
    elements_.push_back({s, true, p});
  }

  std::size_t size() const { return elements_.size(); }

  std::string str() const {
    Vec2 lo = lo_, hi = hi_;
    if (!(hi.x() >= lo.x())) {  // nothing drawn
      lo = Vec2(-1, -1);
      hi = Vec2(1, 1);
    }
    double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
    if (!(span > 0.0)) span = 2.0;
    const double margin = 0.05 * span;
    const double x0 = lo.x() - margin, y0 = -hi.y() - margin;
    const double w = hi.x() - lo.x() + 2 * margin, h = hi.y() - lo.y() + 2 * margin;
    const double r = 0.01 * span;

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" +
           num(800.0 * h / w) + "\" viewBox=\"" + num(x0) + " " + num(y0) + " " + num(w) + " " +
           num(h) + "\">\n";
    if (!title_.empty()) out += "<title>" + title_ + "</title>\n";
    out +=
        "<style>\n"
        "polyline, polygon { fill: none; vector-effect: non-scaling-stroke; stroke-width: 1.5; }\n"
        ".curve { stroke: #1f4e9c; }\n"
        ".snapshot { stroke: #9bb3d9; stroke-width: 0.8; }\n"
        ".chord { stroke: #333333; stroke-dasharray: 4 3; }\n"
        ".hull { stroke: #c0392b; stroke-width: 2; }\n"
        ".level { stroke: #7d3c98; stroke-width: 0.8; }\n"
        ".arrow { stroke: #5d6d7e; stroke-width: 0.7; }\n"
        ".center { fill: #000000; }\n"
        ".saddle { fill: #e67e22; }\n"
        ".source, .sink, .critical { fill: none; stroke: #27ae60; "
        "vector-effect: non-scaling-stroke; stroke-width: 1.5; }\n"
        "</style>\n";
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(w) + "\" height=\"" +
           num(h) + "\" fill=\"#ffffff\"/>\n";
    for (const auto& e : elements_) {
      if (!e.is_mark) {
        out += e.text + "\n";
        continue;
      }
      const std::string cx = num(e.at.x()), cy = num(-e.at.y());
      if (e.text.find("\"saddle\"") != std::string::npos)
        out += "<rect " + e.text + " x=\"" + num(e.at.x() - r) + "\" y=\"" + num(-e.at.y() - r) +
               "\" width=\"" + num(2 * r) + "\" height=\"" + num(2 * r) + "\"/>\n";
      else
        out += "<circle " + e.text + " cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"" + num(r) + "\"/>\n";
    }
    out += "</svg>\n";
    return out;
  }

 private:
  struct Element {
    std::string text;
    bool is_mark;
    Vec2 at;
  };

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  void extend(const Vec2& p) {
    if (!p.allFinite()) return;
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }

  std::string title_;
  std::vector<Element> elements_;
  Vec2 lo_ = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi_ = Vec2::Constant(-std::numeric_limits<double>::infinity());
};

/// Segments of the level set {f = level} on a regular grid by marching squares. `values` is
/// row-major with u fastest; grid nodes run over [lo, hi] in each coordinate. Cells touching a
/// non-finite value are skipped. Saddle cells are resolved by the cell-center average.
inline std::vector<std::array<Vec2, 2>> marching_squares(const std::vector<double>& values,
                                                         int n_u, int n_w, Vec2 lo, Vec2 hi,
                                                         double level) {
  require(n_u >= 2 && n_w >= 2 && values.size() == static_cast<std::size_t>(n_u * n_w),
          ErrorKind::InvalidInput, "level-set grid has the wrong size");
  std::vector<std::array<Vec2, 2>> out;
  auto node = [&](int i, int j) {
    return Vec2(lo.x() + (hi.x() - lo.x()) * i / (n_u - 1), lo.y() + (hi.y() - lo.y()) * j / (n_w - 1));
  };
  for (int j = 0; j + 1 < n_w; ++j)
    for (int i = 0; i + 1 < n_u; ++i) {
      // Corners counter-clockwise from (i, j).
      const std::array<std::pair<int, int>, 4> ij{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
      std::array<double, 4> v{};
      bool ok = true;
      for (int k = 0; k < 4; ++k) {
        v[k] = values[ij[k].second * n_u + ij[k].first] - level;
        ok = ok && std::isfinite(v[k]);
      }
      if (!ok) continue;
      std::vector<Vec2> cuts;  // crossing points on edges 0..3 in order
      for (int k = 0; k < 4; ++k) {
        const double a = v[k], b = v[(k + 1) % 4];
        if ((a > 0.0) != (b > 0.0)) {
          const double t = a / (a - b);
          const Vec2 pa = node(ij[k].first, ij[k].second);
          const Vec2 pb = node(ij[(k + 1) % 4].first, ij[(k + 1) % 4].second);
          cuts.push_back(pa + t * (pb - pa));
        }
      }
      if (cuts.size() == 2) {
        out.push_back({cuts[0], cuts[1]});
      } else if (cuts.size() == 4) {
        // Ambiguous cell: when the center shares the sign of corners 0 and 2 they are joined
        // through it, and the contour cuts off corners 1 and 3 instead.
        const double center = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        if ((center > 0.0) == (v[0] > 0.0)) {
          out.push_back({cuts[0], cuts[1]});
          out.push_back({cuts[2], cuts[3]});
        } else {
          out.push_back({cuts[3], cuts[0]});
          out.push_back({cuts[1], cuts[2]});
        }
      }
    }
  return out;
}

}  // namespace ghlab::svg
