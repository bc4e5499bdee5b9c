#include "svg.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

namespace qlc::cli {

namespace {

std::string fixed(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  std::string s(buf, res.ptr);
  return s == "-0.00" ? "0.00" : s;
}

const char* colour(SingularKind kind) {
  switch (kind) {
    case SingularKind::Saddle: return "#d62728";
    case SingularKind::StableFocus:
    case SingularKind::StableNode: return "#2ca02c";
    case SingularKind::UnstableFocus:
    case SingularKind::UnstableNode: return "#ff7f0e";
    case SingularKind::LinearCenter: return "#1f77b4";
    case SingularKind::Degenerate: return "#7f7f7f";
  }
  return "#000000";
}

// Liang-Barsky clip of the infinite line {n . p = offset} to the view.
std::optional<std::pair<Vec2, Vec2>> clip_line(const PortraitView& v, const Line& l) {
  const Vec2 dir{-l.normal.y, l.normal.x};
  const Vec2 p0 = l.offset * l.normal;
  double t0 = -1e300, t1 = 1e300;
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    const double r = q / p;
    if (p < 0.0) t0 = std::max(t0, r);
    else t1 = std::min(t1, r);
    return t0 <= t1;
  };
  if (!clip(-dir.x, p0.x - v.x_min) || !clip(dir.x, v.x_max - p0.x) || !clip(-dir.y, p0.y - v.y_min) ||
      !clip(dir.y, v.y_max - p0.y)) {
    return std::nullopt;
  }
  return std::pair{p0 + t0 * dir, p0 + t1 * dir};
}

}  // namespace

std::string render_svg(const PortraitView& view, const std::vector<Trajectory>& orbits,
                       const std::vector<Line>& lines, const std::vector<SingularPoint>& points) {
  const double sx = view.width / (view.x_max - view.x_min);
  const double sy = view.height / (view.y_max - view.y_min);
  auto px = [&](Vec2 p) { return fixed((p.x - view.x_min) * sx) + "," + fixed((view.y_max - p.y) * sy); };
  auto inside = [&](Vec2 p) {
    return p.x >= view.x_min && p.x <= view.x_max && p.y >= view.y_min && p.y <= view.y_max;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(view.width) + "\" height=\"" +
         std::to_string(view.height) + "\" viewBox=\"0 0 " + std::to_string(view.width) + " " +
         std::to_string(view.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& l : lines) {
    if (auto seg = clip_line(view, l)) {
      const auto [a, b] = *seg;
      const auto pa = px(a), pb = px(b);
      const auto ca = pa.find(','), cb = pb.find(',');
      out += "<line x1=\"" + pa.substr(0, ca) + "\" y1=\"" + pa.substr(ca + 1) + "\" x2=\"" + pb.substr(0, cb) +
             "\" y2=\"" + pb.substr(cb + 1) + "\" stroke=\"#9467bd\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
    }
  }

  for (const auto& orbit : orbits) {
    std::string pts;
    auto flush = [&] {
      if (pts.find(' ') != std::string::npos) {
        out += "<polyline fill=\"none\" stroke=\"#333333\" stroke-width=\"0.8\" points=\"" + pts + "\"/>\n";
      }
      pts.clear();
    };
    for (const auto& p : orbit.points) {
      if (!inside(p)) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += px(p);
    }
    flush();
  }

  for (const auto& sp : points) {
    if (!inside(sp.location)) continue;
    const auto c = px(sp.location);
    const auto comma = c.find(',');
    out += "<circle cx=\"" + c.substr(0, comma) + "\" cy=\"" + c.substr(comma + 1) + "\" r=\"4\" fill=\"" +
           colour(sp.kind) + "\"><title>" + std::string(to_string(sp.kind)) + "</title></circle>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace qlc::cli
