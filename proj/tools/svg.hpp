#pragma once

#include <string>
#include <vector>

#include "qlc/flow.hpp"
#include "qlc/isocline.hpp"
#include "qlc/singular.hpp"

namespace qlc::cli {

struct PortraitView {
  double x_min = -2.0, x_max = 1.0;
  double y_min = -2.0, y_max = 1.0;
  int width = 600;
  int height = 600;
};

/// Orbits as polylines (split where they leave the view), isocline lines
/// dashed, singular points as circles coloured by kind.
std::string render_svg(const PortraitView& view, const std::vector<Trajectory>& orbits,
                       const std::vector<Line>& lines, const std::vector<SingularPoint>& points);

}  // namespace qlc::cli
