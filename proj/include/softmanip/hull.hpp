#pragma once

#include <vector>

#include "softmanip/model_core.hpp"

namespace softmanip {

// Area of the 2D convex hull and its vertices in counter-clockwise
// order (monotone chain). Degenerate clouds give area 0.
struct Hull2D {
  double area = 0.0;
  std::vector<Eigen::Vector2d> vertices;
};
Hull2D convex_hull_2d(const std::vector<Eigen::Vector2d>& pts);

// Volume of the 3D convex hull (incremental construction). Degenerate
// clouds (coplanar or worse) give volume 0.
double convex_hull_volume(const std::vector<Vec3>& pts);

}  // namespace softmanip
