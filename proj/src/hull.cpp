#include "softmanip/hull.hpp"

#include <algorithm>
#include <cmath>

namespace softmanip {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
              const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

struct Face {
  int a, b, c;
  Vec3 n;       // outward normal (not normalized)
  double off;   // n . vertex_a
  bool alive = true;
};

double signed_dist(const Face& f, const Vec3& p) { return f.n.dot(p) - f.off; }

}  // namespace

Hull2D convex_hull_2d(const std::vector<Eigen::Vector2d>& pts) {
  Hull2D h;
  std::vector<Eigen::Vector2d> p = pts;
  std::sort(p.begin(), p.end(), [](const auto& u, const auto& v) {
    return u.x() < v.x() || (u.x() == v.x() && u.y() < v.y());
  });
  p.erase(std::unique(p.begin(), p.end(),
                      [](const auto& u, const auto& v) { return u == v; }),
          p.end());
  const int n = static_cast<int>(p.size());
  if (n < 3) {
    h.vertices = p;
    return h;
  }
  // Scale-aware collinearity tolerance so points that lie on a hull edge up
  // to rounding are dropped consistently (cross products scale as area).
  const double span = std::max(
      {1e-300, p.back().x() - p.front().x(),
       std::max_element(p.begin(), p.end(),
                        [](const auto& u, const auto& v) {
                          return u.y() < v.y();
                        })->y() -
           std::min_element(p.begin(), p.end(),
                            [](const auto& u, const auto& v) {
                              return u.y() < v.y();
                            })->y()});
  const double eps = 1e-10 * span * span;
  std::vector<Eigen::Vector2d> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p[i]) <= eps) --k;
    hull[k++] = p[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {  // upper chain
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], p[i]) <= eps) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  h.vertices = hull;
  double area2 = 0.0;
  for (std::size_t i = 0; i < h.vertices.size(); ++i) {
    const auto& a = h.vertices[i];
    const auto& b = h.vertices[(i + 1) % h.vertices.size()];
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  h.area = 0.5 * std::abs(area2);
  return h;
}

double convex_hull_volume(const std::vector<Vec3>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) return 0.0;

  // Scale-aware degeneracy threshold.
  Vec3 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max(1.0, (hi - lo).norm());
  const double eps = 1e-10 * scale;

  // Seed tetrahedron: two extreme points, then farthest from the line,
  // then farthest from the plane.
  int i0 = 0, i1 = -1;
  for (int i = 1; i < n; ++i)
    if ((pts[i] - pts[i0]).norm() > eps) {
      i1 = i;
      break;
    }
  if (i1 < 0) return 0.0;
  int i2 = -1;
  double best = eps;
  const Vec3 e01 = pts[i1] - pts[i0];
  for (int i = 0; i < n; ++i) {
    const double d = e01.cross(pts[i] - pts[i0]).norm() / e01.norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0) return 0.0;
  const Vec3 nrm = e01.cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(nrm.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 < 0) return 0.0;

  std::vector<Face> faces;
  auto add_face = [&](int a, int b, int c, const Vec3& inside) {
    Face f;
    f.a = a;
    f.b = b;
    f.c = c;
    f.n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    f.off = f.n.dot(pts[a]);
    if (signed_dist(f, inside) > 0.0) {  // flip so the normal points out
      std::swap(f.b, f.c);
      f.n = -f.n;
      f.off = f.n.dot(pts[f.a]);
    }
    faces.push_back(f);
  };
  const Vec3 centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  add_face(i0, i1, i2, centroid);
  add_face(i0, i1, i3, centroid);
  add_face(i0, i2, i3, centroid);
  add_face(i1, i2, i3, centroid);

  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    // Collect faces visible from pts[i].
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (faces[f].alive &&
          signed_dist(faces[f], pts[i]) > eps * faces[f].n.norm())
        visible.push_back(f);
    }
    if (visible.empty()) continue;
    // Horizon = edges shared by exactly one visible face.
    struct Edge {
      int u, v;
    };
    std::vector<Edge> horizon;
    auto toggle = [&](int u, int v) {
      for (std::size_t k = 0; k < horizon.size(); ++k) {
        if ((horizon[k].u == u && horizon[k].v == v) ||
            (horizon[k].u == v && horizon[k].v == u)) {
          horizon.erase(horizon.begin() + k);
          return;
        }
      }
      horizon.push_back({u, v});
    };
    for (int f : visible) {
      toggle(faces[f].a, faces[f].b);
      toggle(faces[f].b, faces[f].c);
      toggle(faces[f].c, faces[f].a);
      faces[f].alive = false;
    }
    for (const auto& e : horizon) add_face(e.u, e.v, i, centroid);
  }

  double vol6 = 0.0;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    vol6 += pts[f.a].dot(pts[f.b].cross(pts[f.c]));
  }
  return std::abs(vol6) / 6.0;
}

}  // namespace softmanip
