#include "ctr/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ctr/conic.hpp"

namespace ctr {

namespace {

double cross2(const Vector2d& o, const Vector2d& a, const Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew monotone chain, CCW order.
std::vector<Vector2d> hull2d(std::vector<Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vector2d& a, const Vector2d& b) { return a == b; }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) return pts;
  std::vector<Vector2d> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

using Vector3d = Eigen::Vector3d;

struct Face {
  std::array<int, 3> v;
  Vector3d n;  // outward unit normal
  double off;  // n . x = off on the face plane
  bool alive = true;
};

Face make_face(int a, int b, int c, const std::vector<Vector3d>& pts, const Vector3d& interior) {
  Face f;
  f.v = {a, b, c};
  Vector3d n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  const double norm = n.norm();
  if (norm < 1e-300) {
    f.n = Vector3d(0, 0, 1);
    f.off = 0;
    return f;
  }
  n /= norm;
  if (n.dot(interior - pts[a]) > 0.0) {
    n = -n;
    std::swap(f.v[1], f.v[2]);
  }
  f.n = n;
  f.off = n.dot(pts[a]);
  return f;
}

// Incremental hull; returns faces or empty when the cloud is (near) flat.
std::vector<Face> hull3d(const std::vector<Vector3d>& pts, double scale) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) return {};
  const double eps = 1e-10 * std::max(scale, 1e-12);

  // Initial simplex: spread points along x, then area, then volume.
  int i0 = 0, i1 = -1;
  for (int i = 1; i < n; ++i)
    if ((pts[i] - pts[i0]).norm() > 1e-14) {
      i1 = i;
      break;
    }
  if (i1 < 0) return {};
  int i2 = -1;
  double best = eps;
  for (int i = 0; i < n; ++i) {
    const double a = (pts[i1] - pts[i0]).cross(pts[i] - pts[i0]).norm();
    if (a > best) {
      best = a;
      i2 = i;
    }
  }
  if (i2 < 0) return {};
  int i3 = -1;
  best = eps;
  const Vector3d nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    const double vol = std::abs(nrm.dot(pts[i] - pts[i0]));
    if (vol > best) {
      best = vol;
      i3 = i;
    }
  }
  if (i3 < 0) return {};

  const Vector3d interior = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
  std::vector<Face> faces;
  faces.push_back(make_face(i0, i1, i2, pts, interior));
  faces.push_back(make_face(i0, i1, i3, pts, interior));
  faces.push_back(make_face(i0, i2, i3, pts, interior));
  faces.push_back(make_face(i1, i2, i3, pts, interior));

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    // Visible faces.
    std::vector<int> visible;
    for (size_t fi = 0; fi < faces.size(); ++fi) {
      if (!faces[fi].alive) continue;
      if (faces[fi].n.dot(pts[p]) > faces[fi].off + eps) visible.push_back(static_cast<int>(fi));
    }
    if (visible.empty()) continue;
    // Horizon: edges of visible faces shared with exactly one visible face.
    std::vector<std::pair<int, int>> horizon;
    auto edge_of = [](const Face& f, int k) {
      return std::make_pair(f.v[k], f.v[(k + 1) % 3]);
    };
    for (int fi : visible) {
      for (int k = 0; k < 3; ++k) {
        auto e = edge_of(faces[fi], k);
        bool shared = false;
        for (int fj : visible) {
          if (fj == fi) continue;
          for (int k2 = 0; k2 < 3; ++k2) {
            auto e2 = edge_of(faces[fj], k2);
            if ((e.first == e2.second && e.second == e2.first) ||
                (e.first == e2.first && e.second == e2.second)) {
              shared = true;
              break;
            }
          }
          if (shared) break;
        }
        if (!shared) horizon.push_back(e);
      }
    }
    for (int fi : visible) faces[fi].alive = false;
    for (const auto& e : horizon) faces.push_back(make_face(e.first, e.second, p, pts, interior));
  }

  std::vector<Face> out;
  for (const Face& f : faces)
    if (f.alive) out.push_back(f);
  return out;
}

}  // namespace

HullResult hull_and_radius(const std::vector<VectorXd>& points, int dim) {
  if (dim != 2 && dim != 3) throw Error("bad-input", "hull_and_radius supports dim 2 or 3");
  HullResult result;
  if (points.size() < static_cast<size_t>(dim + 1)) {
    result.degenerate = true;
    return result;
  }

  double scale = 0.0;
  for (const VectorXd& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());

  if (dim == 2) {
    std::vector<Vector2d> pts;
    pts.reserve(points.size());
    for (const VectorXd& p : points) pts.push_back(Vector2d(p[0], p[1]));
    const auto hull = hull2d(pts);
    if (hull.size() < 3) {
      result.degenerate = true;
      return result;
    }
    for (size_t i = 0; i < hull.size(); ++i) {
      const Vector2d& a = hull[i];
      const Vector2d& b = hull[(i + 1) % hull.size()];
      Vector2d d = b - a;
      const double len = d.norm();
      if (len < 1e-14) continue;
      const Vector2d n(d.y() / len, -d.x() / len);  // outward for CCW order
      VectorXd an(2);
      an << n.x(), n.y();
      result.halfspaces.push_back({an, -n.dot(a)});
    }
  } else {
    std::vector<Vector3d> pts;
    pts.reserve(points.size());
    for (const VectorXd& p : points) pts.push_back(Vector3d(p[0], p[1], p[2]));
    const auto faces = hull3d(pts, scale);
    if (faces.empty()) {
      result.degenerate = true;
      return result;
    }
    for (const Face& f : faces) {
      VectorXd an(3);
      an << f.n.x(), f.n.y(), f.n.z();
      result.halfspaces.push_back({an, -f.off});
    }
  }

  if (result.halfspaces.empty()) {
    result.degenerate = true;
    return result;
  }
  result.radius = chebyshev_radius(result.halfspaces);
  return result;
}

}  // namespace ctr
