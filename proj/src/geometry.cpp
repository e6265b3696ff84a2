#include "shipdock/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

ConvexPolygon ConvexPolygon::from_vertices(std::vector<Point2> vertices) {
  if (vertices.size() < 3) throw DegenerateInput("polygon needs at least three vertices");
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    const Point2& c = vertices[(i + 2) % n];
    if (!(cross(a, b, c) > 0.0)) {
      throw DegenerateInput("polygon is not strictly convex and counter-clockwise at vertex " +
                            std::to_string((i + 1) % n));
    }
  }
  // Consecutive left turns can still wind twice around; the winding check rules that out.
  double total_turn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e1 = vertices[(i + 1) % n] - vertices[i];
    const Point2 e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    total_turn += std::atan2(e1.x() * e2.y() - e1.y() * e2.x(), e1.dot(e2));
  }
  if (std::abs(total_turn - 2.0 * std::numbers::pi) > 1e-6) {
    throw DegenerateInput("polygon is self-intersecting");
  }
  return ConvexPolygon(std::move(vertices));
}

bool ConvexPolygon::contains(const Point2& p, double tolerance) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % n];
    const double len = (b - a).norm();
    if (cross(a, b, p) / len < -tolerance) return false;
  }
  return true;
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw DegenerateInput("convex hull needs three distinct points");

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw DegenerateInput("convex hull input is collinear");
  return ConvexPolygon::from_vertices(std::move(hull));
}

ConvexPolygon dilate(const ConvexPolygon& polygon, double margin_fraction) {
  if (!(margin_fraction >= 0.0)) throw PreconditionError("safety margin must be nonnegative");
  if (!polygon.contains(Point2::Zero())) {
    throw PreconditionError("dilate: polygon does not contain the body origin");
  }
  std::vector<Point2> scaled;
  scaled.reserve(polygon.size());
  for (const Point2& v : polygon.vertices()) scaled.push_back((1.0 + margin_fraction) * v);
  return ConvexPolygon::from_vertices(std::move(scaled));
}

HalfspaceSet to_halfspaces(const ConvexPolygon& polygon) {
  HalfspaceSet set;
  const auto& v = polygon.vertices();
  const std::size_t n = v.size();
  set.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 edge = v[(i + 1) % n] - v[i];
    // Outward normal of a CCW edge is the edge rotated clockwise.
    const Point2 normal = Point2(edge.y(), -edge.x()).normalized();
    // Average both endpoints so the row is tight on each to rounding.
    const double b = 0.5 * (normal.dot(v[i]) + normal.dot(v[(i + 1) % n]));
    set.rows.push_back({normal, b});
  }
  return set;
}

Eigen::MatrixXd containment_residuals(const HalfspaceSet& region, const Pose& pose,
                                      std::span<const Point2> body_points) {
  const Eigen::Matrix2d R = rotation_planar(pose.psi());
  const Point2 offset(pose.x(), pose.y());
  Eigen::MatrixXd residuals(static_cast<Eigen::Index>(body_points.size()),
                            static_cast<Eigen::Index>(region.size()));
  for (std::size_t i = 0; i < body_points.size(); ++i) {
    const Point2 p = R * body_points[i] + offset;
    for (std::size_t j = 0; j < region.size(); ++j) {
      residuals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          region.rows[j].b - region.rows[j].a.dot(p);
    }
  }
  return residuals;
}

double signed_area2(std::span<const Point2> vertices) {
  double area = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    area += a.x() * b.y() - b.x() * a.y();
  }
  return area;
}

std::optional<std::size_t> find_reflex_vertex(std::span<const Point2> vertices) {
  const std::size_t n = vertices.size();
  const double orientation = signed_area2(vertices) >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& prev = vertices[(i + n - 1) % n];
    const Point2& cur = vertices[i];
    const Point2& next = vertices[(i + 1) % n];
    if (!(orientation * cross(prev, cur, next) > 0.0)) return i;
  }
  return std::nullopt;
}

}  // namespace shipdock
