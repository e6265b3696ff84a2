#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "shipdock/vessel_model.hpp"

namespace shipdock {

using Point2 = Eigen::Vector2d;

// Strictly convex polygon with counter-clockwise vertices (in the x-y plane of the frame
// the points live in; for NED that is north-east).
class ConvexPolygon {
 public:
  // Throws DegenerateInput unless the vertices are strictly convex and CCW.
  static ConvexPolygon from_vertices(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool contains(const Point2& p, double tolerance = 0.0) const;

 private:
  explicit ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {}
  std::vector<Point2> vertices_;
};

// Rows a . x <= b with unit-norm a, so residuals are distances in meters.
struct HalfspaceSet {
  struct Row {
    Point2 a;
    double b = 0.0;
  };
  std::vector<Row> rows;

  std::size_t size() const { return rows.size(); }
};

// Monotone-chain hull. Collinear boundary points are dropped. Throws DegenerateInput for
// fewer than three non-collinear points.
ConvexPolygon convex_hull(std::span<const Point2> points);

// Homothety about the body origin by (1 + margin_fraction). The origin must be inside.
ConvexPolygon dilate(const ConvexPolygon& polygon, double margin_fraction);

HalfspaceSet to_halfspaces(const ConvexPolygon& polygon);

// r(i, j) = b_j - a_j . (R(psi) p_i + [x, y]); nonnegative everywhere iff all points are inside.
Eigen::MatrixXd containment_residuals(const HalfspaceSet& region, const Pose& pose,
                                      std::span<const Point2> body_points);

// Index of the first vertex at which the closed polyline turns clockwise (or is collinear)
// relative to its overall orientation, if any.
std::optional<std::size_t> find_reflex_vertex(std::span<const Point2> vertices);

// Twice the signed area; positive for counter-clockwise vertex order.
double signed_area2(std::span<const Point2> vertices);

}  // namespace shipdock
