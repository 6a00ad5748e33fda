// Coordinate systems and metric profiles for rotationally invariant geometry
// on the unit ball, plus the (theta, t) strip reduction used for rotational
// minimal surfaces in the Poincare metric.
//
// Conventions:
//   * Ball model: meridian half-disk coordinates (r, z), r >= 0, r^2+z^2 < 1.
//     The metric is conformal, ds = phi(r,z) |dx|, with phi == 1 (Euclidean)
//     or phi = 2/(1-r^2-z^2) (Poincare).
//   * Upper half-space model: (x, y, z), z > 0, ds = |dx| / z.
//   * Strip coordinates: theta = arcsin(z/R) in (0, pi/2], t = log R, where
//     R = |x|. A surface of revolution about the axis is minimal iff its
//     (theta, t) profile is a geodesic of the weight lambda_weight(theta).
#pragma once

#include <cstdint>
#include <vector>

#include "thetalam/numerics.hpp"

namespace thetalam::geom {

enum class MetricKind { Euclidean, Poincare };

struct MetricProfile {
  MetricKind kind = MetricKind::Euclidean;

  static MetricProfile euclidean() { return {MetricKind::Euclidean}; }
  static MetricProfile poincare() { return {MetricKind::Poincare}; }

  // Conformal factor phi(r,z); positive on the open half-disk.
  double conformal_factor(double r, double z) const;
  // Gradient of log phi, as (d/dr, d/dz).
  Vec2 grad_log_factor(double r, double z) const;
  bool is_euclidean() const { return kind == MetricKind::Euclidean; }
};

struct StripPoint {
  double theta = 0.0;  // angle with the horizontal, in (0, pi/2]
  double t = 0.0;      // log R
};

// Hyperbolic distance from the axis of the cone {theta = alpha}:
// |ln tan(alpha/2)|. Strictly decreasing on (0, pi/2], zero at pi/2.
double cone_distance(double alpha);
// Inverse of cone_distance: the cone angle at hyperbolic distance s >= 0.
double cone_angle(double s);

// Strip coordinates of a point of the upper half-space model.
StripPoint strip_coords(double x, double y, double z);

// Weight of the strip metric: 2*pi*cos(theta)/sin^2(theta).
double lambda_weight(double theta);
// d lambda / d theta (negative on (0, pi/2)).
double lambda_weight_deriv(double theta);

// Gauss curvature of the strip metric: tan^2(theta)(tan^2(theta)-2)/(4 pi^2).
// Vanishes exactly at arctan(sqrt 2); negative below, positive above.
double strip_curvature(double theta);

// ---------------------------------------------------------------------------
// Meridian-plane maps between the ball model and the upper half-space model.
// Both act on (r, z) with r >= 0; the south pole of the ball maps to the
// origin, the vertical diameter to the positive z-axis, and the equatorial
// disk {z=0} to the unit hemisphere (t = 0).

struct PlanePoint {
  double r = 0.0, z = 0.0;
};

PlanePoint uhs_from_ball(const PlanePoint& p);
PlanePoint ball_from_uhs(const PlanePoint& q);
StripPoint strip_from_ball(const PlanePoint& p);
PlanePoint ball_from_strip(const StripPoint& s);

// Ideal strip height of the boundary circle at ball height a in (0,1):
// t = artanh(a). The circle at height -a sits at -artanh(a).
double ideal_t_of_height(double a);

// Hyperbolic distance from a strip point to the hemisphere {t = t0}
// (equidistant formula sinh d = |sinh(t - t0)| / sin theta).
double strip_distance_to_hemisphere(const StripPoint& p, double t0);

// ---------------------------------------------------------------------------
// Uniform Cartesian grid on the meridian half-disk {r >= 0, r^2+z^2 <= Rb^2},
// cell size h = 2/grid_n. A cell is included when all four of its corners lie
// inside the disk of radius Rb; nodes are active when they touch an included
// cell. Active nodes that touch a missing lattice cell carry Dirichlet data
// (tag OuterSphere); nodes on r = 0 are tagged Axis and stay free.
//
// Triangulation: every included cell is split into two right triangles. The
// diagonal runs SW-NE below the equator and NW-SE above it, so the mesh is
// exactly symmetric under z -> -z.

enum class NodeTag : std::uint8_t { Inactive = 0, Interior, Axis, OuterSphere };

// Right triangle with legs h; `shape` indexes the four leg orientations
// (0,1: below the equator, 2,3: above). Vertices are counterclockwise.
struct Triangle {
  int n0, n1, n2;
  std::uint8_t shape;
};

// Unit hat-function gradients for each shape, to be scaled by 1/h:
// grads[shape][vertex] = (d/dr, d/dz) of the vertex's barycentric function.
extern const double kTriGrad[4][3][2];

class HalfDiskGrid {
 public:
  // grid_n: number of cells across the vertical diameter (even, >= 8).
  // boundary_radius: Dirichlet circle radius (1 for Euclidean, 1-delta for
  // the Poincare exhaustion).
  HalfDiskGrid(int grid_n, double boundary_radius = 1.0);

  int grid_n() const { return grid_n_; }
  double spacing() const { return h_; }
  double boundary_radius() const { return rb_; }
  int nr() const { return nr_; }  // columns: i = 0..nr
  int nz() const { return nz_; }  // rows: j = 0..nz
  double r(int i) const { return i * h_; }
  double z(int j) const { return -1.0 + j * h_; }

  NodeTag tag(int i, int j) const { return tags_[idx(i, j)]; }
  // Dense active-node id, or -1.
  int node_id(int i, int j) const { return node_id_[idx(i, j)]; }
  int active_count() const { return static_cast<int>(active_nodes_.size()); }
  std::pair<int, int> node_ij(int id) const { return active_nodes_[id]; }
  double node_r(int id) const { return r(active_nodes_[id].first); }
  double node_z(int id) const { return z(active_nodes_[id].second); }
  bool cell_included(int i, int j) const { return cells_[cell_idx(i, j)]; }

  const std::vector<Triangle>& triangles() const { return tris_; }
  const std::vector<int>& dirichlet_nodes() const { return dirichlet_nodes_; }
  const std::vector<int>& free_nodes() const { return free_nodes_; }

  // Row-symmetric partner of a node id (z -> -z), -1 if inactive.
  int mirror_node(int id) const;

 private:
  int idx(int i, int j) const { return j * (nr_ + 1) + i; }
  int cell_idx(int i, int j) const { return j * nr_ + i; }

  int grid_n_, nr_, nz_;
  double h_, rb_;
  std::vector<NodeTag> tags_;
  std::vector<int> node_id_;
  std::vector<char> cells_;
  std::vector<std::pair<int, int>> active_nodes_;
  std::vector<int> dirichlet_nodes_, free_nodes_;
  std::vector<Triangle> tris_;
};

}  // namespace thetalam::geom
