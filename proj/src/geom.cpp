#include "thetalam/geom.hpp"

#include <cmath>
#include <stdexcept>

namespace thetalam::geom {

double MetricProfile::conformal_factor(double r, double z) const {
  if (kind == MetricKind::Euclidean) return 1.0;
  const double q = 1.0 - r * r - z * z;
  if (q <= 0.0)
    throw std::domain_error("MetricProfile: point outside the open unit ball");
  return 2.0 / q;
}

Vec2 MetricProfile::grad_log_factor(double r, double z) const {
  if (kind == MetricKind::Euclidean) return {0.0, 0.0};
  const double q = 1.0 - r * r - z * z;
  if (q <= 0.0)
    throw std::domain_error("MetricProfile: point outside the open unit ball");
  return {2.0 * r / q, 2.0 * z / q};
}

double cone_distance(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5 * kPi + 1e-15))
    throw std::domain_error("cone_distance: alpha must lie in (0, pi/2]");
  return std::abs(std::log(std::tan(0.5 * alpha)));
}

double cone_angle(double s) {
  if (!(s >= 0.0)) throw std::domain_error("cone_angle: s must be >= 0");
  return 2.0 * std::atan(std::exp(-s));
}

StripPoint strip_coords(double x, double y, double z) {
  if (!(z > 0.0)) throw std::domain_error("strip_coords: requires z > 0");
  const double rho = std::hypot(x, y);
  const double R = std::hypot(rho, z);
  return {std::atan2(z, rho), std::log(R)};
}

double lambda_weight(double theta) {
  if (!(theta > 0.0 && theta <= 0.5 * kPi + 1e-15))
    throw std::domain_error("lambda_weight: theta must lie in (0, pi/2]");
  const double s = std::sin(theta);
  return 2.0 * kPi * std::cos(theta) / (s * s);
}

double lambda_weight_deriv(double theta) {
  if (!(theta > 0.0 && theta < 0.5 * kPi + 1e-15))
    throw std::domain_error("lambda_weight_deriv: theta out of range");
  const double s = std::sin(theta), c = std::cos(theta);
  return -2.0 * kPi * (1.0 + c * c) / (s * s * s);
}

double strip_curvature(double theta) {
  if (!(theta > 0.0 && theta < 0.5 * kPi))
    throw std::domain_error("strip_curvature: theta must lie in (0, pi/2)");
  const double t2 = std::tan(theta) * std::tan(theta);
  return t2 * (t2 - 2.0) / (4.0 * kPi * kPi);
}

PlanePoint uhs_from_ball(const PlanePoint& p) {
  // Inversion centered at the north pole (radius sqrt 2), then z -> -z.
  const double qr = p.r, qz = p.z - 1.0;
  const double n2 = qr * qr + qz * qz;
  if (n2 <= 0.0) throw std::domain_error("uhs_from_ball: north pole has no image");
  return {2.0 * qr / n2, -(1.0 + 2.0 * qz / n2)};
}

PlanePoint ball_from_uhs(const PlanePoint& q) {
  if (!(q.z > 0.0)) throw std::domain_error("ball_from_uhs: requires z > 0");
  const double qr = q.r, qz = -q.z - 1.0;
  const double n2 = qr * qr + qz * qz;
  return {2.0 * qr / n2, 1.0 + 2.0 * qz / n2};
}

StripPoint strip_from_ball(const PlanePoint& p) {
  const PlanePoint u = uhs_from_ball(p);
  return strip_coords(u.r, 0.0, u.z);
}

PlanePoint ball_from_strip(const StripPoint& s) {
  const double R = std::exp(s.t);
  return ball_from_uhs({R * std::cos(s.theta), R * std::sin(s.theta)});
}

double ideal_t_of_height(double a) {
  if (!(a > -1.0 && a < 1.0)) throw std::domain_error("ideal_t_of_height: |a| < 1 required");
  return std::atanh(a);
}

double strip_distance_to_hemisphere(const StripPoint& p, double t0) {
  return std::asinh(std::abs(std::sinh(p.t - t0)) / std::sin(p.theta));
}

HalfDiskGrid::HalfDiskGrid(int grid_n, double boundary_radius)
    : grid_n_(grid_n), rb_(boundary_radius) {
  if (grid_n < 8 || grid_n % 2 != 0)
    throw std::invalid_argument("HalfDiskGrid: grid_n must be even and >= 8");
  if (!(boundary_radius > 0.2 && boundary_radius <= 1.0))
    throw std::invalid_argument("HalfDiskGrid: boundary_radius out of range");
  h_ = 2.0 / grid_n;
  nr_ = grid_n / 2;
  nz_ = grid_n;

  const int nn = (nr_ + 1) * (nz_ + 1);
  tags_.assign(nn, NodeTag::Inactive);
  node_id_.assign(nn, -1);
  cells_.assign(nr_ * nz_, 0);

  auto inside = [&](int i, int j) {
    const double rr = r(i), zz = z(j);
    return rr * rr + zz * zz <= rb_ * rb_ + 1e-12;
  };

  for (int j = 0; j < nz_; ++j)
    for (int i = 0; i < nr_; ++i)
      cells_[cell_idx(i, j)] =
          inside(i, j) && inside(i + 1, j) && inside(i, j + 1) && inside(i + 1, j + 1);

  auto has_cell = [&](int i, int j) {
    return i >= 0 && i < nr_ && j >= 0 && j < nz_ && cells_[cell_idx(i, j)];
  };
  auto lattice_cell = [&](int i, int j) { return i >= 0 && i < nr_ && j >= 0 && j < nz_; };

  for (int j = 0; j <= nz_; ++j) {
    for (int i = 0; i <= nr_; ++i) {
      bool touches = false, missing = false;
      for (int dj = -1; dj <= 0; ++dj) {
        for (int di = -1; di <= 0; ++di) {
          if (!lattice_cell(i + di, j + dj)) continue;
          if (has_cell(i + di, j + dj))
            touches = true;
          else
            missing = true;
        }
      }
      if (!touches) continue;
      NodeTag t;
      if (missing)
        t = NodeTag::OuterSphere;
      else if (i == 0)
        t = NodeTag::Axis;
      else
        t = NodeTag::Interior;
      tags_[idx(i, j)] = t;
      node_id_[idx(i, j)] = static_cast<int>(active_nodes_.size());
      active_nodes_.emplace_back(i, j);
      if (t == NodeTag::OuterSphere)
        dirichlet_nodes_.push_back(node_id_[idx(i, j)]);
      else
        free_nodes_.push_back(node_id_[idx(i, j)]);
    }
  }

  tris_.reserve(2 * static_cast<std::size_t>(nr_) * nz_);
  for (int j = 0; j < nz_; ++j) {
    const double zc = z(j) + 0.5 * h_;
    for (int i = 0; i < nr_; ++i) {
      if (!cells_[cell_idx(i, j)]) continue;
      const int a = node_id_[idx(i, j)], b = node_id_[idx(i + 1, j)];
      const int c = node_id_[idx(i + 1, j + 1)], d = node_id_[idx(i, j + 1)];
      if (zc < 0.0) {
        // Diagonal a-c.
        tris_.push_back({a, b, c, 0});
        tris_.push_back({a, c, d, 1});
      } else {
        // Diagonal b-d, the mirror image of the lower half.
        tris_.push_back({a, b, d, 2});
        tris_.push_back({b, c, d, 3});
      }
    }
  }
}

// Hat gradients (times h) for the four triangle shapes, vertices ccw.
// Shape 0: (0,0),(1,0),(1,1); shape 1: (0,0),(1,1),(0,1);
// shape 2: (0,0),(1,0),(0,1); shape 3: (1,0),(1,1),(0,1).
const double kTriGrad[4][3][2] = {
    {{-1, 0}, {1, -1}, {0, 1}},
    {{0, -1}, {1, 0}, {-1, 1}},
    {{-1, -1}, {1, 0}, {0, 1}},
    {{0, -1}, {1, 1}, {-1, 0}},
};

int HalfDiskGrid::mirror_node(int id) const {
  const auto [i, j] = active_nodes_[id];
  return node_id_[idx(i, nz_ - j)];
}

}  // namespace thetalam::geom
