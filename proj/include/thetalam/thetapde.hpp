// Discrete energy minimization for spanning theta-graphs: the surface
// (r cos T(r,z), r sin T(r,z), z) over the meridian half-disk has area
//   E(T) = integral of phi^2 sqrt(1 + r^2 |grad T|^2) dr dz,
// with Dirichlet data on the boundary circle and a natural (free) condition
// on the axis, where the r^2 weight vanishes. The discrete energy is P1 on
// the grid triangulation, convex in the nodal values, minimized by damped
// Newton with line search.
#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "thetalam/geom.hpp"

namespace thetalam::pde {

using geom::HalfDiskGrid;
using geom::MetricProfile;

struct BoundaryCurve {
  // Angle of the curve over the horizontal circle at height z in [-1,1].
  std::function<double(double)> theta_bd;
  bool class_G = false;
  std::string name;  // used for provenance hashing in file headers

  static BoundaryCurve constant(double c);
  static BoundaryCurve helicoid(double alpha);  // theta = z / alpha
};

struct SolveStats {
  int newton_iterations = 0;
  int gradient_fallback_steps = 0;
  double final_gradient_norm = 0.0;  // max |dE/dtheta| over free nodes
  double energy = 0.0;
};

struct ThetaGraph {
  std::shared_ptr<const HalfDiskGrid> grid;
  MetricProfile metric;
  std::vector<double> theta;  // per active node id
  double energy = 0.0;
  SolveStats stats;

  double value(int i, int j) const {
    const int id = grid->node_id(i, j);
    if (id < 0) throw std::out_of_range("ThetaGraph: inactive node");
    return theta[id];
  }
};

struct SolveOptions {
  enum class Init { Zero, Boundary, Warm };
  Init init = Init::Boundary;
  double tol_gradient = 1e-10;  // max-norm of dE/dtheta at free nodes
  int max_iterations = 200;
  // Largest admissible Dirichlet jump between adjacent boundary nodes.
  double max_boundary_jump = 16.0;
};

struct NonConvergence : std::runtime_error {
  NonConvergence(double residual, int iters)
      : std::runtime_error("solver did not reach the gradient tolerance"),
        last_residual(residual),
        iterations(iters) {}
  double last_residual;
  int iterations;
};

struct IllConditionedBoundary : std::runtime_error {
  explicit IllConditionedBoundary(double jump)
      : std::runtime_error("boundary data varies too fast for the grid"),
        worst_jump(jump) {}
  double worst_jump;
};

// Discrete surface area of the graph (the quantity the solver minimizes).
double area_energy(const ThetaGraph& g);

// Analytic first variation of area_energy: dE/dtheta at every active node
// (zero at Dirichlet nodes). Same layout as ThetaGraph::theta.
std::vector<double> energy_gradient(const ThetaGraph& g);

// Divergence-form residual (dE/dtheta)/h^2 at free nodes, zero elsewhere.
// Vanishing residual characterizes discrete criticality.
std::vector<double> euler_lagrange_residual(const ThetaGraph& g);

ThetaGraph solve_dirichlet(const BoundaryCurve& bc, const MetricProfile& metric,
                           std::shared_ptr<const HalfDiskGrid> grid,
                           const SolveOptions& options = {},
                           const ThetaGraph* warm_start = nullptr);

// ---------------------------------------------------------------------------
// Diagnostics

// Axis-aligned box in the cover (r, z, theta).
struct CoverBox {
  double r0, r1, z0, z1, theta0, theta1;
};

struct HalfAreaCheck {
  double graph_area = 0.0;
  double boundary_area = 0.0;
  double ratio = 0.0;
  bool pass = false;
  bool approximate = false;  // Poincare: conformal factor varies inside box
};

// Prop-B.1-style bound: area of the lifted graph inside the box against half
// the box boundary area, both in the cover metric. Passes at
// ratio <= 0.5 + 10 h.
HalfAreaCheck half_area_bound_check(const ThetaGraph& g, const CoverBox& box);

struct Rect {
  double r0, r1, z0, z1;
};

// Norm of the second fundamental form |A| (metric-aware) per active node;
// zero where the 3x3 stencil is incomplete.
std::vector<double> curvature_field(const ThetaGraph& g);

struct CurvatureDiagnostic {
  double sup_product = 0.0;   // sup of B * dist(p, complement of subdomain)
  double max_curvature = 0.0;
};

CurvatureDiagnostic curvature_diagnostic(const ThetaGraph& g, const Rect& subdomain);

}  // namespace thetalam::pde
