#include "thetalam/thetapde.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

namespace thetalam::pde {

using geom::kTriGrad;
using geom::NodeTag;
using geom::Triangle;

BoundaryCurve BoundaryCurve::constant(double c) {
  BoundaryCurve bc;
  bc.theta_bd = [c](double) { return c; };
  bc.class_G = false;
  bc.name = "constant:" + format_double(c);
  return bc;
}

BoundaryCurve BoundaryCurve::helicoid(double alpha) {
  if (alpha == 0.0) throw std::invalid_argument("helicoid boundary: alpha must be nonzero");
  BoundaryCurve bc;
  bc.theta_bd = [alpha](double z) { return z / alpha; };
  bc.class_G = false;
  bc.name = "helicoid:" + format_double(alpha);
  return bc;
}

namespace {

struct TriGeometry {
  double gr[3], gz[3];  // hat gradients
  double cr, cz;        // centroid
};

inline TriGeometry tri_geometry(const HalfDiskGrid& grid, const Triangle& t) {
  TriGeometry out;
  const double inv_h = 1.0 / grid.spacing();
  for (int v = 0; v < 3; ++v) {
    out.gr[v] = kTriGrad[t.shape][v][0] * inv_h;
    out.gz[v] = kTriGrad[t.shape][v][1] * inv_h;
  }
  const int ids[3] = {t.n0, t.n1, t.n2};
  double cr = 0.0, cz = 0.0;
  for (int v = 0; v < 3; ++v) {
    cr += grid.node_r(ids[v]);
    cz += grid.node_z(ids[v]);
  }
  out.cr = cr / 3.0;
  out.cz = cz / 3.0;
  return out;
}

// Accumulates energy and optionally gradient / Hessian triplets in one pass.
struct Assembly {
  double energy = 0.0;
  std::vector<double> gradient;  // per active node
};

Assembly assemble(const HalfDiskGrid& grid, const MetricProfile& metric,
                  const std::vector<double>& theta, bool want_gradient,
                  std::vector<Eigen::Triplet<double>>* hess,
                  const std::vector<int>* free_index) {
  Assembly out;
  if (want_gradient) out.gradient.assign(theta.size(), 0.0);
  const double area = 0.5 * grid.spacing() * grid.spacing();
  for (const Triangle& t : grid.triangles()) {
    const TriGeometry geo = tri_geometry(grid, t);
    const int ids[3] = {t.n0, t.n1, t.n2};
    double pr = 0.0, pz = 0.0;
    for (int v = 0; v < 3; ++v) {
      pr += theta[ids[v]] * geo.gr[v];
      pz += theta[ids[v]] * geo.gz[v];
    }
    const double phi = metric.conformal_factor(geo.cr, geo.cz);
    const double w = phi * phi * area;
    const double r2 = geo.cr * geo.cr;
    const double s = std::sqrt(1.0 + r2 * (pr * pr + pz * pz));
    out.energy += w * s;
    if (!want_gradient) continue;
    const double ws = w * r2 / s;
    double pdotg[3];
    for (int v = 0; v < 3; ++v) {
      pdotg[v] = pr * geo.gr[v] + pz * geo.gz[v];
      out.gradient[ids[v]] += ws * pdotg[v];
    }
    if (hess) {
      const double w3 = w * r2 * r2 / (s * s * s);
      for (int u = 0; u < 3; ++u) {
        const int fu = (*free_index)[ids[u]];
        if (fu < 0) continue;
        for (int v = 0; v < 3; ++v) {
          const int fv = (*free_index)[ids[v]];
          if (fv < 0) continue;
          const double huv =
              ws * (geo.gr[u] * geo.gr[v] + geo.gz[u] * geo.gz[v]) -
              w3 * pdotg[u] * pdotg[v];
          hess->emplace_back(fu, fv, huv);
        }
      }
    }
  }
  return out;
}

std::vector<double> dirichlet_values(const HalfDiskGrid& grid, const BoundaryCurve& bc) {
  std::vector<double> values(grid.active_count(), 0.0);
  const double rb = grid.boundary_radius();
  for (int id : grid.dirichlet_nodes())
    values[id] = bc.theta_bd(grid.node_z(id) / rb);
  return values;
}

void check_boundary_conditioning(const HalfDiskGrid& grid,
                                 const std::vector<double>& values,
                                 double max_jump) {
  double worst = 0.0;
  for (int id : grid.dirichlet_nodes()) {
    const auto [i, j] = grid.node_ij(id);
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || ii > grid.nr() || jj < 0 || jj > grid.nz()) continue;
        if (grid.tag(ii, jj) != NodeTag::OuterSphere) continue;
        const int nid = grid.node_id(ii, jj);
        worst = std::max(worst, std::abs(values[id] - values[nid]));
      }
    }
  }
  if (worst > max_jump) throw IllConditionedBoundary(worst);
}

}  // namespace

double area_energy(const ThetaGraph& g) {
  return assemble(*g.grid, g.metric, g.theta, false, nullptr, nullptr).energy;
}

std::vector<double> energy_gradient(const ThetaGraph& g) {
  auto asm_out = assemble(*g.grid, g.metric, g.theta, true, nullptr, nullptr);
  for (int id : g.grid->dirichlet_nodes()) asm_out.gradient[id] = 0.0;
  return asm_out.gradient;
}

std::vector<double> euler_lagrange_residual(const ThetaGraph& g) {
  auto grad = energy_gradient(g);
  const double inv_h2 = 1.0 / (g.grid->spacing() * g.grid->spacing());
  for (auto& v : grad) v *= inv_h2;
  return grad;
}

ThetaGraph solve_dirichlet(const BoundaryCurve& bc, const MetricProfile& metric,
                           std::shared_ptr<const HalfDiskGrid> grid,
                           const SolveOptions& options, const ThetaGraph* warm_start) {
  const HalfDiskGrid& G = *grid;
  const int n_active = G.active_count();
  const auto& free_nodes = G.free_nodes();
  const int n_free = static_cast<int>(free_nodes.size());

  const std::vector<double> bvals = dirichlet_values(G, bc);
  check_boundary_conditioning(G, bvals, options.max_boundary_jump);

  ThetaGraph g;
  g.grid = grid;
  g.metric = metric;
  g.theta.assign(n_active, 0.0);

  switch (options.init) {
    case SolveOptions::Init::Zero:
      break;
    case SolveOptions::Init::Boundary: {
      const double rb = G.boundary_radius();
      for (int id = 0; id < n_active; ++id)
        g.theta[id] = bc.theta_bd(G.node_z(id) / rb);
      break;
    }
    case SolveOptions::Init::Warm: {
      if (!warm_start || !warm_start->grid ||
          warm_start->grid->grid_n() != G.grid_n() ||
          warm_start->grid->boundary_radius() != G.boundary_radius())
        throw std::invalid_argument("solve_dirichlet: warm start grid mismatch");
      g.theta = warm_start->theta;
      break;
    }
  }
  for (int id : G.dirichlet_nodes()) g.theta[id] = bvals[id];

  // Dense-id -> free-slot map for the Hessian.
  std::vector<int> free_index(n_active, -1);
  for (int k = 0; k < n_free; ++k) free_index[free_nodes[k]] = k;

  Eigen::SparseMatrix<double> H(n_free, n_free);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  bool pattern_ready = false;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * G.triangles().size());

  double energy = assemble(G, metric, g.theta, false, nullptr, nullptr).energy;
  int gradient_steps = 0;
  double grad_norm = 0.0;

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    triplets.clear();
    auto asm_out = assemble(G, metric, g.theta, true, &triplets, &free_index);
    energy = asm_out.energy;

    grad_norm = 0.0;
    for (int id : free_nodes) grad_norm = std::max(grad_norm, std::abs(asm_out.gradient[id]));
    if (grad_norm <= options.tol_gradient) {
      g.energy = energy;
      g.stats = {iter, gradient_steps, grad_norm, energy};
      return g;
    }
    if (iter == options.max_iterations) break;

    Eigen::VectorXd rhs(n_free);
    for (int k = 0; k < n_free; ++k) rhs[k] = -asm_out.gradient[free_nodes[k]];

    H.setFromTriplets(triplets.begin(), triplets.end());
    if (!pattern_ready) {
      llt.analyzePattern(H);
      pattern_ready = true;
    }
    llt.factorize(H);

    bool have_direction = false;
    Eigen::VectorXd dir;
    if (llt.info() == Eigen::Success) {
      dir = llt.solve(rhs);
      have_direction = (llt.info() == Eigen::Success);
    }
    double slope = 0.0;
    if (have_direction) {
      slope = -rhs.dot(dir);  // gradient^T direction
      if (!(slope < 0.0)) have_direction = false;
    }
    if (!have_direction) {
      // The energy is convex so this path is exceptional; fall back to a
      // plain gradient step with the same line search.
      ++gradient_steps;
      if (gradient_steps > 500) break;
      dir = rhs;
      slope = -rhs.squaredNorm();
    }

    // Armijo backtracking on the energy.
    std::vector<double> trial = g.theta;
    double step = 1.0;
    bool accepted = false;
    for (int back = 0; back < 40; ++back) {
      for (int k = 0; k < n_free; ++k)
        trial[free_nodes[k]] = g.theta[free_nodes[k]] + step * dir[k];
      const double e_trial = assemble(G, metric, trial, false, nullptr, nullptr).energy;
      if (e_trial <= energy + 1e-4 * step * slope) {
        g.theta.swap(trial);
        energy = e_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step size underflow: report non-convergence
  }

  const double inv_h2 = 1.0 / (G.spacing() * G.spacing());
  throw NonConvergence(grad_norm * inv_h2, options.max_iterations);
}

HalfAreaCheck half_area_bound_check(const ThetaGraph& g, const CoverBox& box) {
  const HalfDiskGrid& G = *g.grid;
  const double h = G.spacing();
  const double rb = G.boundary_radius();
  if (!(box.r0 > 0.0 && box.r1 > box.r0 && box.z1 > box.z0 && box.theta1 > box.theta0))
    throw std::domain_error("half_area_bound_check: malformed box");
  const double margin = rb - 2.0 * h;
  for (double r : {box.r0, box.r1})
    for (double z : {box.z0, box.z1})
      if (r * r + z * z >= margin * margin)
        throw std::domain_error("half_area_bound_check: box exits the domain");

  // Poincare factor must be nearly constant across the box for the product
  // box to act as a fair comparison region.
  bool approximate = false;
  if (!g.metric.is_euclidean()) {
    double lo = 1e300, hi = 0.0;
    for (int kr = 0; kr <= 8; ++kr)
      for (int kz = 0; kz <= 8; ++kz) {
        const double r = box.r0 + (box.r1 - box.r0) * kr / 8.0;
        const double z = box.z0 + (box.z1 - box.z0) * kz / 8.0;
        const double f = g.metric.conformal_factor(r, z);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
      }
    if (hi > 1.1 * lo)
      throw std::domain_error(
          "half_area_bound_check: conformal factor varies more than 10% over the box");
    approximate = true;
  }

  // Graph area inside the box: triangles whose centroid lies in the box and
  // whose interpolated theta falls in the window.
  double graph_area = 0.0;
  const double tri_area = 0.5 * h * h;
  for (const Triangle& t : G.triangles()) {
    const TriGeometry geo = tri_geometry(G, t);
    if (geo.cr < box.r0 || geo.cr > box.r1 || geo.cz < box.z0 || geo.cz > box.z1)
      continue;
    const double th_c = (g.theta[t.n0] + g.theta[t.n1] + g.theta[t.n2]) / 3.0;
    if (th_c < box.theta0 || th_c > box.theta1) continue;
    double pr = 0.0, pz = 0.0;
    const int ids[3] = {t.n0, t.n1, t.n2};
    for (int v = 0; v < 3; ++v) {
      pr += g.theta[ids[v]] * geo.gr[v];
      pz += g.theta[ids[v]] * geo.gz[v];
    }
    const double phi = g.metric.conformal_factor(geo.cr, geo.cz);
    graph_area += tri_area * phi * phi *
                  std::sqrt(1.0 + geo.cr * geo.cr * (pr * pr + pz * pz));
  }

  // Boundary area of the box in the cover metric, by composite midpoint rule.
  const int nq = 512;
  auto int_z = [&](double r) {  // integral of phi^2 dz over [z0, z1]
    double s = 0.0;
    const double dz = (box.z1 - box.z0) / nq;
    for (int k = 0; k < nq; ++k) {
      const double z = box.z0 + (k + 0.5) * dz;
      const double f = g.metric.conformal_factor(r, z);
      s += f * f * dz;
    }
    return s;
  };
  auto int_r = [&](double z, bool weight_r) {
    double s = 0.0;
    const double dr = (box.r1 - box.r0) / nq;
    for (int k = 0; k < nq; ++k) {
      const double r = box.r0 + (k + 0.5) * dr;
      const double f = g.metric.conformal_factor(r, z);
      s += f * f * (weight_r ? r : 1.0) * dr;
    }
    return s;
  };
  const double dtheta = box.theta1 - box.theta0;
  // theta faces (two copies of the (r,z) rectangle, area element phi^2 dr dz):
  double theta_face = 0.0;
  {
    const double dr = (box.r1 - box.r0) / nq;
    for (int k = 0; k < nq; ++k) {
      const double r = box.r0 + (k + 0.5) * dr;
      theta_face += int_z(r) * dr;
    }
  }
  // r faces (area element phi^2 r dtheta dz) and z faces (phi^2 r dr dtheta):
  const double r_faces = dtheta * (box.r0 * int_z(box.r0) + box.r1 * int_z(box.r1));
  const double z_faces = dtheta * (int_r(box.z0, true) + int_r(box.z1, true));

  HalfAreaCheck out;
  out.graph_area = graph_area;
  out.boundary_area = 2.0 * theta_face + r_faces + z_faces;
  out.ratio = out.graph_area / out.boundary_area;
  out.pass = out.ratio <= 0.5 + 10.0 * h;
  out.approximate = approximate;
  return out;
}

std::vector<double> curvature_field(const ThetaGraph& g) {
  const HalfDiskGrid& G = *g.grid;
  const double h = G.spacing();
  std::vector<double> B(G.active_count(), 0.0);

  parallel_for(G.active_count(), [&](std::size_t idx) {
    const int id = static_cast<int>(idx);
    const auto [i, j] = G.node_ij(id);
    if (i == 0) return;  // second fundamental form needs r > 0
    // Full 3x3 stencil of active nodes required.
    int nbr[3][3];
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || ii > G.nr() || jj < 0 || jj > G.nz()) return;
        nbr[dj + 1][di + 1] = G.node_id(ii, jj);
        if (nbr[dj + 1][di + 1] < 0) return;
      }
    auto T = [&](int dj, int di) { return g.theta[nbr[dj + 1][di + 1]]; };
    const double tr = (T(0, 1) - T(0, -1)) / (2 * h);
    const double tz = (T(1, 0) - T(-1, 0)) / (2 * h);
    const double trr = (T(0, 1) - 2 * T(0, 0) + T(0, -1)) / (h * h);
    const double tzz = (T(1, 0) - 2 * T(0, 0) + T(-1, 0)) / (h * h);
    const double trz = (T(1, 1) - T(1, -1) - T(-1, 1) + T(-1, -1)) / (4 * h * h);

    const double r = G.node_r(id), z = G.node_z(id);
    // First and second fundamental forms of the Euclidean embedding,
    // evaluated in the meridian frame (the rotation angle drops out).
    const double E = 1 + r * r * tr * tr;
    const double F = r * r * tr * tz;
    const double Gm = 1 + r * r * tz * tz;
    const double nrm = std::sqrt(1.0 + r * r * (tr * tr + tz * tz));
    const double e = (-r * r * tr * tr * tr - 2 * tr - r * trr) / nrm;
    const double f = (-r * r * tr * tr * tz - tz - r * trz) / nrm;
    const double g2 = (-r * r * tr * tz * tz - r * tzz) / nrm;

    // Shape operator S = I^{-1} II; |A|^2 = tr(S^2).
    const double det = E * Gm - F * F;
    const double s11 = (Gm * e - F * f) / det;
    const double s12 = (Gm * f - F * g2) / det;
    const double s21 = (E * f - F * e) / det;
    const double s22 = (E * g2 - F * f) / det;
    double a2 = s11 * s11 + 2 * s12 * s21 + s22 * s22;

    if (!g.metric.is_euclidean()) {
      // Conformal change g = phi^2 delta: S_g = (S_e + (d_n log phi) Id)/phi.
      const auto du = g.metric.grad_log_factor(r, z);
      const double dn = (r * tr * du.x + r * tz * du.y) / nrm;
      const double phi = g.metric.conformal_factor(r, z);
      const double t11 = s11 + dn, t22 = s22 + dn;
      a2 = (t11 * t11 + 2 * s12 * s21 + t22 * t22) / (phi * phi);
    }
    B[id] = std::sqrt(std::max(0.0, a2));
  });
  return B;
}

CurvatureDiagnostic curvature_diagnostic(const ThetaGraph& g, const Rect& subdomain) {
  const HalfDiskGrid& G = *g.grid;
  const auto B = curvature_field(g);
  CurvatureDiagnostic out;
  for (int id = 0; id < G.active_count(); ++id) {
    if (B[id] == 0.0) continue;
    const double r = G.node_r(id), z = G.node_z(id);
    if (r < subdomain.r0 || r > subdomain.r1 || z < subdomain.z0 || z > subdomain.z1)
      continue;
    const double de = std::min(std::min(r - subdomain.r0, subdomain.r1 - r),
                               std::min(z - subdomain.z0, subdomain.z1 - z));
    const double dist = g.metric.conformal_factor(r, z) * de;
    out.sup_product = std::max(out.sup_product, B[id] * dist);
    out.max_curvature = std::max(out.max_curvature, B[id]);
  }
  return out;
}

}  // namespace thetalam::pde
