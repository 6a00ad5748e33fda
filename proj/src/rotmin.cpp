#include "thetalam/rotmin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace thetalam::rotmin {

using geom::ball_from_strip;
using geom::cone_angle;
using geom::ideal_t_of_height;
using geom::lambda_weight;
using geom::lambda_weight_deriv;
using geom::strip_distance_to_hemisphere;

namespace {

constexpr double kThetaMinSample = 1e-7;  // ideal-side start of geodesic samples
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(cosh x) without overflow.
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// lambda(theta)^2 - lambda(theta_w)^2 in the exact factored form
//   4 pi^2 [cos(t) sin(w+t) sin(w-t) + 2 sin^2(t) sin((w+t)/2) sin((w-t)/2)]
//     * [cos(t) sin^2(w) + cos(w) sin^2(t)] / (sin^4(t) sin^4(w)),
// which is free of cancellation at the waist theta = theta_w.
double speed_sq(double theta, double theta_w) {
  if (theta >= theta_w) return 0.0;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sw = std::sin(theta_w), cw = std::cos(theta_w);
  const double sum = theta_w + theta, diff = theta_w - theta;
  const double f = ct * std::sin(sum) * std::sin(diff) +
                   2.0 * st * st * std::sin(0.5 * sum) * std::sin(0.5 * diff);
  const double g = ct * sw * sw + cw * st * st;
  const double st2 = st * st, sw2 = sw * sw;
  return 4.0 * kPi * kPi * f * g / (st2 * st2 * sw2 * sw2);
}

// dt/dtheta of the increasing branch, analytic; +inf at the waist.
double branch_slope(double theta, double c, double theta_w) {
  if (c == 0.0) return 0.0;
  const double q = speed_sq(theta, theta_w);
  if (q <= 0.0) return kInf;
  return c / std::sqrt(q);
}

// |dt/du| over the waist-regular variable u (theta = theta_w - u^2):
// 2 u c / sqrt(lambda^2 - c^2), regular at u = 0. The waist offset u^2 is
// threaded through exactly; recomputing theta_w - theta would re-round it
// and put noise under the square root.
double dt_du(double u, double c, double theta_w) {
  if (c == 0.0) return 0.0;
  const double u2 = u * u;
  if (u2 >= theta_w) return 0.0;
  if (u2 < 1e-120)
    return std::sqrt(2.0 * c / std::abs(lambda_weight_deriv(theta_w)));
  const double theta = theta_w - u2;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sw = std::sin(theta_w), cw = std::cos(theta_w);
  const double sum = theta_w + theta;
  const double f = ct * std::sin(sum) * std::sin(u2) +
                   2.0 * st * st * std::sin(0.5 * sum) * std::sin(0.5 * u2);
  const double g = ct * sw * sw + cw * st * st;
  const double st2 = st * st, sw2 = sw * sw;
  const double q = 4.0 * kPi * kPi * f * g / (st2 * st2 * sw2 * sw2);
  if (!(q > 0.0) || q == kInf) return 0.0;
  return 2.0 * u * c / std::sqrt(q);
}

double catenoid_boundary_radius(double a) { return std::sqrt(1.0 - a * a); }

}  // namespace

double GeodesicSolution::t_at(double theta) const {
  if (c_const == 0.0 || samples.empty()) return t_ideal;
  if (theta <= samples.front().theta)
    return t_ideal + c_const / (6.0 * kPi) * theta * theta * theta;
  const auto& last = samples.back();
  if (theta >= last.theta) return last.t;
  const auto it = std::upper_bound(
      samples.begin(), samples.end(), theta,
      [](double th, const Sample& s) { return th < s.theta; });
  const std::size_t i = static_cast<std::size_t>(it - samples.begin()) - 1;
  const Sample& s0 = samples[i];
  const Sample& s1 = samples[i + 1];
  if (!std::isfinite(s1.dt_dtheta)) {
    // Square-root profile across the waist interval.
    const double lp = std::abs(lambda_weight_deriv(theta_waist));
    return s1.t - std::sqrt(2.0 * c_const * (s1.theta - theta) / lp);
  }
  const double hseg = s1.theta - s0.theta;
  const double tt = (theta - s0.theta) / hseg;
  const double t2 = tt * tt, t3 = t2 * tt;
  return (2 * t3 - 3 * t2 + 1) * s0.t + (t3 - 2 * t2 + tt) * hseg * s0.dt_dtheta +
         (-2 * t3 + 3 * t2) * s1.t + (t3 - t2) * hseg * s1.dt_dtheta;
}

double GeodesicSolution::dt_at(double theta) const {
  return branch_slope(theta, c_const, theta_waist);
}

double waist_angle(double c_const) {
  if (c_const < 0.0) throw std::domain_error("waist_angle: c must be >= 0");
  if (c_const == 0.0) return 0.5 * kPi;
  auto f = [&](double th) { return lambda_weight(th) - c_const; };
  const double lo = 1e-8;
  if (f(lo) < 0.0) throw std::domain_error("waist_angle: c too large");
  return newton_in_bracket(f, [&](double th) { return lambda_weight_deriv(th); }, lo,
                           0.5 * kPi, 1e-15);
}

GeodesicSolution hyp_geodesic(double c_const, double t_ideal, double theta_max) {
  if (c_const < 0.0) return hyp_geodesic(-c_const, t_ideal, theta_max);

  GeodesicSolution sol;
  sol.c_const = c_const;
  sol.t_ideal = t_ideal;
  sol.theta_waist = waist_angle(c_const);
  if (theta_max > sol.theta_waist + 1e-12)
    throw std::domain_error("hyp_geodesic: theta_max lies beyond the waist");
  theta_max = std::min(theta_max, sol.theta_waist);
  if (!(theta_max > 0.0))
    throw std::domain_error("hyp_geodesic: theta_max must be positive");

  if (c_const == 0.0) {
    // Totally geodesic: t is constant. Graded samples, denser near theta = 0.
    const int n = 160;
    for (int k = 0; k <= n; ++k) {
      const double f = static_cast<double>(k) / n;
      const double theta = kThetaMinSample + (theta_max - kThetaMinSample) * f * f;
      sol.samples.push_back({theta, t_ideal, 0.0});
    }
    return sol;
  }

  const double w = sol.theta_waist;
  const double theta0 = std::min(kThetaMinSample, 0.5 * theta_max);
  const double t0 = t_ideal + c_const / (6.0 * kPi) * theta0 * theta0 * theta0;
  const double u_max = std::sqrt(w - theta0);
  const double u_end = std::sqrt(std::max(0.0, w - theta_max));
  const double x_end = u_max - u_end;

  // Integrate t over x = u_max - u with theta = w - (u_max - x)^2; the
  // right-hand side stays smooth up to and including the waist.
  OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  opt.max_step = 0.01;
  opt.initial_step = 1e-6;
  auto rhs = [&](double x, const double*, double* dy) {
    dy[0] = dt_du(u_max - x, c_const, w);
  };
  const auto path = integrate_ode(rhs, 1, 0.0, {t0}, x_end, opt);

  sol.samples.reserve(path.size());
  for (const auto& st : path) {
    const double u = u_max - st.x;
    const double theta = (st.x >= x_end) ? theta_max : w - u * u;
    sol.samples.push_back({theta, st.y[0], branch_slope(theta, c_const, w)});
  }
  sol.samples.erase(std::unique(sol.samples.begin(), sol.samples.end(),
                                [](const auto& a, const auto& b) {
                                  return std::abs(a.theta - b.theta) < 1e-15;
                                }),
                    sol.samples.end());
  return sol;
}

double t_ideal_of_waist(double theta_waist) {
  if (!(theta_waist > 0.0 && theta_waist < 0.5 * kPi))
    throw std::domain_error("t_ideal_of_waist: waist angle out of range");
  const double c = lambda_weight(theta_waist);
  return adaptive_simpson([&](double u) { return dt_du(u, c, theta_waist); }, 0.0,
                          std::sqrt(theta_waist), 1e-13);
}

double max_ideal_t(double* argmax) {
  static const auto cached = [] {
    double best_w = 0.0, best_T = 0.0;
    for (int k = 1; k < 600; ++k) {
      const double w = 0.5 * kPi * k / 600.0;
      const double T = t_ideal_of_waist(w);
      if (T > best_T) {
        best_T = T;
        best_w = w;
      }
    }
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_w - 0.5 * kPi / 600.0, b = best_w + 0.5 * kPi / 600.0;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = t_ideal_of_waist(c1), f2 = t_ideal_of_waist(c2);
    while (b - a > 1e-12) {
      if (f1 < f2) {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + gr * (b - a);
        f2 = t_ideal_of_waist(c2);
      } else {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - gr * (b - a);
        f1 = t_ideal_of_waist(c1);
      }
    }
    const double w = 0.5 * (a + b);
    return std::pair<double, double>{w, t_ideal_of_waist(w)};
  }();
  if (argmax) *argmax = cached.first;
  return cached.second;
}

RotSurface hyp_catenoid(double theta_waist, double waist_t) {
  if (!(theta_waist > 0.0 && theta_waist < 0.5 * kPi))
    throw std::domain_error("hyp_catenoid: waist angle must lie in (0, pi/2)");
  const double c = lambda_weight(theta_waist);
  GeodesicSolution half = hyp_geodesic(c, 0.0, theta_waist);
  // Anchor the waist exactly at waist_t.
  const double shift = waist_t - half.samples.back().t;
  for (auto& s : half.samples) s.t += shift;
  half.t_ideal += shift;

  RotSurface out;
  out.kind = RotKind::HyperbolicCatenoid;
  out.half = std::move(half);
  out.waist_t = waist_t;
  out.boundary_height = (waist_t == 0.0)
                            ? std::tanh(waist_t - out.half.t_ideal)
                            : std::numeric_limits<double>::quiet_NaN();

  // Ball-model meridian profile: lower branch from the ideal boundary to the
  // waist, then the mirrored upper branch back out.
  out.profile.reserve(2 * out.half.samples.size());
  for (const auto& s : out.half.samples)
    out.profile.push_back(ball_from_strip({s.theta, s.t}));
  for (auto it = out.half.samples.rbegin() + 1; it != out.half.samples.rend(); ++it)
    out.profile.push_back(ball_from_strip({it->theta, 2.0 * waist_t - it->t}));
  return out;
}

RotSurface totally_geodesic_pair(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("totally_geodesic_pair: a must lie in (0,1)");
  const double t0 = ideal_t_of_height(a);
  GeodesicSolution half;
  half.c_const = 0.0;
  half.theta_waist = 0.5 * kPi;
  half.t_ideal = t0;
  const int n = 200;
  for (int k = 0; k <= n; ++k) {
    const double f = static_cast<double>(k) / n;
    const double theta = kThetaMinSample + (0.5 * kPi - kThetaMinSample) * f * f;
    half.samples.push_back({theta, t0, 0.0});
  }
  RotSurface out;
  out.kind = RotKind::TotallyGeodesicDiskPair;
  out.boundary_height = a;
  out.half = std::move(half);
  out.waist_t = t0;
  for (const auto& s : out.half.samples)
    out.profile.push_back(ball_from_strip({s.theta, t0}));
  return out;
}

std::vector<RotSurface> hyp_catenoids_through(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("hyp_catenoids_through: a must lie in (0,1)");
  const double target = ideal_t_of_height(a);

  // Fixed table of T(w); T vanishes at both ends of (0, pi/2) with a single
  // interior maximum.
  static const auto table = [] {
    std::vector<std::pair<double, double>> tab;
    const int n = 800;
    tab.reserve(n - 1);
    for (int k = 1; k < n; ++k) {
      const double w = 0.5 * kPi * k / n;
      tab.emplace_back(w, t_ideal_of_waist(w));
    }
    return tab;
  }();

  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < table.size(); ++k) {
    const double f0 = table[k].second - target;
    const double f1 = table[k + 1].second - target;
    if (f0 == 0.0) roots.push_back(table[k].first);
    if (f0 * f1 < 0.0)
      roots.push_back(bisect([&](double w) { return t_ideal_of_waist(w) - target; },
                             table[k].first, table[k + 1].first, 1e-13));
  }
  std::vector<RotSurface> out;
  out.reserve(roots.size());
  for (double w : roots) out.push_back(hyp_catenoid(w, 0.0));
  std::sort(out.begin(), out.end(), [](const RotSurface& x, const RotSurface& y) {
    return delta_limit(x.half.theta_waist) < delta_limit(y.half.theta_waist);
  });
  return out;
}

double ribbon_length(const GeodesicSolution& sol1, const GeodesicSolution& sol2,
                     double theta) {
  if (std::abs(sol1.t_ideal - sol2.t_ideal) > 1e-9)
    throw std::domain_error("ribbon_length: solutions have mismatched ideal boundaries");
  const double hi = std::min(sol1.theta_waist, sol2.theta_waist);
  if (!(theta > 0.0 && theta <= hi + 1e-12))
    throw std::domain_error("ribbon_length: theta outside the common domain");
  return lambda_weight(theta) * std::abs(sol1.t_at(theta) - sol2.t_at(theta));
}

namespace {

// Clipped area of one geodesic branch over [alpha, theta_hi]:
// integral of lambda sqrt(1 + t'^2) = lambda^2 / sqrt(lambda^2 - c^2).
double branch_clipped_area(double c, double theta_w, double alpha, double theta_hi) {
  if (alpha >= theta_hi) return 0.0;
  if (c == 0.0)
    return 2.0 * kPi * (1.0 / std::sin(alpha) - 1.0 / std::sin(theta_hi));
  const double d = std::min(1e-3, 0.5 * (theta_hi - alpha));
  double area = 0.0;
  const double mid = std::min(theta_hi, theta_w - d);
  if (mid > alpha) {
    area += adaptive_simpson(
        [&](double th) {
          const double lam = lambda_weight(th);
          return lam * lam / std::sqrt(speed_sq(th, theta_w));
        },
        alpha, mid, 1e-11);
  }
  if (theta_hi > mid) {
    // Waist side, regular in u = sqrt(theta_w - theta):
    // lambda sqrt(1+t'^2) dtheta = lambda sqrt(4u^2 + (dt/du)^2) du.
    area += adaptive_simpson(
        [&](double u) {
          const double th = theta_w - u * u;
          const double lam = lambda_weight(th);
          const double slope = dt_du(u, c, theta_w);
          return lam * std::sqrt(4.0 * u * u + slope * slope);
        },
        std::sqrt(theta_w - theta_hi), std::sqrt(theta_w - mid), 1e-11);
  }
  return area;
}

}  // namespace

double clipped_area(const RotSurface& surface, double s, double h) {
  if (!surface.hyperbolic())
    throw std::invalid_argument("clipped_area: hyperbolic surfaces only");
  if (!(s > 0.0)) throw std::domain_error("clipped_area: s must be positive");
  const double alpha = cone_angle(s);

  if (surface.kind == RotKind::TotallyGeodesicDiskPair) {
    double total = 0.0;
    for (double t0 : {surface.half.t_ideal, -surface.half.t_ideal}) {
      double lo = alpha;
      if (std::isfinite(h)) {
        const double ratio = std::abs(std::sinh(t0)) / std::sinh(h);
        if (ratio >= 1.0) continue;  // this disk lies farther than h throughout
        lo = std::max(lo, std::asin(ratio));
      }
      if (lo < 0.5 * kPi) total += 2.0 * kPi * (1.0 / std::sin(lo) - 1.0);
    }
    return total;
  }

  const auto& half = surface.half;
  const double theta_w = half.theta_waist;
  if (alpha >= theta_w) return 0.0;  // the cylinder misses the surface
  if (alpha < half.samples.front().theta)
    throw std::domain_error("clipped_area: surface samples do not reach the clip cone");

  if (!std::isfinite(h))
    return 2.0 * branch_clipped_area(half.c_const, theta_w, alpha, theta_w);

  // Finite height clip: restrict each branch to the theta range at distance
  // below h from the equatorial hemisphere; along a branch that distance is
  // monotone for waist-on-equator catenoids, so one crossing at most.
  double total = 0.0;
  for (int branch = 0; branch < 2; ++branch) {
    auto dist = [&](double th) {
      const double t = half.t_at(th);
      const double tb = branch == 0 ? t : 2.0 * surface.waist_t - t;
      return strip_distance_to_hemisphere({th, tb}, 0.0);
    };
    double lo = alpha;
    const double hi = theta_w;
    if (dist(hi - 1e-12) >= h) continue;
    if (dist(lo) > h)
      lo = bisect([&](double th) { return dist(th) - h; }, lo, hi - 1e-12, 1e-12);
    total += branch_clipped_area(half.c_const, theta_w, lo, hi);
  }
  return total;
}

double clipped_area_difference(const RotSurface& catenoid, double s) {
  if (catenoid.kind != RotKind::HyperbolicCatenoid)
    throw std::invalid_argument("clipped_area_difference: catenoid expected");
  const double alpha = cone_angle(s);
  const double w = catenoid.half.theta_waist;
  const double c = catenoid.half.c_const;
  if (alpha >= w)  // cylinder misses the catenoid; only the disks contribute
    return -4.0 * kPi * (1.0 / std::sin(alpha) - 1.0);
  // 2 * integral over [alpha, w] of lambda (sqrt(1+t'^2) - 1)
  //   - 4 pi (1/sin w - 1); the divergent 4 pi / sin(alpha) terms cancel.
  const double d = std::min(1e-3, 0.5 * (w - alpha));
  double integral = 0.0;
  if (alpha < w - d) {
    integral += adaptive_simpson(
        [&](double th) {
          const double lam = lambda_weight(th);
          const double q = std::sqrt(speed_sq(th, w));
          return lam * c * c / (q * (lam + q));
        },
        alpha, w - d, 1e-12);
  }
  integral += adaptive_simpson(
      [&](double u) {
        const double th = w - u * u;
        const double lam = lambda_weight(th);
        const double slope = dt_du(u, c, w);
        return lam * (std::sqrt(4.0 * u * u + slope * slope) - 2.0 * u);
      },
      0.0, std::sqrt(std::min(d, w - alpha)), 1e-12);
  return 2.0 * integral - 4.0 * kPi * (1.0 / std::sin(w) - 1.0);
}

double delta_limit(double theta_waist) {
  const double w = theta_waist;
  const double c = lambda_weight(w);
  const double d = std::min(1e-3, 0.5 * w);
  double integral = adaptive_simpson(
      [&](double th) {
        if (th < 1e-9) return 0.0;  // integrand ~ c^2 th^2 / (4 pi) -> 0
        const double lam = lambda_weight(th);
        const double q = std::sqrt(speed_sq(th, w));
        return lam * c * c / (q * (lam + q));
      },
      0.0, w - d, 1e-12);
  integral += adaptive_simpson(
      [&](double u) {
        const double th = w - u * u;
        const double lam = lambda_weight(th);
        const double slope = dt_du(u, c, w);
        return lam * (std::sqrt(4.0 * u * u + slope * slope) - 2.0 * u);
      },
      0.0, std::sqrt(d), 1e-12);
  return 2.0 * integral - 4.0 * kPi * (1.0 / std::sin(w) - 1.0);
}

double disk_pair_area(double a, const MetricProfile& metric, double s_clip) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("disk_pair_area: a must lie in (0,1)");
  if (metric.is_euclidean()) return 2.0 * kPi * (1.0 - a * a);
  if (!std::isfinite(s_clip))
    throw std::domain_error(
        "disk_pair_area: the Poincare pair has infinite area; pass a clip radius");
  return clipped_area(totally_geodesic_pair(a), s_clip);
}

RotSurface euclid_disk_pair(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("euclid_disk_pair: a must lie in (0,1)");
  RotSurface out;
  out.kind = RotKind::DiskPair;
  out.boundary_height = a;
  out.area = 2.0 * kPi * (1.0 - a * a);
  const double rho = catenoid_boundary_radius(a);
  const int n = 256;
  out.profile.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.profile.push_back({rho * k / n, a});
  return out;
}

std::vector<RotSurface> euclid_catenoids(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("euclid_catenoids: a must lie in (0,1)");
  const double rho = catenoid_boundary_radius(a);
  const double log_rho = std::log(rho);
  auto g = [&](double c) { return std::log(c) + log_cosh(a / c) - log_rho; };
  auto dg = [&](double c) { return 1.0 / c - a / (c * c) * std::tanh(a / c); };

  std::vector<double> roots;
  const int n_scan = 10000;
  const double c_lo = 1e-4, c_hi = 1.0;
  double prev_c = c_lo, prev_g = g(c_lo);
  for (int k = 1; k <= n_scan; ++k) {
    const double c = c_lo + (c_hi - c_lo) * k / n_scan;
    const double gc = g(c);
    if (prev_g == 0.0) roots.push_back(prev_c);
    if (prev_g * gc < 0.0) roots.push_back(newton_in_bracket(g, dg, prev_c, c, 1e-15));
    prev_c = c;
    prev_g = gc;
  }

  std::vector<RotSurface> out;
  for (double c : roots) {
    RotSurface s;
    s.kind = RotKind::Catenoid;
    s.boundary_height = a;
    s.waist_radius = c;
    s.area = adaptive_simpson(
        [&](double z) {
          const double ch = std::cosh(z / c);
          return 2.0 * kPi * c * ch * ch;
        },
        -a, a, 1e-12);
    const int n = 2000;
    s.profile.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double z = -a + 2.0 * a * k / n;
      s.profile.push_back({c * std::cosh(z / c), z});
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const RotSurface& x, const RotSurface& y) { return x.area < y.area; });
  return out;
}

double euclid_catenoid_ode_residual(const RotSurface& s) {
  if (s.kind != RotKind::Catenoid)
    throw std::invalid_argument("euclid_catenoid_ode_residual: catenoid expected");
  const auto& p = s.profile;
  if (p.size() < 5) throw std::invalid_argument("profile too short");
  // Slopes come from the closed form of the stored waist parameter; the
  // residual r r'' - 1 - r'^2 = (r - c cosh(z/c)) cosh(z/c) / c then measures
  // how far each stored sample sits from the ODE solution through that waist.
  // (A five-point difference stencil cannot certify 1e-8 for small waists:
  // its double-precision noise floor is eps / dz^2.)
  const double c = s.waist_radius;
  double worst = 0.0;
  for (const auto& q : p) {
    const double d1 = std::sinh(q.z / c);
    const double d2 = std::cosh(q.z / c) / c;
    worst = std::max(worst, std::abs(q.r * d2 - 1.0 - d1 * d1));
  }
  return worst;
}

MaClassification classify_Ma(double a, const MetricProfile& metric) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("classify_Ma: a must lie in (0,1)");
  MaClassification out;
  out.a = a;

  if (metric.is_euclidean()) {
    out.disk_value = disk_pair_area(a, metric);
    auto cats = euclid_catenoids(a);
    out.best_annulus_value = cats.empty() ? kInf : cats.front().area;
    const double diff = out.best_annulus_value - out.disk_value;
    if (std::abs(diff) <= kAreaTieTol)
      out.verdict = Verdict::Both;
    else
      out.verdict = diff > 0.0 ? Verdict::DisksOnly : Verdict::AnnuliOnly;
    const double best = std::min(out.disk_value, out.best_annulus_value);
    if (out.disk_value <= best + kAreaTieTol)
      out.minimizers.push_back(euclid_disk_pair(a));
    for (auto& c : cats)
      if (c.area <= best + kAreaTieTol) out.minimizers.push_back(std::move(c));
    return out;
  }

  // Poincare: compare limits of clipped-area differences against the totally
  // geodesic pair, whose own difference is 0 by convention.
  out.disk_value = 0.0;
  auto cats = hyp_catenoids_through(a);
  double best_delta = kInf;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const double dlt = delta_limit(cats[i].half.theta_waist);
    if (dlt < best_delta) {
      best_delta = dlt;
      best_idx = i;
    }
  }
  out.best_annulus_value = cats.empty() ? kInf : best_delta;
  const double diff = out.best_annulus_value;
  if (std::isfinite(diff) && std::abs(diff) <= kAreaTieTol)
    out.verdict = Verdict::Both;
  else
    out.verdict = diff > 0.0 ? Verdict::DisksOnly : Verdict::AnnuliOnly;
  if (diff >= -kAreaTieTol) out.minimizers.push_back(totally_geodesic_pair(a));
  if (!cats.empty() && diff <= kAreaTieTol)
    out.minimizers.push_back(std::move(cats[best_idx]));
  return out;
}

namespace {
double signed_min_difference(double a, const MetricProfile& metric) {
  const auto cls = classify_Ma(a, metric);
  if (!std::isfinite(cls.best_annulus_value)) return 1.0;  // disks win by default
  return cls.best_annulus_value - cls.disk_value;
}
}  // namespace

ACritResult find_a_crit(const MetricProfile& metric) {
  const double a_min = 0.01, a_max = 0.99;
  const int n_scan = 64;
  double lo = 0.0, hi = 0.0, flo = 0.0;
  bool found = false;
  double prev_a = a_min, prev_f = signed_min_difference(a_min, metric);
  for (int k = 1; k <= n_scan; ++k) {
    const double a = a_min + (a_max - a_min) * k / n_scan;
    const double f = signed_min_difference(a, metric);
    if (prev_f < 0.0 && f > 0.0) {
      lo = prev_a;
      hi = a;
      flo = prev_f;
      found = true;
      break;
    }
    prev_a = a;
    prev_f = f;
  }
  if (!found)
    throw std::runtime_error(
        "find_a_crit: no annulus/disk crossover found; area computation is suspect");
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    const double fm = signed_min_difference(mid, metric);
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), lo, hi};
}

bool geodesics_cross_at_most_once(const GeodesicSolution& sol1,
                                  const GeodesicSolution& sol2, double theta_cap) {
  if (theta_cap <= 0.0) theta_cap = std::atan(std::sqrt(2.0));
  if (sol1.samples.empty() || sol2.samples.empty())
    throw std::domain_error("geodesics_cross_at_most_once: empty solution");
  const double lo =
      std::max({sol1.samples.front().theta, sol2.samples.front().theta, 1e-6});
  const double hi = std::min(
      {sol1.samples.back().theta, sol2.samples.back().theta, theta_cap});
  if (!(hi > lo))
    throw std::domain_error("geodesics_cross_at_most_once: empty common domain");
  const int n = 4000;
  int crossings = 0;
  int last_sign = 0;
  for (int k = 0; k <= n; ++k) {
    const double th = lo + (hi - lo) * k / n;
    const double diff = sol1.t_at(th) - sol2.t_at(th);
    const int sign = (diff > 1e-13) ? 1 : (diff < -1e-13 ? -1 : 0);
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) ++crossings;
      last_sign = sign;
    }
  }
  return crossings <= 1;
}

std::string profile_csv(const RotSurface& s) {
  std::ostringstream os;
  if (s.hyperbolic()) {
    os << "theta,t\n";
    for (const auto& smp : s.half.samples)
      os << format_double(smp.theta) << "," << format_double(smp.t) << "\n";
    if (s.kind == RotKind::HyperbolicCatenoid) {
      for (auto it = s.half.samples.rbegin() + 1; it != s.half.samples.rend(); ++it)
        os << format_double(it->theta) << ","
           << format_double(2.0 * s.waist_t - it->t) << "\n";
    }
  } else {
    os << "r,z\n";
    for (const auto& p : s.profile)
      os << format_double(p.r) << "," << format_double(p.z) << "\n";
  }
  return os.str();
}

}  // namespace thetalam::rotmin
