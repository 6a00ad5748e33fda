// Rotationally invariant minimal surfaces bounded by the circle pair
// c(a) = boundary-sphere ∩ {z = ±a}: flat disk pairs and catenoids in the
// Euclidean ball, totally geodesic disk pairs and catenoids in the Poincare
// ball (via the strip reduction), together with clipped-area comparison and
// the disk/annulus classification with its critical height.
#pragma once

#include <limits>
#include <vector>

#include "thetalam/geom.hpp"
#include "thetalam/numerics.hpp"

namespace thetalam::rotmin {

using geom::MetricProfile;
using geom::PlanePoint;
using geom::StripPoint;

// A rotational minimal surface as a geodesic t(theta) of the strip weight,
// with first-integral constant c = lambda(theta) t' / sqrt(t'^2 + 1).
// Samples cover one increasing branch: t' >= 0, theta in (0, theta_waist].
struct GeodesicSolution {
  double c_const = 0.0;
  double theta_waist = 0.5 * kPi;  // where lambda = c (pi/2 when c = 0)
  double t_ideal = 0.0;            // limit of t at the ideal boundary theta -> 0

  struct Sample {
    double theta;
    double t;
    double dt_dtheta;  // +inf at the waist sample
  };
  std::vector<Sample> samples;  // strictly increasing in theta

  double t_at(double theta) const;
  double dt_at(double theta) const;
};

enum class RotKind { DiskPair, Catenoid, TotallyGeodesicDiskPair, HyperbolicCatenoid };

struct RotSurface {
  RotKind kind = RotKind::DiskPair;
  double boundary_height = 0.0;  // a in (0,1); NaN when unattached
  double area = std::numeric_limits<double>::quiet_NaN();  // finite metrics only

  // Euclidean catenoid: r = c cosh(z/c).
  double waist_radius = 0.0;

  // Hyperbolic kinds: increasing half-branch plus the waist line t = waist_t.
  GeodesicSolution half;
  double waist_t = 0.0;

  // Meridian profile in ball coordinates, ordered along the curve. For pairs
  // of disks this holds the upper disk; the lower one is its mu-mirror.
  std::vector<PlanePoint> profile;

  bool hyperbolic() const {
    return kind == RotKind::TotallyGeodesicDiskPair || kind == RotKind::HyperbolicCatenoid;
  }
};

// ---------------------------------------------------------------------------
// Euclidean family

// Area of the flat disk pair through c(a): exactly 2 pi (1 - a^2).
// For the Poincare metric areas are infinite; pass a finite clip radius s to
// get the clipped area of the totally geodesic pair inside Cyl(s).
double disk_pair_area(double a, const MetricProfile& metric,
                      double s_clip = std::numeric_limits<double>::infinity());

// All catenoids r = c cosh(z/c) through c(a), i.e. roots of
// c cosh(a/c) = sqrt(1-a^2). Returns 0, 1 or 2 surfaces sorted by area.
std::vector<RotSurface> euclid_catenoids(double a);

// Flat disk pair as a RotSurface (profile of the upper disk).
RotSurface euclid_disk_pair(double a);

// ---------------------------------------------------------------------------
// Hyperbolic family (strip reduction)

// Waist angle for a given first-integral constant: lambda(theta_w) = c.
double waist_angle(double c_const);

// Integrates the geodesic with constant c >= 0 from the ideal boundary
// (t -> t_ideal as theta -> 0) up to theta_max <= waist_angle(c).
// A negative c is normalized by the symmetry t -> -t.
GeodesicSolution hyp_geodesic(double c_const, double t_ideal, double theta_max);

// Hyperbolic catenoid: symmetric join of two half-catenoids across the waist
// line t = waist_t, with waist angle theta_waist in (0, pi/2).
RotSurface hyp_catenoid(double theta_waist, double waist_t);

// Totally geodesic disk pair with ideal circles at heights ±a (waist_t = 0).
RotSurface totally_geodesic_pair(double a);

// All hyperbolic catenoids with waist on {z=0} whose ideal boundary is c(a):
// waist angles solving t_ideal_of_waist(w) = artanh(a). Sorted by the
// clipped-area difference against the disk pair (most negative first).
std::vector<RotSurface> hyp_catenoids_through(double a);

// Half ideal separation T(w) = lim t(0+) offset of a half-catenoid with waist
// angle w (quadrature of the closed-form slope).
double t_ideal_of_waist(double theta_waist);

// Maximum of t_ideal_of_waist over (0, pi/2); catenoids through c(a) exist
// iff artanh(a) <= max. Also reports the argmax.
double max_ideal_t(double* argmax = nullptr);

// Area of the cone(theta) ribbon between two rotational surfaces sharing an
// ideal boundary circle: lambda(theta) |t1(theta) - t2(theta)|.
double ribbon_length(const GeodesicSolution& sol1, const GeodesicSolution& sol2,
                     double theta);

// Area of a hyperbolic RotSurface inside Cyl(s, h): hyperbolic distance <= s
// from the axis and (when h is finite) < h from the equatorial disk.
double clipped_area(const RotSurface& surface, double s,
                    double h = std::numeric_limits<double>::infinity());

// Stable evaluation of Delta(s) = clipped_area(catenoid, s) - clipped_area
// (its disk pair, s); the two raw areas share a divergent 4 pi / sin(alpha)
// term that cancels analytically here.
double clipped_area_difference(const RotSurface& catenoid, double s);

// Limit of Delta(s) as s -> infinity (convergent closed-form quadrature).
double delta_limit(double theta_waist);

// ---------------------------------------------------------------------------
// Classification

enum class Verdict { DisksOnly, AnnuliOnly, Both };

struct MaClassification {
  double a = 0.0;
  Verdict verdict = Verdict::DisksOnly;
  std::vector<RotSurface> minimizers;
  // Euclidean: areas. Poincare: limit clipped-area differences vs the disks
  // (disks contribute 0 by convention).
  double disk_value = 0.0;
  double best_annulus_value = std::numeric_limits<double>::infinity();
};

// Area tie tolerance for the verdict Both.
inline constexpr double kAreaTieTol = 1e-7;

MaClassification classify_Ma(double a, const MetricProfile& metric);

struct ACritResult {
  double a_crit = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
};

// Critical height where the minimizer switches between annuli and disk
// pairs; bisection on the signed area (or clipped-Delta) difference down to
// bracket width 1e-8. Throws std::runtime_error if no sign change exists.
ACritResult find_a_crit(const MetricProfile& metric);

// Counts sign changes of t1 - t2 on the common domain restricted to
// theta <= theta_cap (default: the negative-curvature region of the strip,
// theta < arctan sqrt 2). True iff the solutions cross at most once there.
bool geodesics_cross_at_most_once(const GeodesicSolution& sol1,
                                  const GeodesicSolution& sol2,
                                  double theta_cap = 0.0);

// ---------------------------------------------------------------------------
// Profile diagnostics

// Max residual of r r'' = 1 + r'^2 along a Euclidean catenoid profile,
// via five-point finite differences on the stored samples.
double euclid_catenoid_ode_residual(const RotSurface& s);

// CSV export of a profile curve (theta,t rows for hyperbolic kinds,
// r,z rows otherwise).
std::string profile_csv(const RotSurface& s);

}  // namespace thetalam::rotmin
