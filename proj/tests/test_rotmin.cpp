#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "thetalam/rotmin.hpp"

using namespace thetalam;
using namespace thetalam::rotmin;
using geom::MetricProfile;

TEST_CASE("disk pair area, Euclidean") {
  const auto eu = MetricProfile::euclidean();
  CHECK(disk_pair_area(0.5, eu) == doctest::Approx(1.5 * kPi).epsilon(1e-15));
  CHECK(disk_pair_area(0.2, eu) == doctest::Approx(1.92 * kPi).epsilon(1e-15));
  CHECK(disk_pair_area(0.999, eu) < 0.02);
  CHECK_THROWS_AS(disk_pair_area(0.0, eu), std::domain_error);
  CHECK_THROWS_AS(disk_pair_area(1.0, eu), std::domain_error);
  // Poincare pair has infinite area without a clip.
  CHECK_THROWS_AS(disk_pair_area(0.5, MetricProfile::poincare()), std::domain_error);
}

TEST_CASE("euclid_catenoids against the dense-scan oracle") {
  for (double a : {0.1, 0.2, 0.35, 0.5}) {
    const auto cats = euclid_catenoids(a);
    const auto scan = oracles::euclid_catenoid_scan(a);
    REQUIRE(cats.size() == scan.size());
    REQUIRE(cats.size() == 2);
    // Same waists (scan is sorted ascending in c; ours by area).
    std::vector<double> ours;
    for (const auto& s : cats) ours.push_back(s.waist_radius);
    std::sort(ours.begin(), ours.end());
    for (std::size_t i = 0; i < scan.size(); ++i)
      CHECK(ours[i] == doctest::Approx(scan[i]).epsilon(1e-9));
  }
  // Near the top of the family no catenoid spans the circles.
  CHECK(euclid_catenoids(0.9).empty());
  CHECK(euclid_catenoids(0.99).empty());
}

TEST_CASE("euclid catenoid areas, boundary hit and ODE residual") {
  const double a = 0.3;
  const auto cats = euclid_catenoids(a);
  REQUIRE(cats.size() == 2);
  CHECK(cats[0].area < cats[1].area);
  const double rho = std::sqrt(1.0 - a * a);
  for (const auto& s : cats) {
    CHECK(s.area ==
          doctest::Approx(oracles::euclid_catenoid_area_closed(a, s.waist_radius))
              .epsilon(1e-10));
    // Boundary circles hit to 1e-10.
    CHECK(std::abs(s.profile.front().r - rho) < 1e-10);
    CHECK(std::abs(s.profile.front().z + a) < 1e-15);
    CHECK(std::abs(s.profile.back().r - rho) < 1e-10);
    CHECK(std::abs(s.profile.back().z - a) < 1e-15);
    // Defining ODE r r'' = 1 + r'^2 along the stored profile.
    CHECK(euclid_catenoid_ode_residual(s) < 1e-8);
    // mu-symmetry of the profile.
    const auto& p = s.profile;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto& q = p[p.size() - 1 - k];
      CHECK(p[k].r == doctest::Approx(q.r).epsilon(1e-12));
      CHECK(p[k].z == doctest::Approx(-q.z).epsilon(1e-12));
    }
  }
}

TEST_CASE("hyp_geodesic basics") {
  // c = 0 is a horizontal line.
  const auto flat = hyp_geodesic(0.0, 0.7, 0.5 * kPi);
  CHECK(flat.theta_waist == doctest::Approx(0.5 * kPi));
  for (const auto& s : flat.samples) CHECK(s.t == 0.7);
  CHECK(flat.t_at(0.3) == 0.7);

  // Negative c is normalized by the t -> -t symmetry.
  const auto neg = hyp_geodesic(-2.0, 0.0, 0.5);
  CHECK(neg.c_const == doctest::Approx(2.0));

  const double w = 0.9;
  const double c = geom::lambda_weight(w);
  CHECK_THROWS_AS(hyp_geodesic(c, 0.0, w + 0.01), std::domain_error);

  const auto sol = hyp_geodesic(c, 0.0, 0.8 * w);
  CHECK(sol.samples.front().theta <= 1e-6);
  CHECK(sol.samples.back().theta == doctest::Approx(0.8 * w).epsilon(1e-12));
  // t is increasing along the branch.
  for (std::size_t k = 1; k < sol.samples.size(); ++k)
    CHECK(sol.samples[k].t >= sol.samples[k - 1].t);
}

TEST_CASE("hyp_geodesic first integral at every sample") {
  for (double w : {0.4, 0.9, 1.3}) {
    const double c = geom::lambda_weight(w);
    const auto sol = hyp_geodesic(c, -0.2, w);
    for (const auto& s : sol.samples) {
      double value;
      if (std::isfinite(s.dt_dtheta)) {
        value = geom::lambda_weight(s.theta) * s.dt_dtheta /
                std::sqrt(s.dt_dtheta * s.dt_dtheta + 1.0);
      } else {
        value = geom::lambda_weight(s.theta);
      }
      CHECK(std::abs(value - c) <= 1e-8 * std::max(1.0, c));
    }
  }
}

TEST_CASE("hyp_geodesic near-boundary asymptotics") {
  const double w = 1.0;
  const double c = geom::lambda_weight(w);
  const auto sol = hyp_geodesic(c, 0.3, w);
  // t'(theta)/theta^2 -> c/(2 pi) within 1% at theta = 1e-3.
  const double ratio = sol.dt_at(1e-3) / 1e-6;
  CHECK(std::abs(ratio - c / (2.0 * kPi)) < 0.01 * c / (2.0 * kPi));
  // (t - t_ideal)/theta^3 stays bounded (and near c/(6 pi)) on [1e-3, 1e-1].
  for (double th = 1e-3; th <= 0.1; th *= 2.0) {
    const double q = (sol.t_at(th) - sol.t_ideal) / (th * th * th);
    CHECK(q > 0.0);
    CHECK(q < 2.0 * c / (6.0 * kPi));
  }
}

TEST_CASE("hyp_geodesic t values match the fixed-step RK4 oracle") {
  for (double w : {0.5, 1.1}) {
    const double c = geom::lambda_weight(w);
    const auto sol = hyp_geodesic(c, 0.0, w);
    for (double frac : {0.3, 0.6, 0.9}) {
      const double th = frac * w;
      const double oracle = oracles::geodesic_t_oracle(c, 0.0, 1e-4, th, 40000);
      const double oracle_half = oracles::geodesic_t_oracle(c, 0.0, 1e-4, th, 80000);
      CHECK(std::abs(oracle - oracle_half) < 1e-9);  // oracle self-consistency
      CHECK(sol.t_at(th) == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
}

TEST_CASE("hyp_catenoid symmetry, waist curvature, ideal separation") {
  const double w = 0.5;
  const auto cat = hyp_catenoid(w, 0.25);
  CHECK(cat.half.samples.back().t == doctest::Approx(0.25).epsilon(1e-14));

  // Symmetric join: t+ + t- = 2 waist_t by construction, checked through the
  // meridian profile: mapped pairs mirror across the waist line in t.
  const auto& half = cat.half;
  for (const auto& s : half.samples) {
    const double t_plus = 2.0 * cat.waist_t - s.t;
    CHECK(t_plus + s.t == doctest::Approx(2.0 * cat.waist_t).epsilon(1e-14));
  }

  // Waist at arctan sqrt 2 sits exactly at the curvature sign change.
  const double alpha0 = std::atan(std::sqrt(2.0));
  CHECK(geom::strip_curvature(alpha0) == doctest::Approx(0.0).epsilon(1e-14));
  const auto cat0 = hyp_catenoid(alpha0, 0.0);
  CHECK(geom::strip_curvature(cat0.half.theta_waist) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Ideal separation against the step-halved RK4 oracle.
  const auto sym = hyp_catenoid(w, 0.0);
  const double separation = -2.0 * sym.half.t_ideal;  // t_ideal(+) - t_ideal(-)
  const double o1 = 2.0 * oracles::half_separation_oracle(w, 40000);
  const double o2 = 2.0 * oracles::half_separation_oracle(w, 80000);
  CHECK(std::abs(o1 - o2) < 1e-7);
  CHECK(std::abs(separation - o1) < 1e-6);
  // Quadrature route agrees too.
  CHECK(2.0 * t_ideal_of_waist(w) == doctest::Approx(o1).epsilon(1e-7));

  // Ball profile of the mu-symmetric catenoid is symmetric in z.
  const auto& p = sym.profile;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& q = p[p.size() - 1 - k];
    CHECK(p[k].r == doctest::Approx(q.r).epsilon(1e-10));
    CHECK(p[k].z == doctest::Approx(-q.z).epsilon(1e-10));
  }
}

TEST_CASE("t_ideal_of_waist vanishes at both ends with one interior max") {
  CHECK(t_ideal_of_waist(0.02) < 0.02);
  // The decay toward pi/2 is slow; check the trend rather than a rate.
  CHECK(t_ideal_of_waist(0.5 * kPi - 0.02) < 0.15);
  CHECK(t_ideal_of_waist(0.5 * kPi - 1e-3) < t_ideal_of_waist(0.5 * kPi - 0.02));
  CHECK(t_ideal_of_waist(0.5 * kPi - 1e-5) < t_ideal_of_waist(0.5 * kPi - 1e-3));
  double argmax = 0.0;
  const double tmax = max_ideal_t(&argmax);
  CHECK(tmax > 0.1);
  CHECK(argmax > 0.1);
  CHECK(argmax < 0.5 * kPi - 0.1);
  CHECK(t_ideal_of_waist(argmax) >= t_ideal_of_waist(argmax - 0.05));
  CHECK(t_ideal_of_waist(argmax) >= t_ideal_of_waist(argmax + 0.05));
}

TEST_CASE("hyp_catenoids_through") {
  const double a_exist = std::tanh(max_ideal_t(nullptr));
  const double a_low = 0.5 * a_exist;
  const auto cats = hyp_catenoids_through(a_low);
  CHECK(cats.size() == 2);
  for (const auto& c : cats) {
    CHECK(c.waist_t == 0.0);
    CHECK(std::abs(-c.half.t_ideal - geom::ideal_t_of_height(a_low)) < 1e-9);
    // Profile endpoints approach the ideal circles at heights +-a.
    CHECK(std::abs(std::abs(c.profile.front().z) - a_low) < 1e-4);
    CHECK(std::abs(c.profile.front().r * c.profile.front().r +
                   c.profile.front().z * c.profile.front().z - 1.0) < 1e-4);
  }
  CHECK(hyp_catenoids_through(std::min(0.99, a_exist + 0.05)).empty());
}

TEST_CASE("ribbon length") {
  const double w = 0.5;
  const auto cat = hyp_catenoid(w, 0.0);
  // Companion totally geodesic surface through the same ideal circle.
  const auto companion = hyp_geodesic(0.0, cat.half.t_ideal, 0.5 * kPi);

  // Identical solutions give zero ribbon.
  const auto again = hyp_geodesic(0.0, cat.half.t_ideal, 0.5 * kPi);
  for (double th : {0.05, 0.2, 0.4})
    CHECK(ribbon_length(companion, again, th) == doctest::Approx(0.0));

  // Mismatched ideal boundaries are rejected.
  const auto other = hyp_geodesic(0.0, cat.half.t_ideal + 0.1, 0.5 * kPi);
  CHECK_THROWS_AS(ribbon_length(companion, other, 0.2), std::domain_error);

  // Decay: ribbon -> 0 as theta -> 0 and ribbon/theta stays bounded.
  double prev = ribbon_length(cat.half, companion, 0.2);
  for (double th : {0.1, 0.05, 0.02, 0.01, 1e-3}) {
    const double rb = ribbon_length(cat.half, companion, th);
    CHECK(rb < prev);
    prev = rb;
  }
  const double c = cat.half.c_const;
  std::vector<double> thetas, ratios;
  for (double th = 1e-3; th <= 0.1; th *= 1.3) {
    const double rb = ribbon_length(cat.half, companion, th);
    thetas.push_back(th);
    ratios.push_back(rb / th);
    CHECK(rb / th < 2.0 * c / 3.0);
    CHECK(rb / th > 0.2 * c / 3.0);
  }
  // Linear fit ribbon ~ C*theta with small relative residual.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    num += thetas[i] * (ratios[i] * thetas[i]);
    den += thetas[i] * thetas[i];
  }
  const double C = num / den;
  for (std::size_t i = 0; i < thetas.size(); ++i)
    CHECK(std::abs(ratios[i] * thetas[i] - C * thetas[i]) <= 0.05 * C * thetas[i]);
}

TEST_CASE("clipped areas") {
  const double w = 0.5;
  const auto cat = hyp_catenoid(w, 0.0);
  const auto disks = totally_geodesic_pair(std::tanh(t_ideal_of_waist(w)));

  // A cylinder thinner than the waist cone misses the catenoid.
  const double s_miss = geom::cone_distance(w) - 0.3;
  CHECK(clipped_area(cat, s_miss) == 0.0);

  // Monotone nondecreasing in s and in h.
  double prev = 0.0;
  for (double s = 1.0; s <= 8.0; s += 0.5) {
    const double area = clipped_area(cat, s);
    CHECK(area >= prev - 1e-12);
    prev = area;
  }
  const double s_fix = 3.0;
  double prev_h = 0.0;
  for (double hclip = 0.5; hclip <= 4.0; hclip += 0.5) {
    const double area = clipped_area(cat, s_fix, hclip);
    CHECK(area >= prev_h - 1e-12);
    prev_h = area;
  }
  CHECK(clipped_area(cat, s_fix, 50.0) ==
        doctest::Approx(clipped_area(cat, s_fix)).epsilon(1e-9));

  // Samples only reach theta ~ 1e-7; deeper clips are rejected.
  CHECK_THROWS_AS(clipped_area(cat, 18.0), std::domain_error);

  // Totally geodesic pair: clipped area matches the hyperbolic disk area
  // 2 * 2 pi (cosh s - 1) when h clipping is off and the waist is centered.
  const auto pair0 = totally_geodesic_pair(1e-9);
  for (double s : {0.5, 1.0, 2.0})
    CHECK(clipped_area(pair0, s) ==
          doctest::Approx(4.0 * kPi * (std::cosh(s) - 1.0)).epsilon(1e-6));

  // Raw difference equals the cancellation-free evaluation.
  const double raw = clipped_area(cat, s_fix) - clipped_area(disks, s_fix);
  CHECK(clipped_area_difference(cat, s_fix) == doctest::Approx(raw).epsilon(1e-8));
}

TEST_CASE("clipped-area difference converges to delta_limit") {
  const double w = 0.8;
  const auto cat = hyp_catenoid(w, 0.0);
  const double lim = delta_limit(w);
  double prev = clipped_area_difference(cat, 0.5);
  double s = 0.5;
  bool converged = false;
  for (int k = 2; k <= 40; ++k) {
    const double cur = clipped_area_difference(cat, 0.5 * k);
    if (std::abs(cur - prev) <= 1e-6) {
      converged = true;
      s = 0.5 * k;
      prev = cur;
      break;
    }
    prev = cur;
  }
  CHECK(converged);
  CHECK(std::abs(prev - lim) < 1e-5);
  CHECK(s < 12.0);
}

TEST_CASE("classify_Ma Euclidean regimes") {
  const auto eu = MetricProfile::euclidean();
  // Near 1: disks only. Near 0: annuli only.
  CHECK(classify_Ma(0.9, eu).verdict == Verdict::DisksOnly);
  CHECK(classify_Ma(0.75, eu).verdict == Verdict::DisksOnly);
  CHECK(classify_Ma(0.1, eu).verdict == Verdict::AnnuliOnly);
  CHECK(classify_Ma(0.3, eu).verdict == Verdict::AnnuliOnly);

  const auto cls = classify_Ma(0.3, eu);
  REQUIRE(cls.minimizers.size() == 1);
  CHECK(cls.minimizers[0].kind == RotKind::Catenoid);
  CHECK(cls.best_annulus_value < cls.disk_value);

  // Minimizer areas agree within the tie tolerance of the reported best.
  const auto both = classify_Ma(find_a_crit(eu).a_crit, eu);
  CHECK(both.verdict == Verdict::Both);
  REQUIRE(both.minimizers.size() == 2);
  CHECK(std::abs(both.minimizers[0].area - both.minimizers[1].area) < 1e-6);
}

TEST_CASE("find_a_crit Euclidean against the dense-scan oracle") {
  const auto eu = MetricProfile::euclidean();
  const auto res = find_a_crit(eu);
  CHECK(res.bracket_hi - res.bracket_lo <= 1e-8);

  // Dense scan: tabulate the signed area difference at 1e4 points and locate
  // the crossing by linear interpolation.
  auto signed_diff = [&](double a) {
    const auto scan = oracles::euclid_catenoid_scan(a, 4000);
    if (scan.empty()) return 1.0;
    double best = 1e300;
    for (double c : scan)
      best = std::min(best, oracles::euclid_catenoid_area_closed(a, c));
    return best - 2.0 * kPi * (1.0 - a * a);
  };
  const int n = 10000;
  const double a0 = 0.3, a1 = 0.6;
  double prev_a = a0, prev_f = signed_diff(a0);
  double crossing = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double a = a0 + (a1 - a0) * k / n;
    const double f = signed_diff(a);
    if (prev_f < 0.0 && f >= 0.0) {
      crossing = prev_a - prev_f * (a - prev_a) / (f - prev_f);
      break;
    }
    prev_a = a;
    prev_f = f;
  }
  REQUIRE(crossing > 0.0);
  CHECK(std::abs(res.a_crit - crossing) < 1e-6);

  // Verdict flips across a_crit.
  CHECK(classify_Ma(res.a_crit - 1e-4, eu).verdict == Verdict::AnnuliOnly);
  CHECK(classify_Ma(res.a_crit + 1e-4, eu).verdict == Verdict::DisksOnly);
  CHECK(classify_Ma(res.a_crit, eu).verdict == Verdict::Both);

  // Monotonicity on the two sides (annulus value relative to disks).
  CHECK(classify_Ma(0.5 * res.a_crit, eu).best_annulus_value <
        disk_pair_area(0.5 * res.a_crit, eu));
  CHECK(classify_Ma(0.5 * (1 + res.a_crit), eu).best_annulus_value >
        disk_pair_area(0.5 * (1 + res.a_crit), eu));
}

TEST_CASE("a_crit is stable under quadrature refinement") {
  // Roots of (catenoid area - disk area) computed with the adaptive area
  // quadrature at tol and tol/16 agree to well below 1e-7.
  auto diff_at_tol = [&](double a, double tol) {
    const auto scan = oracles::euclid_catenoid_scan(a, 4000);
    double best = 1e300;
    for (double c : scan) {
      const double area = thetalam::adaptive_simpson(
          [&](double z) {
            const double ch = std::cosh(z / c);
            return 2.0 * kPi * c * ch * ch;
          },
          -a, a, tol);
      best = std::min(best, area);
    }
    return best - 2.0 * kPi * (1.0 - a * a);
  };
  auto root = [&](double tol) {
    return thetalam::bisect([&](double a) { return diff_at_tol(a, tol); }, 0.3, 0.6,
                            1e-10);
  };
  CHECK(std::abs(root(1e-9) - root(1e-9 / 16.0)) <= 1e-7);
}

TEST_CASE("classify_Ma Poincare regimes and hyperbolic a_crit") {
  const auto po = MetricProfile::poincare();
  const auto res = find_a_crit(po);
  CHECK(res.bracket_hi - res.bracket_lo <= 1e-8);
  CHECK(res.a_crit > 0.0);
  CHECK(res.a_crit < 1.0);

  CHECK(classify_Ma(0.5 * res.a_crit, po).verdict == Verdict::AnnuliOnly);
  CHECK(classify_Ma(0.5 * (1.0 + res.a_crit), po).verdict == Verdict::DisksOnly);
  CHECK(classify_Ma(res.a_crit, po).verdict == Verdict::Both);

  const auto annuli = classify_Ma(0.5 * res.a_crit, po);
  REQUIRE(annuli.minimizers.size() == 1);
  CHECK(annuli.minimizers[0].kind == RotKind::HyperbolicCatenoid);
  CHECK(annuli.best_annulus_value < 0.0);

  const auto disks = classify_Ma(0.5 * (1.0 + res.a_crit), po);
  REQUIRE(disks.minimizers.size() >= 1);
  CHECK(disks.minimizers[0].kind == RotKind::TotallyGeodesicDiskPair);
}

TEST_CASE("geodesics cross at most once in the negative-curvature region") {
  // Two distinct horizontal geodesics never cross.
  const auto g1 = hyp_geodesic(0.0, 0.0, 0.5 * kPi);
  const auto g2 = hyp_geodesic(0.0, 0.5, 0.5 * kPi);
  CHECK(geodesics_cross_at_most_once(g1, g2));

  // Catenoid branch against the geodesic through the same ideal point.
  const auto cat = hyp_catenoid(0.5, 0.0);
  const auto tangent = hyp_geodesic(0.0, cat.half.t_ideal, 0.5 * kPi);
  CHECK(geodesics_cross_at_most_once(cat.half, tangent));

  // Randomized catenoid-branch pairs restricted to theta < arctan sqrt 2.
  SplitMix64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const double w1 = rng.uniform(0.3, 1.4);
    const double w2 = rng.uniform(0.3, 1.4);
    const auto c1 = hyp_catenoid(w1, rng.uniform(-0.3, 0.3));
    const auto c2 = hyp_catenoid(w2, rng.uniform(-0.3, 0.3));
    CHECK(geodesics_cross_at_most_once(c1.half, c2.half));
  }

  CHECK_THROWS_AS(
      geodesics_cross_at_most_once(hyp_geodesic(0.0, 0.0, 5e-7),
                                   hyp_geodesic(0.0, 1.0, 0.5)),
      std::domain_error);
}

TEST_CASE("profile csv") {
  const auto cat = euclid_catenoids(0.3).front();
  const auto csv = profile_csv(cat);
  CHECK(csv.rfind("r,z\n", 0) == 0);
  const auto hyp = hyp_catenoid(0.5, 0.0);
  CHECK(profile_csv(hyp).rfind("theta,t\n", 0) == 0);
}
