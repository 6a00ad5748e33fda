// Small numerical toolbox shared across the library: adaptive quadrature,
// an embedded Runge-Kutta stepper, bracketed root finding, monotone Hermite
// interpolation, polyline utilities, a deterministic RNG and hashing.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thetalam {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Quadrature

// Adaptive Simpson on [a,b]. `tol` is an absolute tolerance for the whole
// interval; recursion splits until the local Richardson estimate passes.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

// ---------------------------------------------------------------------------
// Root finding

// Bisection on [lo,hi]; requires f(lo)*f(hi) <= 0. Returns the midpoint of the
// final bracket of width <= xtol.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 1e-14, int max_iter = 200);

// Newton with bisection fallback inside a bracket.
double newton_in_bracket(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double lo,
                         double hi, double xtol = 1e-14, int max_iter = 100);

// ---------------------------------------------------------------------------
// Embedded Runge-Kutta (Dormand-Prince 5(4)) for small fixed-size systems.

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.05;
  double initial_step = 1e-4;
  int max_steps = 2000000;
};

struct OdeSample {
  double x;
  std::vector<double> y;
};

// Integrates y' = f(x, y) from x0 to x1 (x1 > x0), recording every accepted
// step. `stop` (optional) ends integration early when it returns true.
std::vector<OdeSample> integrate_ode(
    const std::function<void(double, const double*, double*)>& f, int dim,
    double x0, const std::vector<double>& y0, double x1, const OdeOptions& opt,
    const std::function<bool(double, const double*)>& stop = nullptr);

// ---------------------------------------------------------------------------
// Interpolation

// Piecewise cubic Hermite interpolant through (x_i, y_i) with prescribed
// slopes m_i. x must be strictly increasing.
struct HermiteCurve {
  std::vector<double> x, y, m;
  double value(double xq) const;
  double slope(double xq) const;
};

// ---------------------------------------------------------------------------
// Polylines

struct Vec2 {
  double x = 0.0, y = 0.0;
};

double polyline_length(const std::vector<Vec2>& p);

// Symmetric Hausdorff distance between two polylines, measured after
// resampling each at spacing <= ds (point-to-segment distances).
double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// ---------------------------------------------------------------------------
// Deterministic RNG (SplitMix64). Identical streams on every platform.

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  // Uniform in [0,1).
  double next_double();
  // Uniform in [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Hashing / formatting

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Shortest round-trip decimal formatting ("%.17g" trimmed) and fixed-precision
// formatting; both locale-independent.
std::string format_double(double v);
std::string format_fixed(double v, int digits);

// ---------------------------------------------------------------------------
// Deterministic parallel map: runs f(i) for i in [0,n). Each index writes only
// its own output slot, so results do not depend on the thread count. Thread
// count is min(THETALAM_THREADS, hardware).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);
int effective_thread_count();

}  // namespace thetalam
