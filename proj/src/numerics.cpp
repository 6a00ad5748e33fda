#include "thetalam/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <thread>

namespace thetalam {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol ||
      (m - a) <= 1e-13 * (std::abs(a) + std::abs(b) + 1e-3)) {
    return left + right + delta / 15.0;
  }
  // Keep the per-branch tolerance above the rounding floor of the partial
  // sums, otherwise noise forces a full binary-tree recursion.
  const double floor_tol = 1e-17 * (std::abs(left) + std::abs(right)) + 1e-300;
  const double child_tol = std::max(0.5 * tol, floor_tol);
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, child_tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, child_tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::invalid_argument("bisect: no sign change in bracket");
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double newton_in_bracket(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double lo,
                         double hi, double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::invalid_argument("newton_in_bracket: no sign change");
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < max_iter; ++i) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (flo * fx < 0.0) {
      hi = x;
    } else {
      lo = x;
      flo = fx;
    }
    const double d = df(x);
    double xn = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= xtol) return xn;
    x = xn;
  }
  return x;
}

std::vector<OdeSample> integrate_ode(
    const std::function<void(double, const double*, double*)>& f, int dim,
    double x0, const std::vector<double>& y0, double x1, const OdeOptions& opt,
    const std::function<bool(double, const double*)>& stop) {
  // Dormand-Prince RK5(4)7M coefficients.
  static const double a21 = 1.0 / 5.0;
  static const double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static const double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static const double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                      a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static const double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                      a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                      a65 = -5103.0 / 18656.0;
  static const double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                      b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static const double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                      e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  if (x1 <= x0) throw std::invalid_argument("integrate_ode: x1 must exceed x0");
  std::vector<OdeSample> out;
  std::vector<double> y = y0, k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim),
      k7(dim), yt(dim), y5(dim);
  double x = x0;
  double h = std::min(opt.initial_step, x1 - x0);
  out.push_back({x, y});
  f(x, y.data(), k1.data());
  for (int step = 0; step < opt.max_steps && x < x1; ++step) {
    h = std::min(h, std::min(opt.max_step, x1 - x));
    for (int i = 0; i < dim; ++i) yt[i] = y[i] + h * a21 * k1[i];
    f(x + h / 5.0, yt.data(), k2.data());
    for (int i = 0; i < dim; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(x + 3.0 * h / 10.0, yt.data(), k3.data());
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(x + 4.0 * h / 5.0, yt.data(), k4.data());
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(x + 8.0 * h / 9.0, yt.data(), k5.data());
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                          a65 * k5[i]);
    f(x + h, yt.data(), k6.data());
    for (int i = 0; i < dim; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(x + h, y5.data(), k7.data());

    double err = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
      const double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(ei) / scale);
    }
    if (err <= 1.0) {
      x += h;
      y = y5;
      k1 = k7;  // FSAL
      out.push_back({x, y});
      if (stop && stop(x, y.data())) break;
    }
    const double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < 1e-15 * std::max(1.0, std::abs(x)))
      throw std::runtime_error("integrate_ode: step size underflow");
  }
  return out;
}

double HermiteCurve::value(double xq) const {
  if (x.empty()) throw std::runtime_error("HermiteCurve: empty");
  if (xq <= x.front()) return y.front() + m.front() * (xq - x.front());
  if (xq >= x.back()) return y.back() + m.back() * (xq - x.back());
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double hseg = x[i + 1] - x[i];
  const double t = (xq - x[i]) / hseg;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y[i] + h10 * hseg * m[i] + h01 * y[i + 1] + h11 * hseg * m[i + 1];
}

double HermiteCurve::slope(double xq) const {
  if (x.empty()) throw std::runtime_error("HermiteCurve: empty");
  if (xq <= x.front()) return m.front();
  if (xq >= x.back()) return m.back();
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double hseg = x[i + 1] - x[i];
  const double t = (xq - x[i]) / hseg;
  const double dh00 = (6 * t * t - 6 * t) / hseg, dh10 = 3 * t * t - 4 * t + 1;
  const double dh01 = (-6 * t * t + 6 * t) / hseg, dh11 = 3 * t * t - 2 * t;
  return dh00 * y[i] + dh10 * m[i] + dh01 * y[i + 1] + dh11 * m[i + 1];
}

double polyline_length(const std::vector<Vec2>& p) {
  double len = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i)
    len += std::hypot(p[i].x - p[i - 1].x, p[i].y - p[i - 1].y);
  return len;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

namespace {
double directed_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    if (b.size() == 1) best = std::hypot(p.x - b[0].x, p.y - b[0].y);
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      best = std::min(best, point_segment_distance(p, b[i], b[i + 1]));
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<Vec2> resample(const std::vector<Vec2>& p, double ds) {
  std::vector<Vec2> out;
  if (p.empty()) return out;
  out.push_back(p.front());
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double seg = std::hypot(p[i + 1].x - p[i].x, p[i + 1].y - p[i].y);
    const int n = std::max(1, static_cast<int>(std::ceil(seg / ds)));
    for (int k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      out.push_back({p[i].x + t * (p[i + 1].x - p[i].x), p[i].y + t * (p[i + 1].y - p[i].y)});
    }
  }
  return out;
}
}  // namespace

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("hausdorff_distance: empty polyline");
  const double la = polyline_length(a), lb = polyline_length(b);
  const double ds = std::max(1e-6, 0.002 * std::max(la, lb));
  const auto ra = resample(a, ds), rb = resample(b, ds);
  return std::max(directed_hausdorff(ra, b), directed_hausdorff(rb, a));
}

std::uint64_t SplitMix64::next_u64() {
  state_ += 0x9E3779B97f4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Round-trip check with fewer digits keeps files tidy where exact.
  for (int prec = 1; prec <= 16; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;  // avoid "-0.000000"
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int effective_thread_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("THETALAM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  const int threads = effective_thread_count();
  if (threads <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace thetalam
