#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

// Small numeric toolkit: derivative-free 1-d maximization, bisection,
// per-cell Simpson quadrature, and a deterministic parallel map.

namespace certmenu::num {

struct MaxResult {
  double x;
  double value;
};

// Golden-section maximization on [lo, hi].  Stops when the bracket is
// narrower than xtol (absolute in x).
template <class F>
MaxResult golden_max(F&& f, double lo, double hi, double xtol,
                     int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

// Golden-section maximization in log(x) space on [lo, hi], 0 < lo < hi.
// Stops when the bracket is narrower than xtol absolutely in x, or narrower
// than rel_floor relatively (whichever comes first).  The relative floor
// keeps tiny maximizers (x << xtol) accurate to full precision.
template <class F>
MaxResult golden_max_log(F&& f, double lo, double hi, double xtol,
                         double rel_floor = 1e-13, int max_iter = 220) {
  constexpr double invphi = 0.6180339887498949;
  double a = std::log(lo), b = std::log(hi);
  auto g = [&](double t) { return f(std::exp(t)); };
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < max_iter; ++it) {
    double wa = std::exp(a), wb = std::exp(b);
    if (wb - wa <= xtol || (b - a) <= rel_floor) break;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = g(x1);
    }
  }
  double xm = std::exp(0.5 * (a + b));
  return {xm, f(xm)};
}

// Bisection for the smallest root of a nondecreasing g with g(lo) < 0 <= g(hi).
// Returns hi if g(lo) >= 0 is violated at both ends, callers pre-check signs.
template <class F>
double bisect_root(F&& g, double lo, double hi, double tol, int max_iter = 200) {
  double glo = g(lo);
  if (glo >= 0.0) return lo;
  if (g(hi) < 0.0) return hi;
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson over the cells of a sorted node vector, evaluating f at
// cell midpoints.  Exact for cubics within each cell.
template <class F>
double integrate_cells(F&& f, const std::vector<double>& nodes) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double a = nodes[i], b = nodes[i + 1];
    double h = b - a;
    if (h <= 0.0) continue;
    total += h / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return total;
}

// Simpson on one cell [a, b] given endpoint and midpoint values.
inline double simpson_cell(double h, double fa, double fm, double fb) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double trapezoid(const std::vector<double>& x,
                        const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    total += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return total;
}

// Running integral of the piecewise-linear interpolant of (x, y).
inline std::vector<double> cumtrapz(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    out[i + 1] = out[i] + 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return out;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

// Geometric spacing from a to b (0 < a < b).
inline std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(
        la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

// Insert x into sorted xs unless an existing node is within tol of it.
inline void insert_sorted_unique(std::vector<double>& xs, double x,
                                 double tol) {
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it != xs.end() && std::abs(*it - x) <= tol) return;
  if (it != xs.begin() && std::abs(*(it - 1) - x) <= tol) return;
  xs.insert(it, x);
}

// Piecewise-linear interpolant over sorted xs (clamped at the ends).
inline double interp_linear(const std::vector<double>& xs,
                            const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

// Deterministic parallel map: body(i) for i in [0, n).  Each index owns its
// output slot, so scheduling never changes results.  Falls back to a serial
// loop when only one hardware thread is available.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = std::min<std::size_t>(hw == 0 ? 1 : hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace certmenu::num
