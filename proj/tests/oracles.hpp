#pragma once

// Brute-force reference computations the unit tests pin library results
// against.  Everything here is deliberately naive: dense grids, plain
// quadrature, direct enumeration.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <monoflow/types.hpp>

namespace oracle {

using monoflow::Vec;

// Iteratively refined 1D grid argmin of f over [lo, hi].
inline double argmin_1d(const std::function<double(double)>& f, double lo,
                        double hi, int rounds = 4, int n = 400) {
  double best_x = lo, best_v = std::numeric_limits<double>::infinity();
  for (int r = 0; r < rounds; ++r) {
    best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      double x = lo + (hi - lo) * i / n;
      double v = f(x);
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    double w = (hi - lo) / n;
    lo = best_x - 2 * w;
    hi = best_x + 2 * w;
  }
  return best_x;
}

// Iteratively refined 2D grid argmin of f over [lo, hi]^2 boxes.
inline Vec argmin_2d(const std::function<double(const Vec&)>& f, Vec lo, Vec hi,
                     int rounds = 4, int n = 120) {
  Vec best = lo;
  for (int r = 0; r < rounds; ++r) {
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        Vec x(2);
        x << lo[0] + (hi[0] - lo[0]) * i / n, lo[1] + (hi[1] - lo[1]) * j / n;
        double v = f(x);
        if (v < best_v) {
          best_v = v;
          best = x;
        }
      }
    Vec w = (hi - lo) / n;
    lo = best - 2 * w;
    hi = best + 2 * w;
  }
  return best;
}

// Composite Simpson quadrature (n even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 2000) {
  double h = (b - a) / n, acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// sup over an explicit list of graph points of <x - y, v - u>, clamped at 0.
inline double graph_sup(const std::vector<std::pair<Vec, Vec>>& graph,
                        const Vec& x, const Vec& u) {
  double best = 0.0;
  for (const auto& [y, v] : graph) best = std::max(best, (x - y).dot(v - u));
  return best;
}

}  // namespace oracle
