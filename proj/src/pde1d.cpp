#include "monoflow/pde1d.hpp"

#include <cmath>

#include "monoflow/errors.hpp"
#include "monoflow/linalg.hpp"

namespace monoflow {

PdeGrid pde_grid(int N) {
  if (N < 2) throw ConfigError("pde_grid: need at least 2 intervals");
  PdeGrid g;
  g.N = N;
  g.dx = 1.0 / N;
  g.x = Vec(N + 1);
  g.w = Vec(N + 1);
  for (int i = 0; i <= N; ++i) {
    g.x[i] = static_cast<double>(i) / N;
    g.w[i] = (i == 0 || i == N) ? g.dx / 2.0 : g.dx;
  }
  return g;
}

PdeProblem pde_problem(int N, double a, double b, const Vec& h_samples) {
  if (!(a < b)) throw ConfigError("pde_problem: obstacle band needs a < b");
  PdeProblem p;
  p.grid = pde_grid(N);
  if (h_samples.size() != N + 1)
    throw ConfigError("pde_problem: forcing needs one sample per node");
  p.a = a;
  p.b = b;

  double mass = p.grid.w.sum();
  double mean = p.grid.w.dot(h_samples) / mass;
  if (std::abs(mean) > 1e-10)
    throw NonZeroMeanForcing(
        "pde_problem: forcing must have zero mean (weighted mean " +
        std::to_string(mean) + ")");
  p.mean_removed = mean;
  p.h = (h_samples.array() - mean).matrix();

  const int n = N + 1;
  p.k_diag = Vec::Constant(n, 2.0 / p.grid.dx);
  p.k_diag[0] = p.k_diag[n - 1] = 1.0 / p.grid.dx;
  p.k_off = Vec::Constant(n - 1, -1.0 / p.grid.dx);

  // K is singular with kernel = constants; ground the last node (the reduced
  // tridiagonal block is SPD), then restore the zero-mean representative.
  Vec rhs = (p.grid.w.array() * p.h.array()).matrix().head(n - 1);
  Vec diag_red = p.k_diag.head(n - 1);
  Vec off_red = p.k_off.head(n - 2);
  Vec u_red = solve_tridiag(off_red, diag_red, off_red, rhs);
  p.u_hat = Vec::Zero(n);
  p.u_hat.head(n - 1) = u_red;
  p.u_hat.array() -= p.grid.w.dot(p.u_hat) / mass;
  return p;
}

Vec pde_cosine_forcing(const PdeGrid& grid, double c) {
  Vec h(grid.N + 1);
  for (int i = 0; i <= grid.N; ++i) h[i] = c * std::cos(M_PI * grid.x[i]);
  return h;
}

double pde_l2_norm(const PdeProblem& p, const Vec& u) {
  return std::sqrt((p.grid.w.array() * u.array().square()).sum());
}

double pde_l2_distance(const PdeProblem& p, const Vec& u, const Vec& v) {
  return pde_l2_norm(p, u - v);
}

double pde_mean(const PdeProblem& p, const Vec& u) {
  return p.grid.w.dot(u) / p.grid.w.sum();
}

double pde_stiffness_quadratic(const PdeProblem& p, const Vec& d) {
  const int n = static_cast<int>(d.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += p.k_diag[i] * d[i] * d[i];
    if (i + 1 < n) s += 2.0 * p.k_off[i] * d[i] * d[i + 1];
  }
  return s;
}

double pde_dirichlet_value(const PdeProblem& p, const Vec& u) {
  return 0.5 * pde_stiffness_quadratic(p, u) -
         (p.grid.w.array() * p.h.array() * u.array()).sum();
}

Vec pde_to_v(const PdeProblem& p, const Vec& u) {
  return (p.grid.w.array().sqrt() * u.array()).matrix();
}

Vec pde_to_u(const PdeProblem& p, const Vec& v) {
  return (v.array() / p.grid.w.array().sqrt()).matrix();
}

FunPtr pde_dirichlet_energy_v(const PdeProblem& p) {
  const int n = p.grid.N + 1;
  Vec sw = p.grid.w.array().sqrt();
  Vec diag(n), off(n - 1), q(n);
  for (int i = 0; i < n; ++i) {
    diag[i] = p.k_diag[i] / p.grid.w[i];
    q[i] = -sw[i] * p.h[i];
    if (i + 1 < n) off[i] = p.k_off[i] / (sw[i] * sw[i + 1]);
  }
  // normalize so the minimum value is 0 (attained on u_hat + constants)
  return fn_tridiag_quadratic(diag, off, q, -pde_dirichlet_value(p, p.u_hat));
}

FunPtr pde_obstacle_penalty_v(const PdeProblem& p) {
  return fn_obstacle_penalty(p.a, p.b, p.grid.w);
}

double pde_theta(const PdeProblem& p, double m) {
  double s = 0.0;
  for (int i = 0; i <= p.grid.N; ++i) {
    double over = p.u_hat[i] + m - p.b;
    double under = p.a - m - p.u_hat[i];
    s += p.grid.w[i] * ((over > 0 ? over : 0.0) - (under > 0 ? under : 0.0));
  }
  return s;
}

PdeClassification pde_classify(const PdeProblem& p) {
  PdeClassification c;
  double lo_val = p.u_hat.minCoeff(), hi_val = p.u_hat.maxCoeff();
  c.spread = hi_val - lo_val;
  const double gap = p.b - p.a;
  const double guard = 1e-8;

  auto bisect_root = [&]() {
    double lo = p.a - hi_val, hi = p.b - lo_val;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi));
         ++it) {
      double mid = 0.5 * (lo + hi);
      (pde_theta(p, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  if (c.spread > gap + guard) {
    c.kind = PdeCase::spread_exceeds;
    c.m_star = bisect_root();
    c.note = "spread exceeds the band width; unique shifted limit";
  } else if (c.spread < gap - guard) {
    c.kind = PdeCase::fits_within;
    c.m_lo = p.a - lo_val;
    c.m_hi = p.b - hi_val;
    c.note = "spread fits inside the band; limit lies on a shift segment";
  } else {
    c.kind = PdeCase::boundary;
    c.m_star = bisect_root();
    c.m_lo = p.a - lo_val;
    c.m_hi = p.b - hi_val;
    c.note = "boundary — both analyses attached";
  }
  return c;
}

double pde_segment_distance(const PdeProblem& p, const Vec& u, double m_lo,
                            double m_hi) {
  if (m_hi < m_lo) std::swap(m_lo, m_hi);
  double m = pde_mean(p, u - p.u_hat);
  m = std::min(std::max(m, m_lo), m_hi);
  Vec target = (p.u_hat.array() + m).matrix();
  return pde_l2_distance(p, u, target);
}

}  // namespace monoflow
