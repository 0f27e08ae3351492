#pragma once

#include <string>

#include "monoflow/convex_function.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

// Uniform vertex grid on [0, 1] with trapezoid quadrature weights.
struct PdeGrid {
  int N = 0;   // number of intervals; N + 1 vertex nodes
  double dx = 0.0;
  Vec x;       // node positions i/N
  Vec w;       // trapezoid weights: dx/2 at the ends, dx inside
};

PdeGrid pde_grid(int N);

// Discrete Neumann problem on [0,1]:
//   minimize (1/2) u'Ku - (Wh)'u   over mean-zero u,
// with K the mirrored-ghost finite-difference stiffness matrix (tridiagonal)
// and W = diag(w).  u_hat is the mean-zero solution of K u = W h.
struct PdeProblem {
  PdeGrid grid;
  double a = 0.0, b = 0.0;  // obstacle band a < b
  Vec h;                    // forcing samples, weighted-demeaned
  Vec k_diag, k_off;        // stiffness diagonals
  Vec u_hat;
  double mean_removed = 0.0;
};

// Validates inputs, demeans h (weighted mean beyond 1e-10 is rejected), and
// solves for u_hat.  h_samples must have N+1 entries.
PdeProblem pde_problem(int N, double a, double b, const Vec& h_samples);

Vec pde_cosine_forcing(const PdeGrid& grid, double c);  // c * cos(pi x_i)

// Quadrature-weighted helpers.
double pde_l2_norm(const PdeProblem& p, const Vec& u);
double pde_l2_distance(const PdeProblem& p, const Vec& u, const Vec& v);
double pde_mean(const PdeProblem& p, const Vec& u);
double pde_stiffness_quadratic(const PdeProblem& p, const Vec& d);  // d'Kd
// (1/2) u'Ku - (Wh)'u
double pde_dirichlet_value(const PdeProblem& p, const Vec& u);

// The flow runs in v = W^(1/2) u coordinates, where the weighted L2 inner
// product is Euclidean and both potentials keep fast prox oracles.
Vec pde_to_v(const PdeProblem& p, const Vec& u);
Vec pde_to_u(const PdeProblem& p, const Vec& v);
FunPtr pde_dirichlet_energy_v(const PdeProblem& p);  // tridiagonal quadratic
FunPtr pde_obstacle_penalty_v(const PdeProblem& p);  // separable prox

// Quadrature value of integral([u_hat + m - b]_+ - [a - m - u_hat]_+); strictly
// increasing in m, its root selects the limit when the spread exceeds b - a.
double pde_theta(const PdeProblem& p, double m);

enum class PdeCase { spread_exceeds, fits_within, boundary };

struct PdeClassification {
  PdeCase kind = PdeCase::fits_within;
  double spread = 0.0;      // sup u_hat - inf u_hat
  double m_star = 0.0;      // root of theta (spread_exceeds / boundary)
  double m_lo = 0.0, m_hi = 0.0;  // feasible shifts (fits_within / boundary)
  std::string note;
};

// Compares the spread of u_hat against b - a with a 1e-8 guard band; the
// boundary case carries both the root and the (degenerate) shift interval.
PdeClassification pde_classify(const PdeProblem& p);

// Weighted L2 distance from u to the segment {u_hat + m : m in [m_lo, m_hi]}.
double pde_segment_distance(const PdeProblem& p, const Vec& u, double m_lo,
                            double m_hi);

}  // namespace monoflow
