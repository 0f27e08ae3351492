#pragma once

#include <optional>
#include <vector>

#include "monoflow/convex_function.hpp"
#include "monoflow/convex_set.hpp"
#include "monoflow/ext_real.hpp"

namespace monoflow {

struct OmegaOptions {
  double tol = 1e-9;            // residual target
  long max_iters = 500000;
  double unbounded_norm = 1e8;  // iterate norm declaring the value -inf
  SetPtr start_set;             // x0 = proj(0) onto this set; default x0 = 0
};

struct OmegaResult {
  double epsilon = 0.0;
  ExtReal primal_value;                 // -inf when unboundedness detected
  std::optional<double> dual_value;
  std::optional<Vec> minimizer;
  std::optional<Vec> dual_multiplier;
  std::optional<double> gap;            // |primal + dual| when both present
  double residual = 0.0;
  long iterations = 0;
};

// omega(eps) = inf(Psi + eps*Phi), minimized by proximal gradient with
// backtracking when Phi is smooth, Douglas-Rachford otherwise.
OmegaResult omega_primal(const FunPtr& Psi, const FunPtr& Phi, double eps,
                         const OmegaOptions& opts = {});

// |omega(eps)| = min_p { Psi*(eps p) + eps Phi*(-p) }, minimized by
// Douglas-Rachford; the proxes of the conjugates come from Moreau identities
// on the primal proxes, the values from the analytic conjugate oracles.
OmegaResult omega_dual(const FunPtr& Psi, const FunPtr& Phi, double eps,
                       const OmegaOptions& opts = {});

// ((a r)^(1-r*)/r*) (eps*p_norm)^{r*} with r* = r/(r-1): conjugate of the
// growth modulus theta(t) = a t^r, bounding Psi*(eps p) - sigma_C(eps p).
double theta_conjugate_bound(double a, double r, double eps, double p_norm);

// (eps^2/2) * min{ |w|^2 : L'w = p }, +inf when p is off range(L').
ExtReal quadratic_operator_bound(const Mat& L, double eps, const Vec& p);

// d(eps p, K) - d(eps p, T_K(0)) for K containing 0; nonnegative since
// K is contained in its tangent cone at 0.  rho_budget reserved.
double hausdorff_bound(const ConvexSet& K, double eps, const Vec& p,
                       long rho_budget = 0);

// omega(eps)/eps along a decreasing positive grid.
std::vector<double> asymptotic_slope(const FunPtr& Psi, const FunPtr& Phi,
                                     const std::vector<double>& eps_grid,
                                     const OmegaOptions& opts = {});

struct NormalizationReport {
  double psi_offset = 0.0;  // inf Psi (should be 0)
  double phi_offset = 0.0;  // inf_C Phi (should be 0)
  bool normalized = false;
};
NormalizationReport check_normalization(const FunPtr& Psi, const FunPtr& Phi,
                                        const SetPtr& C,
                                        const OmegaOptions& opts = {});

}  // namespace monoflow
