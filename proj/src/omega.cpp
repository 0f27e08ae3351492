#include "monoflow/omega.hpp"

#include <cmath>

#include "monoflow/errors.hpp"

namespace monoflow {

namespace {

ExtReal objective(const ConvexFunction& Psi, const ConvexFunction& Phi, double eps,
                  const Vec& x) {
  ExtReal v = Psi.value(x);
  if (eps > 0.0) v += eps * Phi.value(x);
  return v;
}

OmegaResult unbounded_result(double eps, double residual, long iters) {
  OmegaResult r;
  r.epsilon = eps;
  r.primal_value = ExtReal::neg_inf();
  r.residual = residual;
  r.iterations = iters;
  return r;
}

}  // namespace

OmegaResult omega_primal(const FunPtr& Psi, const FunPtr& Phi, double eps,
                         const OmegaOptions& opts) {
  if (eps < 0) throw ConfigError("omega: epsilon must be nonnegative");
  if (Psi->dim() != Phi->dim()) throw ConfigError("omega: dimension mismatch");
  int d = Psi->dim();
  Vec x = opts.start_set ? opts.start_set->project(Vec::Zero(d)) : Vec::Zero(d);

  OmegaResult res;
  res.epsilon = eps;

  if (eps == 0.0 || Phi->has_gradient()) {
    // proximal gradient with backtracking on the smooth part eps*Phi
    double L = eps > 0.0 ? eps * Phi->gradient_lipschitz() : 0.0;
    double lam = L > 0.0 ? 1.0 / L : 1.0;
    for (long k = 0; k < opts.max_iters; ++k) {
      Vec g = eps > 0.0 ? Vec(eps * Phi->gradient(x)) : Vec(Vec::Zero(d));
      double fx = eps > 0.0 ? eps * Phi->value(x).finite_value() : 0.0;
      Vec xn;
      for (int bt = 0;; ++bt) {
        xn = Psi->prox(lam, x - lam * g);
        if (eps == 0.0) break;
        double fn = eps * Phi->value(xn).finite_value();
        double quad = fx + g.dot(xn - x) + (xn - x).squaredNorm() / (2.0 * lam);
        if (fn <= quad + 1e-15 * (1.0 + std::abs(fn))) break;
        if (bt >= 60) throw NonConvergence("omega_primal: backtracking stalled");
        lam *= 0.5;
      }
      double r = (xn - x).norm() / lam;
      x = std::move(xn);
      res.iterations = k + 1;
      res.residual = r;
      if (x.norm() > opts.unbounded_norm)
        return unbounded_result(eps, r, res.iterations);
      if (r <= opts.tol) break;
      if (k + 1 == opts.max_iters)
        throw NonConvergence("omega_primal: proximal gradient did not converge");
    }
    res.primal_value = objective(*Psi, *Phi, eps, x);
    res.minimizer = x;
    return res;
  }

  // Douglas-Rachford on (Psi, eps*Phi)
  Vec s = x, a = x, b = x;
  for (long k = 0; k < opts.max_iters; ++k) {
    a = Psi->prox(1.0, s);
    b = Phi->prox(eps, 2.0 * a - s);
    double r = (a - b).norm();
    s += b - a;
    res.iterations = k + 1;
    res.residual = r;
    if (a.norm() > opts.unbounded_norm)
      return unbounded_result(eps, r, res.iterations);
    if (r <= opts.tol) break;
    if (k + 1 == opts.max_iters)
      throw NonConvergence("omega_primal: Douglas-Rachford did not converge");
  }
  ExtReal va = objective(*Psi, *Phi, eps, a);
  ExtReal vb = objective(*Psi, *Phi, eps, b);
  if (vb < va) {
    res.primal_value = vb;
    res.minimizer = b;
  } else {
    res.primal_value = va;
    res.minimizer = a;
  }
  return res;
}

OmegaResult omega_dual(const FunPtr& Psi, const FunPtr& Phi, double eps,
                       const OmegaOptions& opts) {
  if (eps < 0) throw ConfigError("omega: epsilon must be nonnegative");
  if (!Psi->has_conjugate() || !Phi->has_conjugate())
    throw NoConjugate("omega_dual: both conjugate oracles are required");
  int d = Psi->dim();

  OmegaResult res;
  res.epsilon = eps;

  auto dual_objective = [&](const Vec& p) -> ExtReal {
    return Psi->conjugate(eps * p) + eps * Phi->conjugate(-p);
  };

  if (eps == 0.0) {
    res.dual_value = 0.0;  // Psi*(0) = -inf Psi = 0 for normalized Psi
    res.dual_multiplier = Vec::Zero(d);
  } else {
    // Moreau: prox_{nu f*}(z) = z - nu * prox_{f/nu}(z/nu)
    double nu1 = eps * eps;
    auto proxF1 = [&](const Vec& w) {  // F1(p) = Psi*(eps p)
      Vec z = eps * w;
      Vec m = z - nu1 * Psi->prox(1.0 / nu1, z / nu1);
      return Vec(m / eps);
    };
    auto proxF2 = [&](const Vec& w) {  // F2(p) = eps*Phi*(-p)
      Vec z = -w;
      Vec r = z - eps * Phi->prox(1.0 / eps, z / eps);
      return Vec(-r);
    };
    Vec s = Vec::Zero(d), a = s, b = s;
    for (long k = 0; k < opts.max_iters; ++k) {
      a = proxF1(s);
      b = proxF2(2.0 * a - s);
      double r = (a - b).norm();
      s += b - a;
      res.iterations = k + 1;
      res.residual = r;
      if (r <= opts.tol) break;
      if (k + 1 == opts.max_iters)
        throw NonConvergence("omega_dual: Douglas-Rachford did not converge");
    }
    ExtReal va = dual_objective(a), vb = dual_objective(b);
    if (!va.finite() && !vb.finite())
      throw NonConvergence("omega_dual: dual objective infinite at both shadow points");
    if (!vb.finite() || (va.finite() && va < vb)) {
      res.dual_value = va.finite_value();
      res.dual_multiplier = a;
    } else {
      res.dual_value = vb.finite_value();
      res.dual_multiplier = b;
    }
  }

  OmegaResult primal = omega_primal(Psi, Phi, eps, opts);
  res.primal_value = primal.primal_value;
  res.minimizer = primal.minimizer;
  if (res.primal_value.finite())
    res.gap = std::abs(res.primal_value.finite_value() + *res.dual_value);
  return res;
}

double theta_conjugate_bound(double a, double r, double eps, double p_norm) {
  if (a <= 0 || r <= 1) throw ConfigError("theta_conjugate_bound: needs a > 0, r > 1");
  if (eps < 0 || p_norm < 0) throw ConfigError("theta_conjugate_bound: negative input");
  double rstar = r / (r - 1.0);
  return std::pow(a * r, 1.0 - rstar) / rstar * std::pow(eps * p_norm, rstar);
}

ExtReal quadratic_operator_bound(const Mat& L, double eps, const Vec& p) {
  if (L.cols() != p.size()) throw ConfigError("quadratic_operator_bound: dimension");
  Mat Lt = L.transpose();
  Vec w = Lt.completeOrthogonalDecomposition().solve(p);
  if ((Lt * w - p).norm() > 1e-9 * (1.0 + p.norm())) return ExtReal::pos_inf();
  return 0.5 * eps * eps * w.squaredNorm();
}

double hausdorff_bound(const ConvexSet& K, double eps, const Vec& p, long) {
  Vec zero = Vec::Zero(K.dim());
  if (!K.contains(zero)) throw ConfigError("hausdorff_bound: K must contain 0");
  Vec q = eps * p;
  double dK = K.distance(q);
  double dT = K.tangent_cone(zero)->distance(q);
  return std::max(dK - dT, 0.0);
}

std::vector<double> asymptotic_slope(const FunPtr& Psi, const FunPtr& Phi,
                                     const std::vector<double>& eps_grid,
                                     const OmegaOptions& opts) {
  std::vector<double> out;
  out.reserve(eps_grid.size());
  for (double e : eps_grid) {
    if (e <= 0) throw ConfigError("asymptotic_slope: grid must be positive");
    ExtReal v = omega_primal(Psi, Phi, e, opts).primal_value;
    if (!v.finite())
      throw NonConvergence("asymptotic_slope: omega not finite on the grid");
    out.push_back(v.finite_value() / e);
  }
  return out;
}

NormalizationReport check_normalization(const FunPtr& Psi, const FunPtr& Phi,
                                        const SetPtr& C, const OmegaOptions& opts) {
  NormalizationReport rep;
  FunPtr zero = fn_affine(Vec::Zero(Psi->dim()), 0.0);
  rep.psi_offset = omega_primal(Psi, zero, 0.0, opts).primal_value.as_double();
  rep.phi_offset =
      omega_primal(fn_indicator(C), Phi, 1.0, opts).primal_value.as_double();
  rep.normalized =
      std::abs(rep.psi_offset) <= 1e-6 && std::abs(rep.phi_offset) <= 1e-6;
  return rep;
}

}  // namespace monoflow
