#include "monoflow/fitzpatrick.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "monoflow/errors.hpp"
#include "monoflow/rng.hpp"

namespace monoflow {

std::vector<GraphPair> sample_graph(const MonotoneOperator& M, long budget,
                                    double radius, double lambda,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GraphPair> pairs;
  pairs.reserve(budget);
  int d = M.dim();
  for (long k = 0; k < budget; ++k) {
    Vec y = uniform_in_ball(rng, d, radius);
    Vec dir = unit_direction(rng, d);
    Vec w = y + lambda * dir;
    Vec jy = M.resolvent(lambda, w);
    Vec v = (w - jy) / lambda;
    if (v.norm() <= radius) pairs.push_back({std::move(jy), std::move(v)});
  }
  return pairs;
}

BHEvaluation brezis_haraux(const MonotoneOperator& M, const Vec& x, const Vec& u,
                           long budget, const BHOptions& opts) {
  if (M.has_exact_gap()) return {M.exact_gap(x, u), BHEvaluation::Kind::exact, 0, {}};
  double radius = opts.radius > 0.0
                      ? opts.radius
                      : 10.0 * std::max({x.norm(), u.norm(), 1.0});
  auto pairs = sample_graph(M, budget, radius, opts.lambda, opts.seed);
  BHEvaluation e;
  e.kind = BHEvaluation::Kind::lower_bound;
  e.sample_count = budget;
  double best = 0.0;  // 0 is always a valid lower bound for maximal monotone M
  for (auto& gp : pairs) {
    double val = (x - gp.y).dot(gp.v - u);
    if (val > best) {
      best = val;
      e.witness = gp;
    }
  }
  e.value = best;
  return e;
}

BHEvaluation fitzpatrick(const MonotoneOperator& M, const Vec& x, const Vec& u,
                         long budget, const BHOptions& opts) {
  BHEvaluation e = brezis_haraux(M, x, u, budget, opts);
  e.value += x.dot(u);
  return e;
}

double penalty_p(const MonotoneOperator& M, const Vec& x, const Vec& u) {
  return (x - M.resolvent(1.0, x + u)).squaredNorm();
}

ExtReal bh_subdifferential_upper(const ConvexFunction& f, const Vec& z, const Vec& u) {
  return f.value(z) + f.conjugate(u) - ExtReal(z.dot(u));
}

ExtReal bh_linear_selfadjoint(const Mat& A, const Vec& x, const Vec& u) {
  double scale = std::max(1.0, A.norm());
  if ((A - A.transpose()).norm() > 1e-12 * scale)
    throw ConfigError("bh_linear_selfadjoint: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  const Vec& ev = es.eigenvalues();
  double emax = std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < -1e-10 * std::max(1.0, emax))
    throw ConfigError("bh_linear_selfadjoint: matrix must be PSD");
  Vec m = 0.5 * (u + A * x);
  Vec mc = es.eigenvectors().transpose() * m;
  double cut = 1e-10 * std::max(1.0, emax);
  double acc = 0.0;
  for (long i = 0; i < mc.size(); ++i) {
    if (ev[i] > cut)
      acc += mc[i] * mc[i] / ev[i];
    else if (std::abs(mc[i]) > 1e-10 * (1.0 + m.norm()))
      return ExtReal::pos_inf();  // (u + Ax)/2 off range(A)
  }
  return acc - x.dot(u);  // F - <x,u> with F = 2 q_A^*(m)
}

ExtReal bh_sum_upper(const MonotoneOperator& A, const MonotoneOperator& B,
                     const Vec& z, const Vec& p, const Vec& q) {
  if (!A.has_exact_gap() || !B.has_exact_gap())
    throw NoEvaluator("bh_sum_upper needs exact gap evaluators on both operands");
  return A.exact_gap(z, q) + B.exact_gap(z, p - q);
}

double resolvent_gap(const MonotoneOperator& At, const MonotoneOperator& Ainf,
                     const Vec& y) {
  return (At.resolvent(1.0, y) - Ainf.resolvent(1.0, y)).squaredNorm();
}

}  // namespace monoflow
