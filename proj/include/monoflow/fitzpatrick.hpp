#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "monoflow/operators.hpp"

namespace monoflow {

struct BHOptions {
  double radius = 0.0;   // sampling radius; 0 = auto (10x input norm)
  double lambda = 1.0;   // resolvent step used to generate graph points
  std::uint64_t seed = 0;
};

struct BHEvaluation {
  ExtReal value;
  enum class Kind { exact, lower_bound } kind = Kind::exact;
  long sample_count = 0;  // 0 for exact
  std::optional<GraphPair> witness;
};

// Graph-gap value G_M(x,u) = sup_{(y,v) in gph M} <x-y, v-u>: exact when the
// operator has a closed form, otherwise a sampled lower bound over `budget`
// resolvent-generated graph points with |v| <= radius.  The lower bound is
// clamped at 0, which is always valid for maximal monotone operators.
BHEvaluation brezis_haraux(const MonotoneOperator& M, const Vec& x, const Vec& u,
                           long budget = 4096, const BHOptions& opts = {});

// F_M(x,u) = G_M(x,u) + <x,u>.
BHEvaluation fitzpatrick(const MonotoneOperator& M, const Vec& x, const Vec& u,
                         long budget = 4096, const BHOptions& opts = {});

// P_M(x,u) = |x - (I+M)^{-1}(x+u)|^2; one resolvent call, and a lower bound
// for G_M everywhere.
double penalty_p(const MonotoneOperator& M, const Vec& x, const Vec& u);

// Fenchel upper bound f(z) + f*(u) - <z,u> >= G_{subdiff f}(z,u).
ExtReal bh_subdifferential_upper(const ConvexFunction& f, const Vec& z, const Vec& u);

// Exact G_A for symmetric PSD A via F_A(x,u) = 2 q_A^*((u + Ax)/2).
ExtReal bh_linear_selfadjoint(const Mat& A, const Vec& x, const Vec& u);

// Sum rule upper bound at a chosen splitting point: G_A(z,q) + G_B(z,p-q).
ExtReal bh_sum_upper(const MonotoneOperator& A, const MonotoneOperator& B,
                     const Vec& z, const Vec& p, const Vec& q);

// |J_{A_t}(y) - J_{A_inf}(y)|^2 at unit step.
double resolvent_gap(const MonotoneOperator& At, const MonotoneOperator& Ainf,
                     const Vec& y);

// The deterministic graph sampler behind the lower-bound path (exposed for
// property tests): draws y in ball(0,R), maps w = y + lambda*dir through the
// resolvent to (J w, (w - J w)/lambda), rejects |v| > R.  `budget` counts
// attempts, so accepted sets are nested as budget grows.
std::vector<GraphPair> sample_graph(const MonotoneOperator& M, long budget,
                                    double radius, double lambda = 1.0,
                                    std::uint64_t seed = 0);

}  // namespace monoflow
