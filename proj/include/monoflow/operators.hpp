#pragma once

#include <optional>
#include <string>
#include <vector>

#include "monoflow/convex_function.hpp"
#include "monoflow/convex_set.hpp"
#include "monoflow/ext_real.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

struct GraphPair {
  Vec y, v;  // v in M(y)
};

struct ResolventInfo {
  Vec x;
  double residual = 0.0;  // inner-solver residual; 0 for direct evaluations
  long iterations = 0;
};

// Maximal monotone operator with a resolvent oracle.  Forward evaluation and
// closed-form graph-gap values exist only where the structure provides them.
class MonotoneOperator {
 public:
  virtual ~MonotoneOperator() = default;

  virtual int dim() const = 0;
  // J_{lambda M}(y) = (I + lambda M)^{-1} y, lambda > 0.
  virtual Vec resolvent(double lambda, const Vec& y) const {
    return resolvent_info(lambda, y).x;
  }
  virtual ResolventInfo resolvent_info(double lambda, const Vec& y) const = 0;
  virtual std::string describe() const = 0;

  virtual bool has_forward() const { return false; }
  virtual Vec forward(const Vec& x) const;        // throws NoEvaluator
  virtual double forward_lipschitz() const { return 0.0; }

  // Exact graph-gap value G_M(x,u) = sup_{(y,v) in gph M} <x-y, v-u>,
  // when a closed form exists.
  virtual bool has_exact_gap() const { return false; }
  virtual ExtReal exact_gap(const Vec& x, const Vec& u) const;  // throws NoEvaluator

  // Scaled-identity coefficient c when M = c*I (enables exact sum algebra).
  virtual std::optional<double> as_scaled_identity() const { return std::nullopt; }
  // Underlying function when M is a subdifferential.
  virtual const ConvexFunction* as_subdifferential() const { return nullptr; }
  // Hint that dom M is not all of the space ("all" otherwise).
  virtual std::string domain_tag() const { return "all"; }
  // Construction-time warnings (e.g. possibly non-maximal sums).
  virtual const std::vector<std::string>& warnings() const {
    static const std::vector<std::string> none;
    return none;
  }
};

OpPtr op_zero(int dim);
OpPtr op_scaled_identity(int dim, double c = 1.0);
OpPtr op_linear(Mat A, Vec offset = Vec());  // x -> Ax + offset, monotone A
OpPtr op_rotation2d();                       // x -> Jx, J = [[0,-1],[1,0]]
OpPtr op_normal_cone(SetPtr C);
OpPtr op_subdifferential(FunPtr f);
OpPtr scale_operator(OpPtr M, double factor);
OpPtr shift_operator(OpPtr M, Vec offset);  // x -> M(x) + offset

struct SumOptions {
  double inner_tol = 1e-10;
  long max_inner_iters = 10000;
};
// wA*A + wB*B with an inner solver for the resolvent: exact algebra when a
// summand is a scaled identity, forward-backward fixed point when one
// summand is Lipschitz single-valued, Douglas-Rachford otherwise.
OpPtr sum_operator(OpPtr A, OpPtr B, double wA = 1.0, double wB = 1.0,
                   SumOptions opts = {});

}  // namespace monoflow
