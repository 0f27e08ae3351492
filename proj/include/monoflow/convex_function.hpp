#pragma once

#include <string>

#include "monoflow/convex_set.hpp"
#include "monoflow/ext_real.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

// Description of a quadratic form (1/2)x'Qx + q'x + c, exposed so operator
// factories can specialize without downcasting to concrete classes.
struct QuadraticForm {
  Mat Q;
  Vec q;
  double c = 0.0;
};

// Proper closed convex function with a prox oracle.  Gradients and
// conjugates exist only where closed forms do; defaults throw.
class ConvexFunction {
 public:
  virtual ~ConvexFunction() = default;

  virtual int dim() const = 0;
  virtual ExtReal value(const Vec& x) const = 0;
  // prox_{lambda f}(y) = argmin_x f(x) + |x - y|^2 / (2 lambda), lambda > 0
  virtual Vec prox(double lambda, const Vec& y) const = 0;
  virtual std::string describe() const = 0;

  virtual bool has_gradient() const { return false; }
  virtual Vec gradient(const Vec& x) const;  // throws NoEvaluator
  // Lipschitz constant of the gradient when has_gradient(); 0 is legitimate
  // (affine).  Meaningless otherwise.
  virtual double gradient_lipschitz() const { return 0.0; }

  virtual bool has_conjugate() const { return false; }
  virtual ExtReal conjugate(const Vec& p) const;  // throws NoConjugate

  // Structural hooks for operator dispatch.
  virtual const QuadraticForm* as_quadratic() const { return nullptr; }
  virtual SetPtr as_indicator_set() const { return nullptr; }
};

FunPtr fn_quadratic(Mat Q, Vec q, double c = 0.0);
FunPtr fn_norm_sq(int dim);                   // (1/2)|x|^2
FunPtr fn_affine(Vec c, double b = 0.0);      // <c,x> + b
FunPtr fn_indicator(SetPtr C);
FunPtr fn_support(SetPtr C);
FunPtr fn_dist_sq(SetPtr C, double factor = 0.5);  // factor * d^2(x, C)

// Quadratic in y with stiffness diverging at |x| = a:
//   f(x,y) = y^2 / (2(a^2 - x^2)) on |x| < a, closed at |x| = a by f = 0 iff y = 0.
FunPtr fn_channel_quadratic(double a);
// Linear descent in y with soft walls at |x| = b:
//   f(x,y) = y + (1/2)[x-b]_+^2 + (1/2)[x+b]_-^2.
FunPtr fn_channel_tilt(double b);

// (1/2)x'Kx + q'x + c with K tridiagonal (diag, off-diagonal bands).
FunPtr fn_tridiag_quadratic(Vec diag, Vec off, Vec q, double c = 0.0);
// Two-sided obstacle penalty in weighted coordinates:
//   f(v) = sum_i w_i * g(v_i / sqrt(w_i)),  g(u) = (1/2)[u-b]_+^2 + (1/2)[a-u]_+^2.
FunPtr fn_obstacle_penalty(double a, double b, Vec weights);

}  // namespace monoflow
