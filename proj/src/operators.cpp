#include "monoflow/operators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

#include "monoflow/errors.hpp"

namespace monoflow {

Vec MonotoneOperator::forward(const Vec&) const {
  throw NoEvaluator("forward evaluation not available for " + describe());
}
ExtReal MonotoneOperator::exact_gap(const Vec&, const Vec&) const {
  throw NoEvaluator("no closed-form graph gap for " + describe());
}

// ------------------------------------------------------------ scaled identity

class ScaledIdentity final : public MonotoneOperator {
 public:
  ScaledIdentity(int dim, double c) : d_(dim), c_(c) {
    if (c < 0) throw ConfigError("scaled identity: coefficient must be >= 0");
  }
  int dim() const override { return d_; }
  ResolventInfo resolvent_info(double lambda, const Vec& y) const override {
    return {y / (1.0 + lambda * c_), 0.0, 0};
  }
  bool has_forward() const override { return true; }
  Vec forward(const Vec& x) const override { return c_ * x; }
  double forward_lipschitz() const override { return c_; }
  bool has_exact_gap() const override { return true; }
  ExtReal exact_gap(const Vec& x, const Vec& u) const override {
    if (c_ == 0.0) {
      // zero operator: gap is the indicator of {u = 0}
      return u.norm() <= 1e-12 * std::max(1.0, x.norm()) ? ExtReal(0.0)
                                                         : ExtReal::pos_inf();
    }
    return (u - c_ * x).squaredNorm() / (4.0 * c_);
  }
  std::optional<double> as_scaled_identity() const override { return c_; }
  std::string describe() const override {
    char b[48];
    std::snprintf(b, sizeof b, "%g*identity[R^%d]", c_, d_);
    return b;
  }

 private:
  int d_;
  double c_;
};

OpPtr op_zero(int dim) { return std::make_shared<ScaledIdentity>(dim, 0.0); }
OpPtr op_scaled_identity(int dim, double c) {
  return std::make_shared<ScaledIdentity>(dim, c);
}

// --------------------------------------------------------------------- linear

class LinearOp final : public MonotoneOperator {
 public:
  LinearOp(Mat A, Vec q) : A_(std::move(A)), q_(std::move(q)) {
    if (A_.rows() != A_.cols()) throw ConfigError("linear operator: matrix not square");
    if (q_.size() == 0) q_ = Vec::Zero(A_.rows());
    if (q_.size() != A_.rows()) throw ConfigError("linear operator: offset dimension");
    double scale = std::max(1.0, A_.norm());
    Mat S = 0.5 * (A_ + A_.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
      throw ConfigError("linear operator: not monotone (symmetric part indefinite)");
    symmetric_ = (A_ - A_.transpose()).norm() <= 1e-12 * scale;
    skew_ = (A_ + A_.transpose()).norm() <= 1e-12 * scale;
    if (symmetric_) {
      evals_ = es.eigenvalues();
      evecs_ = es.eigenvectors();
    }
    op_norm_ = A_.jacobiSvd().singularValues()[0];
  }

  int dim() const override { return static_cast<int>(A_.rows()); }

  ResolventInfo resolvent_info(double lambda, const Vec& y) const override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = inv_cache_.find(lambda);
    if (it == inv_cache_.end()) {
      Mat inv = (Mat::Identity(dim(), dim()) + lambda * A_).partialPivLu().inverse();
      // bounded cache: repeated step sizes hit it, sweeps of distinct step
      // sizes (time-varying weights) fall through to a fresh solve
      if (inv_cache_.size() >= 64) return {inv * (y - lambda * q_), 0.0, 0};
      it = inv_cache_.emplace(lambda, std::move(inv)).first;
    }
    return {it->second * (y - lambda * q_), 0.0, 0};
  }
  bool has_forward() const override { return true; }
  Vec forward(const Vec& x) const override { return A_ * x + q_; }
  double forward_lipschitz() const override { return op_norm_; }

  bool has_exact_gap() const override { return symmetric_ || skew_; }
  ExtReal exact_gap(const Vec& x, const Vec& u) const override {
    Vec u0 = u - q_;  // gap of x -> Ax + q at (x,u) equals gap of A at (x, u-q)
    double scale = 1.0 + x.norm() + u0.norm();
    if (skew_) {
      return (u0 - A_ * x).norm() <= 1e-10 * scale ? ExtReal(0.0) : ExtReal::pos_inf();
    }
    // symmetric PSD: F_A(x,u) = 2 q_A^*( (u + Ax)/2 ), G = F - <x,u>
    Vec m = 0.5 * (u0 + A_ * x);
    Vec mc = evecs_.transpose() * m;
    double emax = std::max(evals_.maxCoeff(), 0.0);
    double cut = 1e-10 * std::max(1.0, emax);
    double acc = 0.0;
    for (long i = 0; i < mc.size(); ++i) {
      if (evals_[i] > cut)
        acc += mc[i] * mc[i] / evals_[i];
      else if (std::abs(mc[i]) > 1e-10 * scale)
        return ExtReal::pos_inf();
    }
    return acc - x.dot(u0);
  }

  std::optional<double> as_scaled_identity() const override {
    if (q_.norm() != 0.0) return std::nullopt;
    double c = A_(0, 0);
    if (c < 0) return std::nullopt;
    if ((A_ - c * Mat::Identity(dim(), dim())).norm() <= 1e-14 * std::max(1.0, std::abs(c)))
      return c;
    return std::nullopt;
  }
  std::string describe() const override {
    char b[48];
    std::snprintf(b, sizeof b, "linear[R^%d]%s", dim(), skew_ ? " (skew)" : "");
    return b;
  }

 private:
  Mat A_;
  Vec q_;
  bool symmetric_ = false, skew_ = false;
  Vec evals_;
  Mat evecs_;
  double op_norm_ = 0.0;
  mutable std::mutex mu_;
  mutable std::map<double, Mat> inv_cache_;
};

OpPtr op_linear(Mat A, Vec offset) {
  return std::make_shared<LinearOp>(std::move(A), std::move(offset));
}

OpPtr op_rotation2d() {
  Mat J(2, 2);
  J << 0, -1, 1, 0;
  return op_linear(J);
}

// ---------------------------------------------------------------- normal cone

class NormalConeOp final : public MonotoneOperator {
 public:
  explicit NormalConeOp(SetPtr C) : C_(std::move(C)) {}
  int dim() const override { return C_->dim(); }
  ResolventInfo resolvent_info(double, const Vec& y) const override {
    return {C_->project(y), 0.0, 0};
  }
  bool has_exact_gap() const override { return C_->has_support(); }
  ExtReal exact_gap(const Vec& x, const Vec& u) const override {
    // G_{N_C}(x,u) = sigma_C(u) - <x,u> for x in C, +inf otherwise
    if (!C_->contains(x)) return ExtReal::pos_inf();
    return C_->support(u) - ExtReal(x.dot(u));
  }
  std::string domain_tag() const override { return "set:" + C_->describe(); }
  std::string describe() const override { return "normal_cone(" + C_->describe() + ")"; }
  SetPtr set() const { return C_; }

 private:
  SetPtr C_;
};

OpPtr op_normal_cone(SetPtr C) { return std::make_shared<NormalConeOp>(std::move(C)); }

// ------------------------------------------------------------- subdifferential

class SubdiffOp final : public MonotoneOperator {
 public:
  explicit SubdiffOp(FunPtr f) : f_(std::move(f)) {}
  int dim() const override { return f_->dim(); }
  ResolventInfo resolvent_info(double lambda, const Vec& y) const override {
    return {f_->prox(lambda, y), 0.0, 0};
  }
  bool has_forward() const override { return f_->has_gradient(); }
  Vec forward(const Vec& x) const override { return f_->gradient(x); }
  double forward_lipschitz() const override { return f_->gradient_lipschitz(); }
  const ConvexFunction* as_subdifferential() const override { return f_.get(); }
  std::string describe() const override { return "subdiff(" + f_->describe() + ")"; }

 private:
  FunPtr f_;
};

OpPtr op_subdifferential(FunPtr f) {
  if (SetPtr C = f->as_indicator_set()) return op_normal_cone(C);
  if (const QuadraticForm* qf = f->as_quadratic()) return op_linear(qf->Q, qf->q);
  return std::make_shared<SubdiffOp>(std::move(f));
}

// -------------------------------------------------------------------- scaling

class ScaledOp final : public MonotoneOperator {
 public:
  ScaledOp(OpPtr M, double lam) : M_(std::move(M)), lam_(lam) {}
  int dim() const override { return M_->dim(); }
  ResolventInfo resolvent_info(double lambda, const Vec& y) const override {
    return M_->resolvent_info(lambda * lam_, y);
  }
  bool has_forward() const override { return M_->has_forward(); }
  Vec forward(const Vec& x) const override { return lam_ * M_->forward(x); }
  double forward_lipschitz() const override { return lam_ * M_->forward_lipschitz(); }
  bool has_exact_gap() const override { return M_->has_exact_gap(); }
  ExtReal exact_gap(const Vec& x, const Vec& u) const override {
    // G_{c M}(x,u) = c * G_M(x, u/c)
    return lam_ * M_->exact_gap(x, u / lam_);
  }
  std::optional<double> as_scaled_identity() const override {
    auto c = M_->as_scaled_identity();
    return c ? std::optional<double>(lam_ * *c) : std::nullopt;
  }
  std::string domain_tag() const override { return M_->domain_tag(); }
  std::string describe() const override {
    char b[32];
    std::snprintf(b, sizeof b, "%g*", lam_);
    return b + M_->describe();
  }

 private:
  OpPtr M_;
  double lam_;
};

OpPtr scale_operator(OpPtr M, double factor) {
  if (factor < 0) throw ConfigError("scale_operator: factor must be >= 0");
  if (factor == 0.0) return op_zero(M->dim());
  return std::make_shared<ScaledOp>(std::move(M), factor);
}

// ---------------------------------------------------------------------- shift

class ShiftedOp final : public MonotoneOperator {
 public:
  ShiftedOp(OpPtr M, Vec c) : M_(std::move(M)), c_(std::move(c)) {
    if (c_.size() != M_->dim()) throw ConfigError("shift_operator: offset dimension");
  }
  int dim() const override { return M_->dim(); }
  ResolventInfo resolvent_info(double lambda, const Vec& y) const override {
    return M_->resolvent_info(lambda, y - lambda * c_);
  }
  bool has_forward() const override { return M_->has_forward(); }
  Vec forward(const Vec& x) const override { return M_->forward(x) + c_; }
  double forward_lipschitz() const override { return M_->forward_lipschitz(); }
  bool has_exact_gap() const override { return M_->has_exact_gap(); }
  ExtReal exact_gap(const Vec& x, const Vec& u) const override {
    return M_->exact_gap(x, u - c_);
  }
  std::string domain_tag() const override { return M_->domain_tag(); }
  std::string describe() const override { return M_->describe() + "+const"; }

 private:
  OpPtr M_;
  Vec c_;
};

OpPtr shift_operator(OpPtr M, Vec offset) {
  return std::make_shared<ShiftedOp>(std::move(M), std::move(offset));
}

// ------------------------------------------------------------------------ sum

class SumOp final : public MonotoneOperator {
 public:
  SumOp(OpPtr A, OpPtr B, double wA, double wB, SumOptions opts)
      : A_(std::move(A)), B_(std::move(B)), wA_(wA), wB_(wB), opts_(opts) {
    if (A_->dim() != B_->dim()) throw ConfigError("sum_operator: dimension mismatch");
    if (wA_ <= 0 || wB_ <= 0) throw ConfigError("sum_operator: weights must be positive");
    if (A_->domain_tag() != "all" && B_->domain_tag() != "all") feasibility_probe();
  }

  int dim() const override { return A_->dim(); }

  ResolventInfo resolvent_info(double lambda, const Vec& y) const override {
    // exact algebra when a summand is c*I:
    //   x + lw_A A x + l c x ni y  <=>  x = J_A^{lw_A/(1+lc)}( y/(1+lc) )
    if (auto cB = B_->as_scaled_identity()) {
      double c = lambda * wB_ * *cB;
      return A_->resolvent_info(lambda * wA_ / (1.0 + c), y / (1.0 + c));
    }
    if (auto cA = A_->as_scaled_identity()) {
      double c = lambda * wA_ * *cA;
      return B_->resolvent_info(lambda * wB_ / (1.0 + c), y / (1.0 + c));
    }
    if (A_->has_forward() && lambda * wA_ * A_->forward_lipschitz() <= 0.9)
      return fb_fixed_point(lambda, y, *A_, wA_, *B_, wB_);
    if (B_->has_forward() && lambda * wB_ * B_->forward_lipschitz() <= 0.9)
      return fb_fixed_point(lambda, y, *B_, wB_, *A_, wA_);
    return douglas_rachford(lambda, y);
  }

  bool has_forward() const override { return A_->has_forward() && B_->has_forward(); }
  Vec forward(const Vec& x) const override {
    return wA_ * A_->forward(x) + wB_ * B_->forward(x);
  }
  double forward_lipschitz() const override {
    return wA_ * A_->forward_lipschitz() + wB_ * B_->forward_lipschitz();
  }
  std::optional<double> as_scaled_identity() const override {
    auto a = A_->as_scaled_identity(), b = B_->as_scaled_identity();
    if (a && b) return wA_ * *a + wB_ * *b;
    return std::nullopt;
  }
  std::string domain_tag() const override {
    std::string ta = A_->domain_tag(), tb = B_->domain_tag();
    if (ta == "all") return tb;
    if (tb == "all") return ta;
    return "intersection(" + ta + "," + tb + ")";
  }
  const std::vector<std::string>& warnings() const override { return warnings_; }
  std::string describe() const override {
    char b[32];
    std::snprintf(b, sizeof b, " + %g*", wB_);
    char a[32];
    std::snprintf(a, sizeof a, "%g*", wA_);
    return a + A_->describe() + b + B_->describe();
  }

 private:
  // Iterate x <- J_{l wP P}( y - l wF F(x) ) for the Lipschitz summand F;
  // a contraction with factor l*wF*Lip(F) <= 0.9.
  ResolventInfo fb_fixed_point(double lambda, const Vec& y, const MonotoneOperator& F,
                               double wF, const MonotoneOperator& P, double wP) const {
    Vec x = y;
    double scale = 1.0 + y.norm();
    for (long k = 0; k < opts_.max_inner_iters; ++k) {
      Vec xn = P.resolvent(lambda * wP, y - lambda * wF * F.forward(x));
      double r = (xn - x).norm() / scale;
      x = std::move(xn);
      if (r <= 0.1 * opts_.inner_tol) return {x, r, k + 1};
    }
    throw NonConvergence("sum resolvent: forward-backward fixed point stalled" + hint());
  }

  // Douglas-Rachford on the strongly monotone splitting
  //   Atil = l wA A + (1/2)(.-y),  Btil = l wB B + (1/2)(.-y);
  // resolvents of the tilted operators reduce to rescaled base resolvents.
  ResolventInfo douglas_rachford(double lambda, const Vec& y) const {
    auto Jtil = [&](const MonotoneOperator& M, double w, const Vec& s) {
      return M.resolvent((2.0 / 3.0) * lambda * w, (2.0 / 3.0) * (s + 0.5 * y));
    };
    Vec s = y;
    double scale = 1.0 + y.norm();
    for (long k = 0; k < opts_.max_inner_iters; ++k) {
      Vec a = Jtil(*A_, wA_, s);
      Vec b = Jtil(*B_, wB_, 2.0 * a - s);
      double r = (a - b).norm() / scale;
      s += b - a;
      if (r <= opts_.inner_tol) return {b, r, k + 1};
    }
    throw NonConvergence("sum resolvent: Douglas-Rachford stalled" + hint());
  }

  void feasibility_probe() {
    Vec z = Vec::Zero(dim());
    double gap = 0.0;
    for (int it = 0; it < 50; ++it) {
      Vec za = A_->resolvent(1.0, z);
      Vec zb = B_->resolvent(1.0, za);
      gap = (za - zb).norm();
      z = zb;
    }
    if (gap > 1e-6 * (1.0 + z.norm()))
      warnings_.push_back(
          "MaximalityWarning: summand domains may not intersect (projection probe gap " +
          std::to_string(gap) + ")");
  }

  std::string hint() const {
    return warnings_.empty() ? std::string() : " [" + warnings_.front() + "]";
  }

  OpPtr A_, B_;
  double wA_, wB_;
  SumOptions opts_;
  std::vector<std::string> warnings_;
};

OpPtr sum_operator(OpPtr A, OpPtr B, double wA, double wB, SumOptions opts) {
  return std::make_shared<SumOp>(std::move(A), std::move(B), wA, wB, opts);
}

}  // namespace monoflow
