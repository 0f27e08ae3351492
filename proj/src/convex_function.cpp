#include "monoflow/convex_function.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "monoflow/errors.hpp"
#include "monoflow/linalg.hpp"

namespace monoflow {

Vec ConvexFunction::gradient(const Vec&) const {
  throw NoEvaluator("gradient not available for " + describe());
}
ExtReal ConvexFunction::conjugate(const Vec&) const {
  throw NoConjugate("conjugate not available for " + describe());
}

// ------------------------------------------------------------------ quadratic

class Quadratic final : public ConvexFunction {
 public:
  Quadratic(Mat Q, Vec q, double c) {
    if (Q.rows() != Q.cols() || Q.rows() != q.size())
      throw ConfigError("quadratic: dimension mismatch");
    if ((Q - Q.transpose()).norm() > 1e-12 * (1.0 + Q.norm()))
      throw ConfigError("quadratic: matrix must be symmetric");
    form_.Q = 0.5 * (Q + Q.transpose());
    form_.q = std::move(q);
    form_.c = c;
    Eigen::SelfAdjointEigenSolver<Mat> es(form_.Q);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
    double emax = evals_.size() ? evals_.maxCoeff() : 0.0;
    if (evals_.size() && evals_.minCoeff() < -1e-10 * std::max(1.0, emax))
      throw ConfigError("quadratic: matrix must be positive semidefinite");
  }

  int dim() const override { return static_cast<int>(form_.q.size()); }
  ExtReal value(const Vec& x) const override {
    return 0.5 * x.dot(form_.Q * x) + form_.q.dot(x) + form_.c;
  }
  Vec prox(double lambda, const Vec& y) const override {
    Mat M = lambda * form_.Q + Mat::Identity(dim(), dim());
    return M.ldlt().solve(y - lambda * form_.q);
  }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& x) const override { return form_.Q * x + form_.q; }
  double gradient_lipschitz() const override {
    return evals_.size() ? std::max(evals_.maxCoeff(), 0.0) : 0.0;
  }
  bool has_conjugate() const override { return true; }
  ExtReal conjugate(const Vec& p) const override {
    // f*(p) = (1/2)(p-q)' Q^+ (p-q) - c on q + range(Q), +inf elsewhere
    Vec m = evecs_.transpose() * (p - form_.q);
    double emax = evals_.size() ? std::max(evals_.maxCoeff(), 0.0) : 0.0;
    double cut = 1e-10 * std::max(1.0, emax);
    double acc = 0.0;
    for (long i = 0; i < m.size(); ++i) {
      if (evals_[i] > cut)
        acc += m[i] * m[i] / evals_[i];
      else if (std::abs(m[i]) > 1e-9 * (1.0 + (p - form_.q).norm()))
        return ExtReal::pos_inf();
    }
    return 0.5 * acc - form_.c;
  }
  const QuadraticForm* as_quadratic() const override { return &form_; }
  std::string describe() const override {
    char b[48];
    std::snprintf(b, sizeof b, "quadratic[R^%d]", dim());
    return b;
  }

 private:
  QuadraticForm form_;
  Vec evals_;
  Mat evecs_;
};

FunPtr fn_quadratic(Mat Q, Vec q, double c) {
  return std::make_shared<Quadratic>(std::move(Q), std::move(q), c);
}

FunPtr fn_norm_sq(int dim) {
  return fn_quadratic(Mat::Identity(dim, dim), Vec::Zero(dim), 0.0);
}

// --------------------------------------------------------------------- affine

class Affine final : public ConvexFunction {
 public:
  Affine(Vec c, double b) : c_(std::move(c)), b_(b) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  ExtReal value(const Vec& x) const override { return c_.dot(x) + b_; }
  Vec prox(double lambda, const Vec& y) const override { return y - lambda * c_; }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec&) const override { return c_; }
  double gradient_lipschitz() const override { return 0.0; }
  bool has_conjugate() const override { return true; }
  ExtReal conjugate(const Vec& p) const override {
    if ((p - c_).norm() > 1e-9 * (1.0 + c_.norm())) return ExtReal::pos_inf();
    return -b_;
  }
  std::string describe() const override { return "affine"; }

 private:
  Vec c_;
  double b_;
};

FunPtr fn_affine(Vec c, double b) { return std::make_shared<Affine>(std::move(c), b); }

// ------------------------------------------------------------------ indicator

class Indicator final : public ConvexFunction {
 public:
  explicit Indicator(SetPtr C) : C_(std::move(C)) {}
  int dim() const override { return C_->dim(); }
  ExtReal value(const Vec& x) const override {
    return C_->contains(x) ? ExtReal(0.0) : ExtReal::pos_inf();
  }
  Vec prox(double, const Vec& y) const override { return C_->project(y); }
  bool has_conjugate() const override { return C_->has_support(); }
  ExtReal conjugate(const Vec& p) const override { return C_->support(p); }
  SetPtr as_indicator_set() const override { return C_; }
  std::string describe() const override { return "indicator(" + C_->describe() + ")"; }

 private:
  SetPtr C_;
};

FunPtr fn_indicator(SetPtr C) { return std::make_shared<Indicator>(std::move(C)); }

// ------------------------------------------------------------------- support

class SupportFn final : public ConvexFunction {
 public:
  explicit SupportFn(SetPtr C) : C_(std::move(C)) {
    if (!C_->has_support())
      throw ConfigError("support function needs a support oracle: " + C_->describe());
  }
  int dim() const override { return C_->dim(); }
  ExtReal value(const Vec& x) const override { return C_->support(x); }
  Vec prox(double lambda, const Vec& y) const override {
    // Moreau: prox of the conjugate of the indicator
    return y - lambda * C_->project(y / lambda);
  }
  bool has_conjugate() const override { return true; }
  ExtReal conjugate(const Vec& p) const override {
    return C_->contains(p) ? ExtReal(0.0) : ExtReal::pos_inf();
  }
  std::string describe() const override { return "support(" + C_->describe() + ")"; }

 private:
  SetPtr C_;
};

FunPtr fn_support(SetPtr C) { return std::make_shared<SupportFn>(std::move(C)); }

// ----------------------------------------------------------- squared distance

class DistSq final : public ConvexFunction {
 public:
  DistSq(SetPtr C, double a) : C_(std::move(C)), a_(a) {
    if (a_ <= 0) throw ConfigError("dist_sq: factor must be positive");
  }
  int dim() const override { return C_->dim(); }
  ExtReal value(const Vec& x) const override {
    double d = C_->distance(x);
    return a_ * d * d;
  }
  Vec prox(double lambda, const Vec& y) const override {
    double th = 2.0 * a_ * lambda / (1.0 + 2.0 * a_ * lambda);
    return y + th * (C_->project(y) - y);
  }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& x) const override { return 2.0 * a_ * (x - C_->project(x)); }
  double gradient_lipschitz() const override { return 2.0 * a_; }
  bool has_conjugate() const override { return C_->has_support(); }
  ExtReal conjugate(const Vec& p) const override {
    return p.squaredNorm() / (4.0 * a_) + C_->support(p);
  }
  std::string describe() const override {
    char b[96];
    std::snprintf(b, sizeof b, "%g*dist_sq(%s)", a_, C_->describe().c_str());
    return b;
  }

 private:
  SetPtr C_;
  double a_;
};

FunPtr fn_dist_sq(SetPtr C, double factor) {
  return std::make_shared<DistSq>(std::move(C), factor);
}

// ---------------------------------------------------------- channel quadratic

// f(x,y) = y^2 / (2 s(x)), s(x) = a^2 - x^2, on the closed strip |x| <= a
// (with f(+-a, y) = 0 iff y = 0).  Convex: quadratic-over-concave-positive.
class ChannelQuadratic final : public ConvexFunction {
 public:
  explicit ChannelQuadratic(double a) : a_(a) {
    if (a <= 0) throw ConfigError("channel_quadratic: a must be positive");
  }
  int dim() const override { return 2; }

  ExtReal value(const Vec& z) const override {
    double s = a_ * a_ - z[0] * z[0];
    if (s < 0.0) return ExtReal::pos_inf();
    if (s == 0.0) return z[1] == 0.0 ? ExtReal(0.0) : ExtReal::pos_inf();
    return z[1] * z[1] / (2.0 * s);
  }

  // Partial minimization over y gives the 1D reduced objective
  //   g(x) = eta^2 / (2(s(x)+lambda)) + (x - xi)^2 / (2 lambda),
  // convex on [-a, a]; solved by bisection on g' plus Newton polish.
  Vec prox(double lambda, const Vec& z) const override {
    double xi = z[0], eta = z[1];
    auto gp = [&](double x) {
      double d = a_ * a_ - x * x + lambda;
      return eta * eta * x / (d * d) + (x - xi) / lambda;
    };
    auto gpp = [&](double x) {
      double s = a_ * a_ - x * x;
      double d = s + lambda;
      return eta * eta * (d + 4.0 * x * x) / (d * d * d) + 1.0 / lambda;
    };
    double lo = -a_ + 1e-12, hi = a_ - 1e-12, x = 0.0;
    if (gp(lo) >= 0.0)
      x = lo;
    else if (gp(hi) <= 0.0)
      x = hi;
    else {
      double l = lo, h = hi;
      for (int it = 0; it < 200 && (h - l) > 1e-15 * std::max(1.0, a_); ++it) {
        double m = 0.5 * (l + h);
        (gp(m) <= 0.0 ? l : h) = m;
      }
      x = 0.5 * (l + h);
      for (int it = 0; it < 4; ++it)
        x = std::clamp(x - gp(x) / gpp(x), lo, hi);
    }
    // compare against the exact strip edges
    auto g = [&](double xc) {
      double d = a_ * a_ - xc * xc + lambda;
      return eta * eta / (2.0 * d) + (xc - xi) * (xc - xi) / (2.0 * lambda);
    };
    for (double cand : {-a_, a_})
      if (g(cand) < g(x)) x = cand;
    double s = a_ * a_ - x * x;
    Vec out(2);
    out << x, eta * s / (s + lambda);
    return out;
  }

  bool has_conjugate() const override { return true; }
  ExtReal conjugate(const Vec& p) const override {
    double u = p[0], v = p[1];
    if (std::abs(u) <= a_ * v * v)
      return (v == 0.0 ? 0.0 : u * u / (2.0 * v * v)) + 0.5 * a_ * a_ * v * v;
    return a_ * std::abs(u);
  }
  std::string describe() const override {
    char b[48];
    std::snprintf(b, sizeof b, "channel_quadratic(a=%g)", a_);
    return b;
  }

 private:
  double a_;
};

FunPtr fn_channel_quadratic(double a) { return std::make_shared<ChannelQuadratic>(a); }

// --------------------------------------------------------------- channel tilt

// f(x,y) = y + (1/2)[x-b]_+^2 + (1/2)[x+b]_-^2 — steady descent in y between
// soft walls at |x| = b.
class ChannelTilt final : public ConvexFunction {
 public:
  explicit ChannelTilt(double b) : b_(b) {
    if (b <= 0) throw ConfigError("channel_tilt: b must be positive");
  }
  int dim() const override { return 2; }
  ExtReal value(const Vec& z) const override {
    double hi = std::max(z[0] - b_, 0.0), lo = std::min(z[0] + b_, 0.0);
    return z[1] + 0.5 * hi * hi + 0.5 * lo * lo;
  }
  Vec prox(double lambda, const Vec& z) const override {
    double clamped = std::clamp(z[0], -b_, b_);
    Vec out(2);
    out << z[0] + lambda / (1.0 + lambda) * (clamped - z[0]), z[1] - lambda;
    return out;
  }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& z) const override {
    Vec g(2);
    g << std::max(z[0] - b_, 0.0) + std::min(z[0] + b_, 0.0), 1.0;
    return g;
  }
  double gradient_lipschitz() const override { return 1.0; }
  bool has_conjugate() const override { return true; }
  ExtReal conjugate(const Vec& p) const override {
    if (std::abs(p[1] - 1.0) > 1e-9) return ExtReal::pos_inf();
    return 0.5 * p[0] * p[0] + b_ * std::abs(p[0]);
  }
  std::string describe() const override {
    char b[48];
    std::snprintf(b, sizeof b, "channel_tilt(b=%g)", b_);
    return b;
  }

 private:
  double b_;
};

FunPtr fn_channel_tilt(double b) { return std::make_shared<ChannelTilt>(b); }

// -------------------------------------------------------- tridiagonal quadratic

class TridiagQuadratic final : public ConvexFunction {
 public:
  TridiagQuadratic(Vec diag, Vec off, Vec q, double c)
      : d_(std::move(diag)), e_(std::move(off)), q_(std::move(q)), c_(c) {
    if (e_.size() != d_.size() - 1 || q_.size() != d_.size())
      throw ConfigError("tridiag_quadratic: band sizes inconsistent");
  }
  int dim() const override { return static_cast<int>(d_.size()); }
  ExtReal value(const Vec& x) const override {
    double acc = 0.0;
    for (long i = 0; i < d_.size(); ++i) acc += d_[i] * x[i] * x[i];
    for (long i = 0; i + 1 < d_.size(); ++i) acc += 2.0 * e_[i] * x[i] * x[i + 1];
    return 0.5 * acc + q_.dot(x) + c_;
  }
  Vec prox(double lambda, const Vec& y) const override {
    Vec dd = Vec::Ones(dim()) + lambda * d_;
    Vec ee = lambda * e_;
    return solve_tridiag(ee, dd, ee, y - lambda * q_);
  }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& x) const override {
    Vec g = d_.cwiseProduct(x) + q_;
    for (long i = 0; i + 1 < d_.size(); ++i) {
      g[i] += e_[i] * x[i + 1];
      g[i + 1] += e_[i] * x[i];
    }
    return g;
  }
  double gradient_lipschitz() const override {
    // Gershgorin upper bound; cheap and safe for a step-size rule
    double m = 0.0;
    for (long i = 0; i < d_.size(); ++i) {
      double r = d_[i];
      if (i > 0) r += std::abs(e_[i - 1]);
      if (i + 1 < d_.size()) r += std::abs(e_[i]);
      m = std::max(m, r);
    }
    return m;
  }
  std::string describe() const override {
    char b[48];
    std::snprintf(b, sizeof b, "tridiag_quadratic[R^%d]", dim());
    return b;
  }

 private:
  Vec d_, e_, q_;
  double c_;
};

FunPtr fn_tridiag_quadratic(Vec diag, Vec off, Vec q, double c) {
  return std::make_shared<TridiagQuadratic>(std::move(diag), std::move(off), std::move(q), c);
}

// ------------------------------------------------------------ obstacle penalty

class ObstaclePenalty final : public ConvexFunction {
 public:
  ObstaclePenalty(double a, double b, Vec w) : a_(a), b_(b), w_(std::move(w)) {
    if (a_ >= b_) throw ConfigError("obstacle_penalty: needs a < b");
    if (w_.minCoeff() <= 0) throw ConfigError("obstacle_penalty: weights must be positive");
    sw_ = w_.cwiseSqrt();
  }
  int dim() const override { return static_cast<int>(w_.size()); }
  ExtReal value(const Vec& v) const override {
    double acc = 0.0;
    for (long i = 0; i < v.size(); ++i) acc += w_[i] * g(v[i] / sw_[i]);
    return acc;
  }
  Vec prox(double lambda, const Vec& z) const override {
    Vec out(z.size());
    for (long i = 0; i < z.size(); ++i) out[i] = sw_[i] * prox1d(lambda, z[i] / sw_[i]);
    return out;
  }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& v) const override {
    Vec out(v.size());
    for (long i = 0; i < v.size(); ++i) out[i] = sw_[i] * gp(v[i] / sw_[i]);
    return out;
  }
  double gradient_lipschitz() const override { return 1.0; }
  std::string describe() const override {
    char b[64];
    std::snprintf(b, sizeof b, "obstacle_penalty(a=%g,b=%g)[R^%d]", a_, b_, dim());
    return b;
  }

 private:
  double g(double u) const {
    double hi = std::max(u - b_, 0.0), lo = std::max(a_ - u, 0.0);
    return 0.5 * hi * hi + 0.5 * lo * lo;
  }
  double gp(double u) const { return std::max(u - b_, 0.0) - std::max(a_ - u, 0.0); }
  double prox1d(double m, double z) const {
    if (z > b_) return (z + m * b_) / (1.0 + m);
    if (z < a_) return (z + m * a_) / (1.0 + m);
    return z;
  }

  double a_, b_;
  Vec w_, sw_;
};

FunPtr fn_obstacle_penalty(double a, double b, Vec weights) {
  return std::make_shared<ObstaclePenalty>(a, b, std::move(weights));
}

}  // namespace monoflow
