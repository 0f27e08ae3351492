#include "monoflow/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "monoflow/errors.hpp"
#include "monoflow/linalg.hpp"

namespace monoflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dim_tag(int d) {
  char b[32];
  std::snprintf(b, sizeof b, "[R^%d]", d);
  return b;
}
}  // namespace

ExtReal ConvexSet::support(const Vec&) const {
  throw NoEvaluator("support function not available for " + describe());
}
SetPtr ConvexSet::translated(const Vec&) const {
  throw UnsupportedSetShape("translation not available for " + describe());
}
SetPtr ConvexSet::tangent_cone(const Vec&) const {
  throw UnsupportedSetShape("tangent cone not available for " + describe());
}
Mat ConvexSet::direction_basis() const {
  throw UnsupportedSetShape("direction basis not available for " + describe());
}

// ---------------------------------------------------------------- whole space

class WholeSpace final : public ConvexSet {
 public:
  explicit WholeSpace(int d) : d_(d) {}
  int dim() const override { return d_; }
  Vec project(const Vec& x) const override { return x; }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override {
    return u.norm() <= 1e-12 ? ExtReal(0.0) : ExtReal::pos_inf();
  }
  SetPtr translated(const Vec&) const override { return set_whole(d_); }
  SetPtr tangent_cone(const Vec&) const override { return set_whole(d_); }
  Mat direction_basis() const override { return Mat::Identity(d_, d_); }
  std::string describe() const override { return "whole" + dim_tag(d_); }

 private:
  int d_;
};

SetPtr set_whole(int dim) { return std::make_shared<WholeSpace>(dim); }

// ----------------------------------------------------------------------- ball

class Ball final : public ConvexSet {
 public:
  Ball(Vec c, double r) : c_(std::move(c)), r_(r) {
    if (r < 0) throw ConfigError("ball: negative radius");
  }
  int dim() const override { return static_cast<int>(c_.size()); }
  Vec project(const Vec& x) const override {
    Vec d = x - c_;
    double n = d.norm();
    if (n <= r_) return x;
    return c_ + (r_ / n) * d;
  }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override { return c_.dot(u) + r_ * u.norm(); }
  SetPtr translated(const Vec& delta) const override { return set_ball(c_ + delta, r_); }
  SetPtr tangent_cone(const Vec& at) const override {
    Vec d = at - c_;
    double n = d.norm();
    if (n < r_ * (1.0 - 1e-9) || r_ == 0.0)
      return r_ == 0.0 ? set_singleton(Vec::Zero(dim())) : set_whole(dim());
    return set_halfspace(d / n, 0.0);
  }
  Mat direction_basis() const override {
    return r_ > 0 ? Mat(Mat::Identity(dim(), dim())) : Mat(dim(), 0);
  }
  std::string describe() const override {
    char b[64];
    std::snprintf(b, sizeof b, "ball(r=%g)%s", r_, dim_tag(dim()).c_str());
    return b;
  }

 private:
  Vec c_;
  double r_;
};

SetPtr set_ball(Vec center, double radius) {
  return std::make_shared<Ball>(std::move(center), radius);
}

// ------------------------------------------------------------------------ box

class Box final : public ConvexSet {
 public:
  Box(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) throw ConfigError("box: lo/hi dimension mismatch");
    for (long i = 0; i < lo_.size(); ++i)
      if (lo_[i] > hi_[i]) throw ConfigError("box: lo > hi");
  }
  int dim() const override { return static_cast<int>(lo_.size()); }
  Vec project(const Vec& x) const override {
    Vec y = x;
    for (long i = 0; i < y.size(); ++i) y[i] = std::clamp(x[i], lo_[i], hi_[i]);
    return y;
  }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override {
    ExtReal s = 0.0;
    for (long i = 0; i < u.size(); ++i) {
      if (u[i] > 0.0)
        s += std::isinf(hi_[i]) ? ExtReal::pos_inf() : ExtReal(u[i] * hi_[i]);
      else if (u[i] < 0.0)
        s += std::isinf(lo_[i]) ? ExtReal::pos_inf() : ExtReal(u[i] * lo_[i]);
    }
    return s;
  }
  SetPtr translated(const Vec& delta) const override {
    Vec lo = lo_, hi = hi_;
    for (long i = 0; i < lo.size(); ++i) {
      if (!std::isinf(lo[i])) lo[i] += delta[i];
      if (!std::isinf(hi[i])) hi[i] += delta[i];
    }
    return set_box(std::move(lo), std::move(hi));
  }
  SetPtr tangent_cone(const Vec& at) const override {
    Vec lo(dim()), hi(dim());
    for (int i = 0; i < dim(); ++i) {
      double tol = 1e-9 * (1.0 + std::abs(at[i]));
      bool at_lo = !std::isinf(lo_[i]) && std::abs(at[i] - lo_[i]) <= tol;
      bool at_hi = !std::isinf(hi_[i]) && std::abs(at[i] - hi_[i]) <= tol;
      lo[i] = at_lo ? 0.0 : -kInf;
      hi[i] = at_hi ? 0.0 : kInf;
    }
    return set_box(std::move(lo), std::move(hi));
  }
  Mat direction_basis() const override {
    std::vector<int> free;
    for (int i = 0; i < dim(); ++i)
      if (hi_[i] > lo_[i]) free.push_back(i);
    Mat B = Mat::Zero(dim(), free.size());
    for (size_t k = 0; k < free.size(); ++k) B(free[k], k) = 1.0;
    return B;
  }
  std::string describe() const override { return "box" + dim_tag(dim()); }

 private:
  Vec lo_, hi_;
};

SetPtr set_box(Vec lo, Vec hi) { return std::make_shared<Box>(std::move(lo), std::move(hi)); }

// ------------------------------------------------------------------ halfspace

class Halfspace final : public ConvexSet {
 public:
  Halfspace(Vec n, double b) {
    double nn = n.norm();
    if (nn <= 0) throw ConfigError("halfspace: zero normal");
    n_ = n / nn;
    b_ = b / nn;
  }
  int dim() const override { return static_cast<int>(n_.size()); }
  Vec project(const Vec& x) const override {
    double excess = n_.dot(x) - b_;
    return excess > 0 ? Vec(x - excess * n_) : x;
  }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override {
    double t = n_.dot(u);
    double resid = (u - t * n_).norm();
    if (resid <= 1e-12 * (1.0 + u.norm()) && t >= -1e-12 * (1.0 + u.norm()))
      return std::max(t, 0.0) * b_;
    return ExtReal::pos_inf();
  }
  SetPtr translated(const Vec& delta) const override {
    return set_halfspace(n_, b_ + n_.dot(delta));
  }
  SetPtr tangent_cone(const Vec& at) const override {
    if (n_.dot(at) < b_ - 1e-9 * (1.0 + at.norm())) return set_whole(dim());
    return set_halfspace(n_, 0.0);
  }
  Mat direction_basis() const override { return Mat::Identity(dim(), dim()); }
  std::string describe() const override { return "halfspace" + dim_tag(dim()); }

 private:
  Vec n_;
  double b_;
};

SetPtr set_halfspace(Vec normal, double offset) {
  return std::make_shared<Halfspace>(std::move(normal), offset);
}

// -------------------------------------------------------------- affine + span

class AffineSubspace final : public ConvexSet {
 public:
  AffineSubspace(Vec p, Mat basis) : p_(std::move(p)) {
    if (basis.rows() != p_.size()) throw ConfigError("affine: basis row count != dim");
    B_ = orthonormal_basis(basis);
  }
  int dim() const override { return static_cast<int>(p_.size()); }
  Vec project(const Vec& x) const override { return p_ + B_ * (B_.transpose() * (x - p_)); }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override {
    if ((B_.transpose() * u).norm() > 1e-12 * (1.0 + u.norm())) return ExtReal::pos_inf();
    return p_.dot(u);
  }
  SetPtr translated(const Vec& delta) const override { return set_affine(p_ + delta, B_); }
  SetPtr tangent_cone(const Vec&) const override { return set_affine(Vec::Zero(dim()), B_); }
  Mat direction_basis() const override { return B_; }
  std::string describe() const override {
    char b[64];
    std::snprintf(b, sizeof b, "affine(dim=%ld)%s", B_.cols(), dim_tag(dim()).c_str());
    return b;
  }

 private:
  Vec p_;
  Mat B_;
};

SetPtr set_affine(Vec point, Mat basis) {
  return std::make_shared<AffineSubspace>(std::move(point), std::move(basis));
}

// -------------------------------------------------------------------- segment

class Segment final : public ConvexSet {
 public:
  Segment(Vec p, Vec q) : p_(std::move(p)), q_(std::move(q)) {
    if (p_.size() != q_.size()) throw ConfigError("segment: endpoint dimension mismatch");
  }
  int dim() const override { return static_cast<int>(p_.size()); }
  Vec project(const Vec& x) const override {
    Vec d = q_ - p_;
    double dd = d.squaredNorm();
    if (dd == 0.0) return p_;
    double t = std::clamp((x - p_).dot(d) / dd, 0.0, 1.0);
    return p_ + t * d;
  }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override { return std::max(p_.dot(u), q_.dot(u)); }
  SetPtr translated(const Vec& delta) const override { return set_segment(p_ + delta, q_ + delta); }
  Mat direction_basis() const override {
    Vec d = q_ - p_;
    double n = d.norm();
    if (n == 0.0) return Mat(dim(), 0);
    Mat B(dim(), 1);
    B.col(0) = d / n;
    return B;
  }
  std::string describe() const override { return "segment" + dim_tag(dim()); }

 private:
  Vec p_, q_;
};

SetPtr set_segment(Vec p, Vec q) { return std::make_shared<Segment>(std::move(p), std::move(q)); }

// ------------------------------------------------------------------ singleton

class Singleton final : public ConvexSet {
 public:
  explicit Singleton(Vec p) : p_(std::move(p)) {}
  int dim() const override { return static_cast<int>(p_.size()); }
  Vec project(const Vec&) const override { return p_; }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override { return p_.dot(u); }
  SetPtr translated(const Vec& delta) const override { return set_singleton(p_ + delta); }
  SetPtr tangent_cone(const Vec&) const override { return set_singleton(Vec::Zero(dim())); }
  Mat direction_basis() const override { return Mat(dim(), 0); }
  std::string describe() const override { return "singleton" + dim_tag(dim()); }

 private:
  Vec p_;
};

SetPtr set_singleton(Vec p) { return std::make_shared<Singleton>(std::move(p)); }

// ------------------------------------------------------------------- polytope

// Projection by exhaustive support-pattern enumeration: for every subset of
// vertices allowed to carry weight, solve the equality-constrained least
// squares (sum of weights = 1), keep the best nonnegative candidate.  Exact
// for small vertex counts, which is all this shape is for.
class Polytope final : public ConvexSet {
 public:
  explicit Polytope(std::vector<Vec> vs) : vs_(std::move(vs)) {
    if (vs_.empty()) throw ConfigError("polytope: no vertices");
    if (vs_.size() > 12) throw ConfigError("polytope: vertex count > 12 unsupported");
    for (const auto& v : vs_)
      if (v.size() != vs_[0].size()) throw ConfigError("polytope: mixed dimensions");
  }
  int dim() const override { return static_cast<int>(vs_[0].size()); }

  Vec project(const Vec& x) const override {
    size_t m = vs_.size();
    double best = std::numeric_limits<double>::max();
    Vec best_pt = vs_[0];
    for (size_t mask = 1; mask < (1u << m); ++mask) {
      std::vector<int> idx;
      for (size_t i = 0; i < m; ++i)
        if (mask & (1u << i)) idx.push_back(static_cast<int>(i));
      size_t k = idx.size();
      // minimize |V lam - x|^2 with 1'lam = 1 via KKT; least-squares solve
      // tolerates affinely dependent vertices.
      Mat KKT(k + 1, k + 1);
      Vec rhs(k + 1);
      for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) KKT(a, b) = vs_[idx[a]].dot(vs_[idx[b]]);
        KKT(a, k) = 1.0;
        KKT(k, a) = 1.0;
        rhs[a] = vs_[idx[a]].dot(x);
      }
      KKT(k, k) = 0.0;
      rhs[k] = 1.0;
      Vec sol = KKT.completeOrthogonalDecomposition().solve(rhs);
      bool feasible = true;
      for (size_t a = 0; a < k; ++a)
        if (sol[a] < -1e-12) feasible = false;
      if (std::abs(sol.head(k).sum() - 1.0) > 1e-9) feasible = false;
      if (!feasible) continue;
      Vec pt = Vec::Zero(dim());
      for (size_t a = 0; a < k; ++a) pt += std::max(sol[a], 0.0) * vs_[idx[a]];
      double obj = (pt - x).squaredNorm();
      if (obj < best) {
        best = obj;
        best_pt = pt;
      }
    }
    return best_pt;
  }

  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override {
    double s = vs_[0].dot(u);
    for (const auto& v : vs_) s = std::max(s, v.dot(u));
    return s;
  }
  SetPtr translated(const Vec& delta) const override {
    std::vector<Vec> vs = vs_;
    for (auto& v : vs) v += delta;
    return set_polytope(std::move(vs));
  }
  Mat direction_basis() const override {
    Mat D(dim(), vs_.size() - 1);
    for (size_t i = 1; i < vs_.size(); ++i) D.col(i - 1) = vs_[i] - vs_[0];
    return orthonormal_basis(D);
  }
  std::string describe() const override {
    char b[64];
    std::snprintf(b, sizeof b, "polytope(%zu vertices)%s", vs_.size(), dim_tag(dim()).c_str());
    return b;
  }

 private:
  std::vector<Vec> vs_;
};

SetPtr set_polytope(std::vector<Vec> vertices) {
  return std::make_shared<Polytope>(std::move(vertices));
}

// ------------------------------------------------------------ parabola region

// {(x,y) : 2x + y^2 <= 0}.  Projection reduces to the depressed cubic
// Y^3 + 2(1+x0) Y - 2 y0 = 0 for the boundary parameter.
class ParabolaRegion final : public ConvexSet {
 public:
  int dim() const override { return 2; }
  Vec project(const Vec& p) const override {
    double x0 = p[0], y0 = p[1];
    if (2.0 * x0 + y0 * y0 <= 0.0) return p;
    double a = 2.0 * (1.0 + x0), b = -2.0 * y0;  // Y^3 + a Y + b = 0
    std::vector<double> roots = solve_depressed_cubic(a, b);
    double best = std::numeric_limits<double>::max();
    Vec out(2);
    for (double Y : roots) {
      Vec cand(2);
      cand << -0.5 * Y * Y, Y;
      double d = (cand - p).squaredNorm();
      if (d < best) {
        best = d;
        out = cand;
      }
    }
    return out;
  }
  bool has_support() const override { return true; }
  ExtReal support(const Vec& u) const override {
    // sup{ux + vy : x <= -y^2/2}: finite only for u > 0 (or u = v = 0)
    if (u[0] > 0.0) return u[1] * u[1] / (2.0 * u[0]);
    if (u[0] == 0.0 && u[1] == 0.0) return 0.0;
    return ExtReal::pos_inf();
  }
  SetPtr tangent_cone(const Vec& at) const override {
    double g = 2.0 * at[0] + at[1] * at[1];
    if (g < -1e-9 * (1.0 + at.norm())) return set_whole(2);
    Vec n(2);
    n << 2.0, 2.0 * at[1];
    return set_halfspace(n, 0.0);
  }
  Mat direction_basis() const override { return Mat::Identity(2, 2); }
  std::string describe() const override { return "parabola_region[R^2]"; }

 private:
  static std::vector<double> solve_depressed_cubic(double p, double q) {
    // roots of Y^3 + p Y + q = 0
    double disc = q * q / 4.0 + p * p * p / 27.0;
    std::vector<double> roots;
    if (disc >= 0) {
      double s = std::sqrt(disc);
      double u = std::cbrt(-q / 2.0 + s), v = std::cbrt(-q / 2.0 - s);
      roots.push_back(u + v);
    } else {
      double r = std::sqrt(-p * p * p / 27.0);
      double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
      double m = 2.0 * std::sqrt(-p / 3.0);
      for (int k = 0; k < 3; ++k)
        roots.push_back(m * std::cos((phi + 2.0 * M_PI * k) / 3.0));
    }
    // one Newton polish per root
    for (double& Y : roots) {
      for (int it = 0; it < 3; ++it) {
        double f = Y * Y * Y + p * Y + q, df = 3.0 * Y * Y + p;
        if (std::abs(df) < 1e-300) break;
        Y -= f / df;
      }
    }
    return roots;
  }
};

SetPtr set_parabola_region() { return std::make_shared<ParabolaRegion>(); }

// -------------------------------------------------------------- subspace split

SubspaceSplit subspace_split(const ConvexSet& S) {
  Mat F = S.direction_basis();
  return {F, orthonormal_complement(F, S.dim())};
}

}  // namespace monoflow
