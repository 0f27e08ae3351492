#pragma once

#include <string>
#include <vector>

#include "monoflow/ext_real.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

// Closed convex set with a projection oracle.  Support function, rigid
// translation and tangent cones are available only where the shape admits
// them in closed form; the defaults throw.
class ConvexSet {
 public:
  virtual ~ConvexSet() = default;

  virtual int dim() const = 0;
  virtual Vec project(const Vec& x) const = 0;
  virtual std::string describe() const = 0;

  double distance(const Vec& x) const { return (x - project(x)).norm(); }
  bool contains(const Vec& x, double tol = 1e-9) const {
    return distance(x) <= tol * (1.0 + x.norm());
  }

  virtual bool has_support() const { return false; }
  virtual ExtReal support(const Vec& u) const;  // throws NoEvaluator

  // The same shape rigidly shifted by delta.
  virtual SetPtr translated(const Vec& delta) const;  // throws UnsupportedSetShape
  // Tangent cone at a point of the set, expressed as a cone at the origin.
  virtual SetPtr tangent_cone(const Vec& at) const;  // throws UnsupportedSetShape
  // Orthonormal basis (columns) of span(S - S); 0 columns for singletons.
  virtual Mat direction_basis() const;  // throws UnsupportedSetShape
};

SetPtr set_whole(int dim);
SetPtr set_ball(Vec center, double radius);
SetPtr set_box(Vec lo, Vec hi);                 // entries may be +-inf
SetPtr set_halfspace(Vec normal, double offset);  // {x : <n,x> <= b}
SetPtr set_affine(Vec point, Mat basis);        // point + span(basis columns)
SetPtr set_segment(Vec p, Vec q);
SetPtr set_singleton(Vec p);
SetPtr set_polytope(std::vector<Vec> vertices);  // exact projection, <= 12 vertices
SetPtr set_parabola_region();                    // {(x,y) : 2x + y^2 <= 0}

// F = span of feasible directions, F^perp its orthogonal complement.
struct SubspaceSplit {
  Mat F;      // n x k, orthonormal columns
  Mat Fperp;  // n x (n-k), orthonormal columns
};
SubspaceSplit subspace_split(const ConvexSet& S);

}  // namespace monoflow
