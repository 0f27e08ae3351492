#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monoflow/convex_function.hpp"
#include "monoflow/convex_set.hpp"
#include "monoflow/operators.hpp"
#include "monoflow/schedule.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

struct Trajectory {
  std::vector<double> times;             // strictly increasing grid nodes
  std::vector<Vec> states;               // one state per node, states[0] = x0
  std::vector<double> step_residuals;    // max inner residual per step, [0] = 0
  std::vector<std::pair<std::string, std::string>> metadata;

  std::optional<std::string> meta(const std::string& key) const;
  int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
  std::size_t size() const { return times.size(); }
};

// Descriptor for  dx/dt + A(x) + beta(t) B(x) - f(t) contains 0.
// Either operator slot may be empty.  phi/psi are optional potentials of A/B
// used for energy accounting and for the explicit half of forward-backward
// stepping (phi must then be differentiable).
struct FlowProblem {
  OpPtr A;
  OpPtr B;
  FunPtr phi;
  FunPtr psi;
  std::optional<Schedule> beta;    // weight on B, defaults to 1
  std::optional<Forcing> forcing;  // right-hand side f(t)
  // Set when t -> phi(x) + beta(t) psi(x) - <f(t), x> is nonincreasing for
  // every fixed x; enables the per-step energy decay check.
  bool nonincreasing_family = false;
  SumOptions inner;
};

enum class StepMode { implicit, forward_backward };

struct IntegrateOptions {
  StepMode mode = StepMode::implicit;
  int substeps = 1;          // inner subdivisions per grid interval
  bool check_energy = true;  // only active for nonincreasing families
};

// One backward step: returns resolvent(A, h, x).
Vec step_implicit(const MonotoneOperator& A, double h, const Vec& x);

// Explicit gradient step on phi, implicit step on beta*B:
//   x+ = resolvent(beta B, h, x - h grad phi(x)).
// Throws StepTooLarge when h * Lip(grad phi) > 1.
Vec step_forward_backward(const ConvexFunction& phi, const MonotoneOperator* B,
                          double beta, double h, const Vec& x);

// Advance x0 across the grid.  Schedule/forcing values are taken at the right
// endpoint of each (sub)step.  Step errors are annotated with the step index.
Trajectory integrate(const FlowProblem& problem, const Vec& x0,
                     const std::vector<double>& grid,
                     const IntegrateOptions& opts = {});

// Translating constraint set C(t) = base + center(t).
struct MovingSet {
  SetPtr base;
  Forcing center;

  SetPtr at(double t) const { return base->translated(center(t)); }
  SetPtr limit() const { return base->translated(center.limit()); }
  int dim() const { return base->dim(); }
};

// Catching-up scheme for  dx/dt + N_{C(t)}(x) + grad phi(x) contains 0:
//   x+ = proj_{C(t+)}(x - h grad phi(x)).    phi may be null.
// Records the discrete kinetic energy sum in the metadata.
Trajectory catching_up(const MovingSet& C, const FunPtr& phi, const Vec& x0,
                       const std::vector<double>& grid);

struct RescaledGrid {
  std::vector<double> s;      // s_k = integral of eps over [grid_0, grid_k]
  std::vector<double> alpha;  // alpha(s_k) = 1 / eps(grid_k)
};

// Time substitution s = \int eps for trading a vanishing weight against a
// growing one on the rescaled clock.
RescaledGrid time_rescale(const Schedule& eps, const std::vector<double>& grid);

// n = round(T/h) uniform intervals covering [0, T] exactly.
std::vector<double> uniform_grid(double T, double h);

}  // namespace monoflow
