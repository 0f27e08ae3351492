#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "monoflow/convex_function.hpp"
#include "monoflow/convex_set.hpp"
#include "monoflow/ext_real.hpp"
#include "monoflow/integrator.hpp"
#include "monoflow/omega.hpp"
#include "monoflow/operators.hpp"
#include "monoflow/schedule.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

// Running time average X_k = (1/(t_k - t_0)) * trapezoid integral of x up to
// t_k; node 0 carries x_0.
Trajectory ergodic_average(const Trajectory& traj);

// d(x_k, S) per node.
std::vector<double> distance_trace(const Trajectory& traj, const ConvexSet& S);

struct EnergyReport {
  std::vector<ExtReal> values;  // phi_{t_k}(x_k) per node
  long violations = 0;          // per-step increases beyond tolerance
  double max_violation = 0.0;
};

// Evaluates a time-indexed energy along the trajectory and flags increases
// larger than 10 * inner_tol * (1 + |previous value|).
EnergyReport energy_trace(const Trajectory& traj,
                          const std::function<ExtReal(double, const Vec&)>& family,
                          double inner_tol = 1e-10);

// Coarse-grid value of sum_k h_k || (x_{k+1} - x_k) / h_k ||^2.
double discrete_kinetic_energy(const Trajectory& traj);

// ||x_k - xi(t_k)|| per node.
std::vector<double> central_path_gap(const Trajectory& traj,
                                     const std::function<Vec(double)>& xi);

struct OpialReport {
  std::vector<std::vector<double>> distances;  // [anchor][node]
  std::vector<double> final_oscillation;       // max - min over the final window
  std::vector<bool> cauchy;                    // oscillation below tolerance
};

// Distance traces to each anchor with an oscillation measure over the final
// window_fraction of the time horizon.
OpialReport opial_monitor(const Trajectory& traj, const std::vector<Vec>& anchors,
                          double window_fraction = 0.2, double cauchy_tol = 1e-3);

enum class Verdict { summable, divergent, inconclusive };

std::string verdict_name(Verdict v);

struct ConditionVerdict {
  std::string condition_id;
  std::vector<double> partial_sums;      // tail-corrected when a tail fit applied
  std::vector<double> raw_partial_sums;  // plain truncated integrals per horizon
  double tail_exponent;                  // NaN when no fit was made
  Verdict verdict = Verdict::inconclusive;
  std::string evidence;
};

struct CheckOptions {
  std::vector<double> horizons{1e2, 1e3, 1e4};
  int nodes_per_decade = 256;
  double cauchy_tol = 1e-3;           // relative gap between the last horizons
  double divergence_threshold = 1e6;  // partial sums beyond this diverge
  double exponent_band = 0.05;        // half-width of the critical band at -1
};

// Numerical summability protocol: composite trapezoid on a log-spaced grid,
// relative Cauchy test across horizons, and a log-log tail fit over the final
// decade.  A fitted exponent e <= -(1 + band) adds the extrapolated tail
// integral to the partial sums before the Cauchy test; e > -(1 + band) with a
// positive tail is classified divergent.
ConditionVerdict check_condition(const std::string& condition_id,
                                 const std::function<double(double)>& integrand,
                                 const CheckOptions& opts = {});

// Everything the named condition integrands can draw on.  Only the fields a
// given condition needs must be set; missing ingredients raise NoEvaluator.
struct ConditionIngredients {
  OpPtr op;                            // limit operator (C1, C2, C3)
  std::optional<Forcing> offset_path;  // graph-offset drift in C1
  SetPtr set_c;                        // reference set (C3, C4, L1_F, L2_perp)
  FunPtr psi;                          // (C4, C6)
  FunPtr phi;                          // (C5, C6)
  std::optional<Schedule> beta;        // weight (C2, C3, C4, C6, C7)
  std::optional<Schedule> schedule;    // slow_eps / slow_alpha
  std::optional<Forcing> forcing;      // (C5, L1_F, L2_perp)
  Vec z, p, q;                         // reference point and dual offsets
  OmegaOptions omega;                  // inner solver settings (C6, C7)
};

// Builds t -> integrand(t) for condition_id in {C1..C7, slow_eps, slow_alpha,
// L1_F, L2_perp}.  Values are clamped at 0; infinite ingredient values
// surface as huge integrand values and drive the divergence branch.
std::function<double(double)> make_condition_integrand(
    const std::string& condition_id, const ConditionIngredients& ing);

}  // namespace monoflow
