#include "monoflow/integrator.hpp"

#include <cmath>
#include <cstdio>

#include "monoflow/errors.hpp"
#include "monoflow/ext_real.hpp"

namespace monoflow {

namespace {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("integrate: empty time grid");
  if (grid.front() < 0) throw ConfigError("integrate: grid starts before t = 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw ConfigError("integrate: grid must be strictly increasing");
}

[[noreturn]] void rethrow_at(const NonConvergence& e, std::size_t step, double t) {
  throw NonConvergence(std::string(e.what()) + " (step " + std::to_string(step) +
                       ", t = " + fmt_g17(t) + ")");
}

}  // namespace

std::optional<std::string> Trajectory::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return std::nullopt;
}

Vec step_implicit(const MonotoneOperator& A, double h, const Vec& x) {
  if (h <= 0) throw ConfigError("step_implicit: step must be positive");
  return A.resolvent(h, x);
}

Vec step_forward_backward(const ConvexFunction& phi, const MonotoneOperator* B,
                          double beta, double h, const Vec& x) {
  if (h <= 0) throw ConfigError("step_forward_backward: step must be positive");
  if (!phi.has_gradient())
    throw ConfigError("step_forward_backward: explicit part needs a gradient");
  double L = phi.gradient_lipschitz();
  if (L > 0 && h * L > 1.0)
    throw StepTooLarge("step_forward_backward: h * Lipschitz(grad) = " +
                       fmt_g17(h * L) + " exceeds 1");
  Vec y = x - h * phi.gradient(x);
  if (!B || beta == 0.0) return y;
  if (beta < 0) throw ConfigError("step_forward_backward: negative weight");
  return B->resolvent(h * beta, y);
}

Trajectory integrate(const FlowProblem& problem, const Vec& x0,
                     const std::vector<double>& grid,
                     const IntegrateOptions& opts) {
  validate_grid(grid);
  if (opts.substeps < 1) throw ConfigError("integrate: substeps must be >= 1");
  const int d = static_cast<int>(x0.size());
  if (problem.A && problem.A->dim() != d)
    throw ConfigError("integrate: operator A dimension mismatch");
  if (problem.B && problem.B->dim() != d)
    throw ConfigError("integrate: operator B dimension mismatch");
  if (problem.forcing && problem.forcing->dim() != d)
    throw ConfigError("integrate: forcing dimension mismatch");
  if (opts.mode == StepMode::forward_backward) {
    if (!problem.phi)
      throw ConfigError("integrate: forward_backward mode needs the smooth potential");
    if (!problem.phi->has_gradient())
      throw ConfigError("integrate: forward_backward potential needs a gradient");
  }

  Schedule beta = problem.beta.value_or(Schedule::constant(1.0));
  auto beta_at = [&](double t) {
    double b = beta(t);
    if (problem.B && b <= 0)
      throw NonPositiveSchedule("integrate: weight schedule nonpositive at t = " +
                                fmt_g17(t));
    return b;
  };

  const bool track_energy = opts.check_energy && problem.nonincreasing_family &&
                            opts.mode == StepMode::implicit &&
                            (problem.phi || problem.psi || problem.forcing);
  auto energy_at = [&](double t, const Vec& x) -> ExtReal {
    ExtReal e = 0.0;
    if (problem.phi) e += problem.phi->value(x);
    if (problem.psi) {
      double b = beta(t);
      if (b > 0) e += b * problem.psi->value(x);
    }
    if (problem.forcing) e += -(*problem.forcing)(t).dot(x);
    return e;
  };
  const double disc_base = 10.0 * problem.inner.inner_tol;

  Trajectory traj;
  traj.times = grid;
  traj.states.reserve(grid.size());
  traj.step_residuals.assign(grid.size(), 0.0);
  traj.states.push_back(x0);

  Vec x = x0;
  double kinetic = 0.0;
  long energy_violations = 0;
  double energy_max_violation = 0.0;
  ExtReal prev_energy = track_energy ? energy_at(grid[0], x) : ExtReal(0.0);

  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h_sub = (grid[k + 1] - grid[k]) / opts.substeps;
    double max_res = 0.0;
    for (int j = 1; j <= opts.substeps; ++j) {
      const double tp = grid[k] + j * h_sub;
      Vec y = x;
      if (problem.forcing) y += h_sub * (*problem.forcing)(tp);
      Vec xn;
      double res = 0.0;
      try {
        if (opts.mode == StepMode::implicit) {
          if (problem.A && problem.B) {
            OpPtr op = sum_operator(problem.A, problem.B, 1.0, beta_at(tp),
                                    problem.inner);
            ResolventInfo info = op->resolvent_info(h_sub, y);
            xn = std::move(info.x);
            res = info.residual;
          } else if (problem.A) {
            ResolventInfo info = problem.A->resolvent_info(h_sub, y);
            xn = std::move(info.x);
            res = info.residual;
          } else if (problem.B) {
            ResolventInfo info = problem.B->resolvent_info(h_sub * beta_at(tp), y);
            xn = std::move(info.x);
            res = info.residual;
          } else {
            xn = std::move(y);
          }
        } else {
          double b = problem.B ? beta_at(tp) : 0.0;
          double L = problem.phi->gradient_lipschitz();
          if (L > 0 && h_sub * L > 1.0)
            throw StepTooLarge("integrate: h * Lipschitz(grad) = " +
                               fmt_g17(h_sub * L) + " exceeds 1");
          Vec yfb = x - h_sub * problem.phi->gradient(x);
          if (problem.forcing) yfb += h_sub * (*problem.forcing)(tp);
          if (problem.B) {
            ResolventInfo info = problem.B->resolvent_info(h_sub * b, yfb);
            xn = std::move(info.x);
            res = info.residual;
          } else {
            xn = std::move(yfb);
          }
        }
      } catch (const NonConvergence& e) {
        rethrow_at(e, k + 1, tp);
      }
      if (!xn.allFinite())
        throw NonConvergence("integrate: non-finite state (step " +
                             std::to_string(k + 1) + ", t = " + fmt_g17(tp) + ")");
      kinetic += (xn - x).squaredNorm() / h_sub;
      max_res = std::max(max_res, res);
      if (track_energy) {
        ExtReal en = energy_at(tp, xn);
        if (en.finite() && prev_energy.finite()) {
          double tol = disc_base * (1.0 + std::abs(prev_energy.finite_value()));
          double gap = en.finite_value() - prev_energy.finite_value();
          if (gap > tol) {
            ++energy_violations;
            energy_max_violation = std::max(energy_max_violation, gap);
          }
        }
        prev_energy = en;
      }
      x = std::move(xn);
    }
    traj.states.push_back(x);
    traj.step_residuals[k + 1] = max_res;
  }

  traj.metadata.emplace_back("mode", opts.mode == StepMode::implicit
                                         ? "implicit"
                                         : "forward_backward");
  traj.metadata.emplace_back("substeps", std::to_string(opts.substeps));
  traj.metadata.emplace_back("kinetic_energy", fmt_g17(kinetic));
  if (track_energy) {
    traj.metadata.emplace_back("energy_violations",
                               std::to_string(energy_violations));
    traj.metadata.emplace_back("energy_max_violation",
                               fmt_g17(energy_max_violation));
  }
  if (problem.A) traj.metadata.emplace_back("operator_a", problem.A->describe());
  if (problem.B) traj.metadata.emplace_back("operator_b", problem.B->describe());
  if (problem.beta) traj.metadata.emplace_back("beta", problem.beta->describe());
  if (problem.forcing)
    traj.metadata.emplace_back("forcing", problem.forcing->describe());
  return traj;
}

Trajectory catching_up(const MovingSet& C, const FunPtr& phi, const Vec& x0,
                       const std::vector<double>& grid) {
  validate_grid(grid);
  if (C.dim() != static_cast<int>(x0.size()))
    throw ConfigError("catching_up: dimension mismatch");
  if (phi && !phi->has_gradient())
    throw ConfigError("catching_up: smooth part needs a gradient");
  SetPtr C0 = C.at(grid[0]);
  if (C0->distance(x0) > 1e-9 * (1.0 + x0.norm()))
    throw InfeasibleStart("catching_up: x0 lies outside C(t0), distance " +
                          fmt_g17(C0->distance(x0)));

  Trajectory traj;
  traj.times = grid;
  traj.step_residuals.assign(grid.size(), 0.0);
  traj.states.reserve(grid.size());
  traj.states.push_back(x0);

  Vec x = x0;
  double kinetic = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h = grid[k + 1] - grid[k];
    Vec y = phi ? Vec(x - h * phi->gradient(x)) : x;
    Vec xn = C.at(grid[k + 1])->project(y);
    kinetic += (xn - x).squaredNorm() / h;
    x = std::move(xn);
    traj.states.push_back(x);
  }
  traj.metadata.emplace_back("mode", "catching_up");
  traj.metadata.emplace_back("kinetic_energy", fmt_g17(kinetic));
  traj.metadata.emplace_back("set", C.base->describe());
  traj.metadata.emplace_back("center", C.center.describe());
  return traj;
}

RescaledGrid time_rescale(const Schedule& eps, const std::vector<double>& grid) {
  validate_grid(grid);
  RescaledGrid out;
  out.s.reserve(grid.size());
  out.alpha.reserve(grid.size());
  double s = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double e = eps(grid[k]);
    if (e <= 0)
      throw NonPositiveSchedule("time_rescale: schedule nonpositive at t = " +
                                fmt_g17(grid[k]));
    if (k > 0) s += eps.integral(grid[k - 1], grid[k]);
    out.s.push_back(s);
    out.alpha.push_back(1.0 / e);
  }
  return out;
}

std::vector<double> uniform_grid(double T, double h) {
  if (T <= 0 || h <= 0) throw ConfigError("uniform_grid: T and h must be positive");
  long long n = std::max(1LL, std::llround(T / h));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long long k = 0; k <= n; ++k)
    grid.push_back(T * static_cast<double>(k) / static_cast<double>(n));
  return grid;
}

}  // namespace monoflow
