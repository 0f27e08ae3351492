#include "monoflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "monoflow/errors.hpp"
#include "monoflow/linalg.hpp"

namespace monoflow {

namespace {

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

Trajectory ergodic_average(const Trajectory& traj) {
  if (traj.states.empty()) throw ConfigError("ergodic_average: empty trajectory");
  Trajectory out;
  out.times = traj.times;
  out.step_residuals.assign(traj.times.size(), 0.0);
  out.states.reserve(traj.states.size());
  out.states.push_back(traj.states[0]);
  Vec integral = Vec::Zero(traj.dim());
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    double dt = traj.times[k] - traj.times[k - 1];
    integral += 0.5 * dt * (traj.states[k - 1] + traj.states[k]);
    out.states.push_back(integral / (traj.times[k] - traj.times[0]));
  }
  out.metadata.emplace_back("mode", "ergodic_average");
  return out;
}

std::vector<double> distance_trace(const Trajectory& traj, const ConvexSet& S) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const Vec& x : traj.states) out.push_back(S.distance(x));
  return out;
}

EnergyReport energy_trace(const Trajectory& traj,
                          const std::function<ExtReal(double, const Vec&)>& family,
                          double inner_tol) {
  EnergyReport rep;
  rep.values.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    rep.values.push_back(family(traj.times[k], traj.states[k]));
    if (k == 0) continue;
    const ExtReal& prev = rep.values[k - 1];
    const ExtReal& cur = rep.values[k];
    if (!prev.finite() || !cur.finite()) continue;
    double tol = 10.0 * inner_tol * (1.0 + std::abs(prev.finite_value()));
    double gap = cur.finite_value() - prev.finite_value();
    if (gap > tol) {
      ++rep.violations;
      rep.max_violation = std::max(rep.max_violation, gap);
    }
  }
  return rep;
}

double discrete_kinetic_energy(const Trajectory& traj) {
  double sum = 0.0;
  for (std::size_t k = 1; k < traj.states.size(); ++k)
    sum += (traj.states[k] - traj.states[k - 1]).squaredNorm() /
           (traj.times[k] - traj.times[k - 1]);
  return sum;
}

std::vector<double> central_path_gap(const Trajectory& traj,
                                     const std::function<Vec(double)>& xi) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    out.push_back((traj.states[k] - xi(traj.times[k])).norm());
  return out;
}

OpialReport opial_monitor(const Trajectory& traj, const std::vector<Vec>& anchors,
                          double window_fraction, double cauchy_tol) {
  if (anchors.empty()) throw ConfigError("opial_monitor: no anchors");
  if (traj.states.empty()) throw ConfigError("opial_monitor: empty trajectory");
  OpialReport rep;
  double T0 = traj.times.front(), T = traj.times.back();
  double t_win = T - window_fraction * (T - T0);
  for (const Vec& z : anchors) {
    std::vector<double> d;
    d.reserve(traj.states.size());
    for (const Vec& x : traj.states) d.push_back((x - z).norm());
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (traj.times[k] < t_win) continue;
      lo = std::min(lo, d[k]);
      hi = std::max(hi, d[k]);
    }
    double osc = hi >= lo ? hi - lo : 0.0;
    rep.final_oscillation.push_back(osc);
    rep.cauchy.push_back(osc <= cauchy_tol * (1.0 + d.back()));
    rep.distances.push_back(std::move(d));
  }
  return rep;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::summable: return "summable";
    case Verdict::divergent: return "divergent";
    default: return "inconclusive";
  }
}

ConditionVerdict check_condition(const std::string& condition_id,
                                 const std::function<double(double)>& integrand,
                                 const CheckOptions& opts) {
  if (opts.horizons.size() < 2)
    throw ConfigError("check_condition: needs at least two horizons");
  for (std::size_t i = 0; i < opts.horizons.size(); ++i) {
    if (opts.horizons[i] < 1.0)
      throw ConfigError("check_condition: horizons must be >= 1");
    if (i > 0 && opts.horizons[i] <= opts.horizons[i - 1])
      throw ConfigError("check_condition: horizons must increase");
  }
  if (opts.nodes_per_decade < 8)
    throw ConfigError("check_condition: nodes_per_decade too small");

  const double Tmax = opts.horizons.back();
  std::vector<double> nodes;
  for (int i = 0; i <= opts.nodes_per_decade; ++i)
    nodes.push_back(static_cast<double>(i) / opts.nodes_per_decade);
  const double inv = 1.0 / opts.nodes_per_decade;
  for (long i = 1;; ++i) {
    double t = std::pow(10.0, i * inv);
    if (t >= Tmax * (1.0 - 1e-12)) {
      nodes.push_back(Tmax);
      break;
    }
    nodes.push_back(t);
  }
  for (double h : opts.horizons) nodes.push_back(h);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <= 1e-9 * std::max(1.0, b);
                          }),
              nodes.end());

  std::vector<double> g(nodes.size()), cum(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    g[k] = integrand(nodes[k]);
    if (std::isnan(g[k]))
      throw NonConvergence("check_condition: integrand NaN at t = " +
                           sci(nodes[k]));
    cum[k] = k == 0 ? 0.0 : cum[k - 1] + 0.5 * (g[k - 1] + g[k]) *
                                             (nodes[k] - nodes[k - 1]);
  }

  ConditionVerdict out;
  out.condition_id = condition_id;
  out.tail_exponent = std::numeric_limits<double>::quiet_NaN();
  for (double h : opts.horizons) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), h * (1.0 - 1e-9));
    out.raw_partial_sums.push_back(cum[static_cast<std::size_t>(it - nodes.begin())]);
  }
  out.partial_sums = out.raw_partial_sums;
  std::ostringstream ev;

  const double S_last = out.raw_partial_sums[out.raw_partial_sums.size() - 1];
  const double S_prev = out.raw_partial_sums[out.raw_partial_sums.size() - 2];
  if (S_last > opts.divergence_threshold) {
    out.verdict = Verdict::divergent;
    ev << "partial sum " << sci(S_last) << " exceeds "
       << sci(opts.divergence_threshold) << " by T = " << sci(Tmax);
    out.evidence = ev.str();
    return out;
  }
  double rel_gap = std::abs(S_last - S_prev) /
                   std::max(std::abs(S_last), std::numeric_limits<double>::min());
  if (S_last == 0.0 || rel_gap < opts.cauchy_tol) {
    out.verdict = Verdict::summable;
    ev << "raw partial sums Cauchy (relative gap " << sci(rel_gap)
       << " across the last two horizons)";
    out.evidence = ev.str();
    return out;
  }

  // log-log least-squares fit of the integrand over the final decade
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (nodes[k] >= Tmax / 10.0 * (1.0 - 1e-12) && g[k] > 0.0) {
      lx.push_back(std::log(nodes[k]));
      ly.push_back(std::log(g[k]));
    }
  if (lx.size() < 8) {
    out.verdict = Verdict::inconclusive;
    out.evidence = "partial sums not Cauchy and too few positive tail samples "
                   "for an exponent fit";
    return out;
  }
  double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  double denom = n * sxx - sx * sx;
  double e = (n * sxy - sx * sy) / denom;
  double c = (sy - e * sx) / n;
  out.tail_exponent = e;

  if (e <= -(1.0 + opts.exponent_band)) {
    double C = std::exp(c);
    for (std::size_t i = 0; i < opts.horizons.size(); ++i)
      out.partial_sums[i] = out.raw_partial_sums[i] +
                            C * std::pow(opts.horizons[i], e + 1.0) / (-e - 1.0);
    double C_last = out.partial_sums[out.partial_sums.size() - 1];
    double C_prev = out.partial_sums[out.partial_sums.size() - 2];
    double crel = std::abs(C_last - C_prev) /
                  std::max(std::abs(C_last), std::numeric_limits<double>::min());
    if (crel < opts.cauchy_tol) {
      out.verdict = Verdict::summable;
      ev << "tail-corrected partial sums Cauchy (exponent " << sci(e)
         << ", relative gap " << sci(crel) << ")";
    } else {
      out.verdict = Verdict::inconclusive;
      ev << "tail exponent " << sci(e)
         << " but corrected partial sums not Cauchy (relative gap " << sci(crel)
         << ")";
    }
    out.evidence = ev.str();
    return out;
  }

  out.verdict = Verdict::divergent;
  ev << "positive tail with fitted exponent " << sci(e) << " above "
     << sci(-(1.0 + opts.exponent_band));
  out.evidence = ev.str();
  return out;
}

std::function<double(double)> make_condition_integrand(
    const std::string& condition_id, const ConditionIngredients& ing) {
  const double INF = std::numeric_limits<double>::infinity();

  auto need_beta = [&]() -> Schedule {
    if (!ing.beta)
      throw ConfigError("condition " + condition_id + " needs a weight schedule");
    return *ing.beta;
  };
  auto beta_value = [condition_id](const Schedule& b, double t) {
    double v = b(t);
    if (v <= 0)
      throw NonPositiveSchedule("condition " + condition_id +
                                ": weight nonpositive at t = " + std::to_string(t));
    return v;
  };
  auto need_gap_op = [&]() -> OpPtr {
    if (!ing.op) throw ConfigError("condition " + condition_id + " needs an operator");
    if (!ing.op->has_exact_gap())
      throw NoEvaluator("condition " + condition_id +
                        " needs a closed-form graph-gap oracle");
    return ing.op;
  };
  auto need_support_set = [&]() -> SetPtr {
    if (!ing.set_c) throw ConfigError("condition " + condition_id + " needs a set");
    if (!ing.set_c->has_support())
      throw NoEvaluator("condition " + condition_id + " needs a support oracle");
    return ing.set_c;
  };

  if (condition_id == "C1") {
    OpPtr op = need_gap_op();
    Vec z = ing.z, p = ing.p;
    std::optional<Forcing> path = ing.offset_path;
    return [op, z, p, path](double t) {
      Vec u = path ? Vec(p + path->deviation(t)) : p;
      return clamp0(op->exact_gap(z, u).as_double());
    };
  }
  if (condition_id == "C2") {
    OpPtr op = need_gap_op();
    Schedule b = need_beta();
    Vec z = ing.z, q = ing.q;
    return [op, b, z, q, beta_value](double t) {
      double bt = beta_value(b, t);
      return bt * clamp0(op->exact_gap(z, q / bt).as_double());
    };
  }
  if (condition_id == "C3") {
    OpPtr op = need_gap_op();
    SetPtr C = need_support_set();
    Schedule b = need_beta();
    Vec z = ing.z, q = ing.q;
    return [op, C, b, z, q, beta_value, INF](double t) {
      double bt = beta_value(b, t);
      Vec u = q / bt;
      ExtReal gap = op->exact_gap(z, u);
      ExtReal sup = C->support(u);
      if (sup.is_pos_inf()) return gap.is_pos_inf() ? INF : 0.0;
      if (gap.is_pos_inf()) return INF;
      return bt * clamp0(gap.finite_value() + z.dot(u) - sup.finite_value());
    };
  }
  if (condition_id == "C4") {
    if (!ing.psi || !ing.psi->has_conjugate())
      throw NoEvaluator("condition C4 needs a conjugate oracle");
    SetPtr C = need_support_set();
    Schedule b = need_beta();
    FunPtr psi = ing.psi;
    Vec p = ing.p;
    return [psi, C, b, p, beta_value, INF](double t) {
      double bt = beta_value(b, t);
      Vec u = p / bt;
      ExtReal conj = psi->conjugate(u);
      if (conj.is_pos_inf()) return INF;
      ExtReal sup = C->support(u);
      if (sup.is_pos_inf()) return 0.0;
      return bt * clamp0(conj.finite_value() - sup.finite_value());
    };
  }
  if (condition_id == "C5") {
    if (!ing.phi || !ing.phi->has_conjugate())
      throw NoEvaluator("condition C5 needs a conjugate oracle");
    if (!ing.forcing) throw ConfigError("condition C5 needs a forcing path");
    FunPtr phi = ing.phi;
    Forcing f = *ing.forcing;
    ExtReal vz = phi->value(ing.z);
    Vec z = ing.z;
    return [phi, f, vz, z, INF](double t) {
      if (vz.is_pos_inf()) return INF;
      Vec ft = f(t);
      ExtReal conj = phi->conjugate(ft);
      if (conj.is_pos_inf()) return INF;
      return clamp0(vz.finite_value() + conj.finite_value() - z.dot(ft));
    };
  }
  if (condition_id == "C6" || condition_id == "C7") {
    if (!ing.psi || !ing.phi)
      throw ConfigError("condition " + condition_id + " needs both potentials");
    Schedule b = need_beta();
    FunPtr psi = ing.psi, phi = ing.phi;
    OmegaOptions oo = ing.omega;
    if (condition_id == "C7") {
      return [psi, phi, b, oo, beta_value, INF](double t) {
        double bt = beta_value(b, t);
        ExtReal w = omega_primal(psi, phi, 1.0 / bt, oo).primal_value;
        if (!w.finite()) return INF;
        double av = std::abs(w.finite_value());
        // Below the inner solver's value resolution the infimum is an exact
        // zero; without the floor, bt * rounding-noise fakes a growing tail.
        if (av <= 1e-12) return 0.0;
        return bt * av;
      };
    }
    ExtReal phi_z = ing.phi->value(ing.z);
    ExtReal psi_z = ing.psi->value(ing.z);
    return [psi, phi, b, oo, phi_z, psi_z, beta_value, INF](double t) {
      if (phi_z.is_pos_inf() || psi_z.is_pos_inf()) return INF;
      double bt = beta_value(b, t);
      ExtReal w = omega_primal(psi, phi, 1.0 / bt, oo).primal_value;
      if (!w.finite()) return INF;
      return clamp0(phi_z.finite_value() + bt * psi_z.finite_value() -
                    bt * w.finite_value());
    };
  }
  if (condition_id == "slow_eps" || condition_id == "slow_alpha") {
    if (!ing.schedule)
      throw ConfigError("condition " + condition_id + " needs a schedule");
    Schedule s = *ing.schedule;
    return [s](double t) { return clamp0(s(t)); };
  }
  if (condition_id == "L1_F" || condition_id == "L2_perp") {
    if (!ing.set_c)
      throw ConfigError("condition " + condition_id + " needs the limit set");
    if (!ing.forcing)
      throw ConfigError("condition " + condition_id + " needs a forcing path");
    SubspaceSplit sp = subspace_split(*ing.set_c);
    Forcing f = *ing.forcing;
    if (condition_id == "L1_F") {
      Mat F = sp.F;
      return [F, f](double t) { return (F.transpose() * f.deviation(t)).norm(); };
    }
    Mat Fp = sp.Fperp;
    return [Fp, f](double t) {
      return (Fp.transpose() * f.deviation(t)).squaredNorm();
    };
  }
  throw ConfigError("unknown condition id: " + condition_id);
}

}  // namespace monoflow
