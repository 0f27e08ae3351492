#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include <monoflow/convex_function.hpp>
#include <monoflow/convex_set.hpp>
#include <monoflow/diagnostics.hpp>
#include <monoflow/errors.hpp>
#include <monoflow/integrator.hpp>
#include <monoflow/operators.hpp>
#include <monoflow/schedule.hpp>

#include "oracles.hpp"

using namespace monoflow;

namespace {
Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Trajectory ramp() {
  Trajectory t;
  t.times = {0.0, 1.0, 2.0};
  t.states = {v1(0.0), v1(2.0), v1(4.0)};
  t.step_residuals = {0.0, 0.0, 0.0};
  return t;
}
}  // namespace

TEST_CASE("ergodic average of a linear ramp, pinned") {
  auto avg = ergodic_average(ramp());
  REQUIRE(avg.size() == 3);
  CHECK(avg.states[0][0] == 0.0);           // node 0 carries x0
  CHECK(avg.states[1][0] == doctest::Approx(1.0));  // mean of 0..2
  CHECK(avg.states[2][0] == doctest::Approx(2.0));  // mean of 0..4
  CHECK(avg.times == ramp().times);
}

TEST_CASE("distance trace against a reference set") {
  auto d = distance_trace(ramp(), *set_box(v1(1.0), v1(3.0)));
  REQUIRE(d.size() == 3);
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(0.0));
  CHECK(d[2] == doctest::Approx(1.0));
}

TEST_CASE("discrete kinetic energy of the ramp, pinned") {
  // two unit steps of slope 2: sum h |dx/h|^2 = 4 + 4
  CHECK(discrete_kinetic_energy(ramp()) == doctest::Approx(8.0));
  Trajectory t;
  t.times = {0.0, 2.0};
  t.states = {v1(0.0), v1(3.0)};
  // h = 2, slope 1.5: 2 * 2.25 = 4.5
  CHECK(discrete_kinetic_energy(t) == doctest::Approx(4.5));
}

TEST_CASE("energy trace counts only increases above tolerance") {
  auto flat = [](double, const Vec& x) { return ExtReal(x[0]); };
  auto rep = energy_trace(ramp(), flat, 1e-10);
  REQUIRE(rep.values.size() == 3);
  CHECK(rep.values[2].finite_value() == doctest::Approx(4.0));
  CHECK(rep.violations == 2);  // the ramp increases twice
  CHECK(rep.max_violation == doctest::Approx(2.0));

  auto decay = [](double t, const Vec&) { return ExtReal(-t); };
  auto ok = energy_trace(ramp(), decay, 1e-10);
  CHECK(ok.violations == 0);
  CHECK(ok.max_violation == 0.0);

  // a tiny bump below 10 * tol * (1 + |prev|) is forgiven
  auto wobble = [](double t, const Vec&) {
    return ExtReal(t == 1.0 ? 5e-10 : 0.0);
  };
  CHECK(energy_trace(ramp(), wobble, 1e-10).violations == 0);
}

TEST_CASE("central path gap against a moving target") {
  auto xi = [](double t) { return v1(2.0 * t); };
  auto gap = central_path_gap(ramp(), xi);
  REQUIRE(gap.size() == 3);
  for (double g : gap) CHECK(g == doctest::Approx(0.0));

  auto off = central_path_gap(ramp(), [](double) { return v1(1.0); });
  CHECK(off[0] == doctest::Approx(1.0));
  CHECK(off[2] == doctest::Approx(3.0));
}

TEST_CASE("oscillation monitor separates converged from orbiting runs") {
  // converging trajectory: distances to the anchor settle
  Trajectory conv;
  for (int k = 0; k <= 100; ++k) {
    conv.times.push_back(0.1 * k);
    conv.states.push_back(v2(std::exp(-0.1 * k), 0.0));
  }
  auto rep = opial_monitor(conv, {v2(0.0, 0.0)}, 0.2, 1e-3);
  REQUIRE(rep.distances.size() == 1);
  REQUIRE(rep.distances[0].size() == conv.size());
  CHECK(rep.cauchy[0]);
  CHECK(rep.final_oscillation[0] < 1e-3);

  // orbiting trajectory: distance to an off-center anchor keeps swinging
  Trajectory orb;
  for (int k = 0; k <= 400; ++k) {
    double t = 0.1 * k;
    orb.times.push_back(t);
    orb.states.push_back(v2(std::cos(t), std::sin(t)));
  }
  auto rep2 = opial_monitor(orb, {v2(0.0, 0.0), v2(1.0, 0.0)}, 0.25, 1e-3);
  CHECK(rep2.cauchy[0]);        // |x_k| is constant
  CHECK_FALSE(rep2.cauchy[1]);  // distance to (1,0) oscillates by ~2
  CHECK(rep2.final_oscillation[1] > 1.5);
}

TEST_CASE("summability protocol calibrated on power integrands") {
  CheckOptions o;
  for (double p : {-3.0, -2.0, -1.5, -1.2, -1.1}) {
    CAPTURE(p);
    auto v = check_condition("cal", [p](double t) { return std::pow(1.0 + t, p); }, o);
    CHECK(v.verdict == Verdict::summable);
    if (!std::isnan(v.tail_exponent))
      CHECK(v.tail_exponent == doctest::Approx(p).epsilon(0.02));
    // the tail-corrected sums approach the exact integral 1/(-1-p)
    CHECK(v.partial_sums.back() ==
          doctest::Approx(1.0 / (-1.0 - p)).epsilon(0.02));
  }
  for (double p : {-0.9, -0.5, 0.0}) {
    CAPTURE(p);
    auto v = check_condition("cal", [p](double t) { return std::pow(1.0 + t, p); }, o);
    CHECK(v.verdict == Verdict::divergent);
    CHECK(v.raw_partial_sums.back() > v.raw_partial_sums.front());
  }
  // the borderline case sits inside the declared band and must not be
  // reported summable; the fitted exponent lands at -1
  auto b = check_condition("cal", [](double t) { return 1.0 / (1.0 + t); }, o);
  CHECK(b.verdict == Verdict::divergent);
  CHECK(b.tail_exponent == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("summability protocol handles flat, explosive, and exact cases") {
  CheckOptions o;
  auto zero = check_condition("z", [](double) { return 0.0; }, o);
  CHECK(zero.verdict == Verdict::summable);
  CHECK(zero.raw_partial_sums.back() == 0.0);

  auto big = check_condition("b", [](double) { return 1e7; }, o);
  CHECK(big.verdict == Verdict::divergent);

  // exponential decay converges numerically before any tail fit is needed
  auto e = check_condition("e", [](double t) { return std::exp(-t); }, o);
  CHECK(e.verdict == Verdict::summable);
  CHECK(e.partial_sums.back() == doctest::Approx(1.0).epsilon(1e-3));

  // a NaN integrand value is a numerical failure, not a verdict
  CHECK_THROWS_AS(
      check_condition(
          "n",
          [](double t) {
            return t > 50.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
          },
          o),
      NonConvergence);
}

TEST_CASE("summability protocol rejects bad options") {
  auto one = [](double) { return 1.0; };
  CheckOptions o;
  o.horizons = {};
  CHECK_THROWS_AS(check_condition("x", one, o), ConfigError);
  o = CheckOptions{};
  o.horizons = {100.0, 10.0};
  CHECK_THROWS_AS(check_condition("x", one, o), ConfigError);
  o = CheckOptions{};
  o.nodes_per_decade = 0;
  CHECK_THROWS_AS(check_condition("x", one, o), ConfigError);
}

TEST_CASE("graph-offset integrand vanishes on constant paths") {
  ConditionIngredients ing;
  ing.op = op_scaled_identity(2, 2.0);
  ing.z = v2(1.0, 0.0);
  ing.p = v2(2.0, 0.0);  // exactly 2 * z: a graph point
  ing.offset_path = Forcing::constant(Vec::Zero(2));
  auto f = make_condition_integrand("C1", ing);
  CHECK(f(0.0) == doctest::Approx(0.0));
  CHECK(f(7.0) == doctest::Approx(0.0));

  // with a decaying deviation d(t) the scaled-identity gap is |d|^2 / (4c)
  ing.offset_path = Forcing(Vec::Zero(2), v2(1.0, 0.0), Schedule::exp_decay(1.0, 1.0));
  auto g = make_condition_integrand("C1", ing);
  for (double t : {0.0, 1.0, 3.0}) {
    double dev = std::exp(-t);
    CHECK(g(t) == doctest::Approx(dev * dev / 8.0).epsilon(1e-10));
  }
}

TEST_CASE("weighted gap integrand for a scaled identity, closed form") {
  // beta * gap(z, q / beta) with gap(x,u) = |u - cx|^2 / (4c), z = 0, c = 1:
  // beta * |q|^2 / (4 beta^2) = |q|^2 / (4 beta)
  ConditionIngredients ing;
  ing.op = op_scaled_identity(1, 1.0);
  ing.z = v1(0.0);
  ing.q = v1(1.0);
  ing.beta = Schedule::power(1.0, 1.0);
  auto f = make_condition_integrand("C2", ing);
  for (double t : {0.0, 1.0, 9.0})
    CHECK(f(t) == doctest::Approx(0.25 / (1.0 + t)).epsilon(1e-12));
}

TEST_CASE("support-compensated integrand vanishes for normal cones") {
  // u in the dual ball: gap(z,u) = sigma_C(u) - <z,u> exactly cancels the
  // compensation term, so the integrand is identically zero
  ConditionIngredients ing;
  ing.op = op_normal_cone(set_ball(v2(0.0, 0.0), 1.0));
  ing.set_c = set_ball(v2(0.0, 0.0), 1.0);
  ing.z = v2(0.3, 0.1);
  ing.q = v2(0.5, -0.2);
  ing.beta = Schedule::constant(2.0);
  auto f = make_condition_integrand("C3", ing);
  CHECK(f(0.0) == doctest::Approx(0.0));
  CHECK(f(11.0) == doctest::Approx(0.0));

  // scaled identity against the same ball: beta * (gap + <z,u> - sigma(u))
  ConditionIngredients ing2 = ing;
  ing2.op = op_scaled_identity(2, 1.0);
  auto g = make_condition_integrand("C3", ing2);
  double beta = 2.0;
  Vec u = ing.q / beta;
  double expect = beta * ((u - ing.z).squaredNorm() / 4.0 +
                          ing.z.dot(u) - u.norm());
  if (expect < 0) expect = 0;
  CHECK(g(3.0) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("conjugate-support integrand on the channel potential") {
  // psi*(p/beta) - sigma_C(p/beta) with p = (0, beta v): psi*(0, v) =
  // a^2 v^2 / 2 and sigma over the flat box is 0, so at v = p2/beta the
  // integrand is beta * a^2 p2^2 / (2 beta^2) = a^2 p2^2 / (2 beta)
  ConditionIngredients ing;
  ing.psi = fn_channel_quadratic(2.0);
  ing.set_c = set_box(v2(-1.0, 0.0), v2(1.0, 0.0));
  ing.p = v2(0.0, 1.0);
  ing.beta = Schedule::power(1.0, 1.0);
  auto f = make_condition_integrand("C4", ing);
  for (double t : {0.0, 3.0})
    CHECK(f(t) == doctest::Approx(2.0 / (1.0 + t)).epsilon(1e-10));
}

TEST_CASE("Fenchel-residual integrand for a forced quadratic") {
  // phi = |x|^2/2: phi(z) + phi*(f) - <z,f> = |z - f|^2 / 2; with z = 0 the
  // integrand is |f(t)|^2 / 2
  ConditionIngredients ing;
  ing.phi = fn_norm_sq(2);
  ing.z = v2(0.0, 0.0);
  ing.forcing = Forcing(Vec::Zero(2), v2(1.0, 1.0), Schedule::exp_decay(1.0, 0.5));
  auto f = make_condition_integrand("C5", ing);
  for (double t : {0.0, 2.0}) {
    double s = std::exp(-0.5 * t);
    CHECK(f(t) == doctest::Approx(s * s).epsilon(1e-10));
  }
}

TEST_CASE("value-gap integrand matches the weighted minimum at the origin") {
  // phi(z) + beta psi(z) - beta omega(1/beta) at z = (0,0): phi = 0, psi = 0,
  // omega(eps) = -a^2 eps^2/2 = -2/beta^2, so the integrand is 2/beta
  ConditionIngredients ing;
  ing.psi = fn_channel_quadratic(2.0);
  ing.phi = fn_channel_tilt(1.0);
  ing.z = v2(0.0, 0.0);
  ing.beta = Schedule::power(1.0, 2.0);
  auto f = make_condition_integrand("C6", ing);
  for (double t : {0.0, 1.0, 4.0}) {
    double beta = (1.0 + t) * (1.0 + t);
    CHECK(f(t) == doctest::Approx(2.0 / beta).epsilon(1e-6));
  }
}

TEST_CASE("weighted-minimum magnitude integrand drives the dichotomy") {
  ConditionIngredients ing;
  ing.psi = fn_channel_quadratic(2.0);
  ing.phi = fn_channel_tilt(1.0);
  CheckOptions fast;
  fast.horizons = {1e1, 1e2, 1e3};
  fast.nodes_per_decade = 48;

  // beta = (1+t)^2: integrand ~ 2/(1+t)^2, summable
  ing.beta = Schedule::power(1.0, 2.0);
  auto quad = check_condition("C7", make_condition_integrand("C7", ing), fast);
  CHECK(quad.verdict == Verdict::summable);

  // beta = 1+t: integrand ~ 2/(1+t), divergent
  ing.beta = Schedule::power(1.0, 1.0);
  auto lin = check_condition("C7", make_condition_integrand("C7", ing), fast);
  CHECK(lin.verdict == Verdict::divergent);
}

TEST_CASE("schedule integrands report the schedule value") {
  ConditionIngredients ing;
  ing.schedule = Schedule::power(1.0, -2.0);
  auto f = make_condition_integrand("slow_eps", ing);
  CHECK(f(1.0) == doctest::Approx(0.25));
  auto v = check_condition("slow_eps", f);
  CHECK(v.verdict == Verdict::summable);

  ing.schedule = Schedule::power(1.0, -1.0);
  auto g = make_condition_integrand("slow_alpha", ing);
  auto w = check_condition("slow_alpha", g);
  CHECK(w.verdict == Verdict::divergent);
}

TEST_CASE("forcing-split integrands see only their own component") {
  // C = the x-axis segment: F spans e1; deviation along e1 is an L1 term,
  // deviation along e2 is squared
  ConditionIngredients ing;
  ing.set_c = set_box(v2(-1.0, 0.0), v2(1.0, 0.0));
  ing.forcing = Forcing(Vec::Zero(2), v2(3.0, 4.0), Schedule::exp_decay(1.0, 1.0));
  auto f1 = make_condition_integrand("L1_F", ing);
  auto f2 = make_condition_integrand("L2_perp", ing);
  for (double t : {0.0, 1.0}) {
    double s = std::exp(-t);
    CHECK(f1(t) == doctest::Approx(3.0 * s).epsilon(1e-10));
    CHECK(f2(t) == doctest::Approx(16.0 * s * s).epsilon(1e-10));
  }
}

TEST_CASE("integrand factory rejects missing ingredients and unknown names") {
  ConditionIngredients empty;
  CHECK_THROWS_AS(make_condition_integrand("C1", empty), ConfigError);
  CHECK_THROWS_AS(make_condition_integrand("C4", empty), ConfigError);
  CHECK_THROWS_AS(make_condition_integrand("C6", empty), ConfigError);
  CHECK_THROWS_AS(make_condition_integrand("slow_eps", empty), ConfigError);
  CHECK_THROWS_AS(make_condition_integrand("C99", empty), ConfigError);
}
