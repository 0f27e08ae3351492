#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <monoflow/config.hpp>
#include <monoflow/errors.hpp>
#include <monoflow/experiments.hpp>
#include <monoflow/pde1d.hpp>

#include "oracles.hpp"

using namespace monoflow;

namespace {

double metric(const RunSummary& run, const std::string& key) {
  for (const auto& [k, v] : run.metrics)
    if (k == key) return v;
  FAIL("missing metric: " << key);
  return 0.0;
}

bool has_metric(const RunSummary& run, const std::string& key) {
  for (const auto& [k, v] : run.metrics)
    if (k == key) return true;
  return false;
}

const ConditionVerdict* verdict_of(const RunSummary& run, const std::string& id) {
  for (const auto& c : run.conditions)
    if (c.condition_id == id) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("every scenario ships a default parameter set") {
  for (const char* s : {"two_d", "pde_neumann", "tikhonov", "sweeping",
                        "quasi_autonomous", "rotation_ergodic"}) {
    auto cfg = default_config(s);
    CHECK(cfg.scenario == s);
    CHECK(cfg.num.count("T") == 1);
    CHECK(cfg.num.count("h") == 1);
  }
  CHECK(default_config("custom").num.empty());
  CHECK_THROWS_AS(default_config("nosuch"), ConfigError);
}

TEST_CASE("coupled 2D run reports the expected metric set") {
  auto cfg = default_config("two_d");
  cfg.num["T"] = 50.0;
  cfg.num["h"] = 0.02;
  auto run = run_scenario(cfg);
  CHECK(run.scenario == "two_d");
  CHECK(run.trajectory.size() > 100);
  for (const char* k :
       {"final_x", "final_y", "final_norm", "dist_box", "central_gap_final",
        "central_gap_final_decade_max", "omega_gap_vs_closed_form",
        "strong_min_violations", "strong_min_min_margin", "kinetic_energy"})
    CHECK(has_metric(run, k));
  CHECK(verdict_of(run, "C7") != nullptr);
  CHECK(metric(run, "strong_min_violations") == 0.0);
  CHECK(metric(run, "omega_gap_vs_closed_form") < 1e-8);
  // beta = (1+t)^2 drives only y to 0; x settles inside [-1,1]
  CHECK(std::abs(metric(run, "final_y")) < 0.05);
  CHECK(metric(run, "dist_box") < 0.05);
}

TEST_CASE("grid refinement delta is reported on request") {
  auto cfg = default_config("two_d");
  cfg.num["T"] = 20.0;
  cfg.num["h"] = 0.05;
  cfg.refine = true;
  auto run = run_scenario(cfg);
  REQUIRE(run.grid_refinement_delta.has_value());
  CHECK(*run.grid_refinement_delta < 0.05);
  CHECK(has_metric(run, "grid_refinement_delta"));
}

TEST_CASE("discrete Neumann solution matches the separable closed form") {
  // cosine forcing is an exact eigenvector of the mirrored-ghost second
  // difference, so u_hat = (c/mu) cos(pi x) with the discrete eigenvalue mu
  const int N = 16;
  const double c = 25.0;
  auto g = pde_grid(N);
  double mu = (2.0 - 2.0 * std::cos(M_PI * g.dx)) / (g.dx * g.dx);
  auto p = pde_problem(N, -1.0, 1.0, pde_cosine_forcing(g, c));
  Vec expect(N + 1);
  for (int i = 0; i <= N; ++i) expect[i] = c / mu * std::cos(M_PI * g.x[i]);
  CHECK((p.u_hat - expect).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(std::abs(p.mean_removed) < 1e-12);
  CHECK(std::abs(pde_mean(p, p.u_hat)) < 1e-12);

  // forcing with a nonzero weighted mean is rejected outright
  Vec ones = Vec::Ones(N + 1);
  CHECK_THROWS_AS(pde_problem(N, -1.0, 1.0, ones), NonZeroMeanForcing);
  CHECK_THROWS_AS(pde_problem(N, 1.0, -1.0, pde_cosine_forcing(g, c)),
                  ConfigError);
}

TEST_CASE("obstacle classification against its own bisection oracle") {
  const int N = 16;
  auto g = pde_grid(N);
  double mu = (2.0 - 2.0 * std::cos(M_PI * g.dx)) / (g.dx * g.dx);

  // large forcing: the spread 2c/mu exceeds b - a = 2
  auto big = pde_problem(N, -1.0, 1.0, pde_cosine_forcing(g, 25.0));
  auto cls = pde_classify(big);
  CHECK(cls.kind == PdeCase::spread_exceeds);
  CHECK(cls.spread == doctest::Approx(2.0 * 25.0 / mu).epsilon(1e-10));
  // theta is strictly increasing; bracket and bisect it independently
  double lo = -5.0, hi = 5.0;
  REQUIRE(pde_theta(big, lo) < 0.0);
  REQUIRE(pde_theta(big, hi) > 0.0);
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    (pde_theta(big, mid) < 0.0 ? lo : hi) = mid;
  }
  CHECK(cls.m_star == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
  // antisymmetric u_hat: the root sits at zero
  CHECK(std::abs(cls.m_star) < 1e-8);

  // small forcing: every shift in [a - min, b - max] is feasible
  auto small = pde_problem(N, -1.0, 1.0, pde_cosine_forcing(g, 0.1));
  auto cls2 = pde_classify(small);
  CHECK(cls2.kind == PdeCase::fits_within);
  CHECK(cls2.m_lo == doctest::Approx(-1.0 + 0.1 / mu).epsilon(1e-10));
  CHECK(cls2.m_hi == doctest::Approx(1.0 - 0.1 / mu).epsilon(1e-10));

  // forcing scaled exactly to the band width lands on the boundary
  auto edge = pde_problem(N, -1.0, 1.0, pde_cosine_forcing(g, mu));
  CHECK(pde_classify(edge).kind == PdeCase::boundary);

  // segment distance for a pure over-shift: the quadrature mass is 1, so the
  // distance is the leftover shift itself
  Vec shifted = small.u_hat + 2.0 * Vec::Ones(N + 1);
  CHECK(pde_segment_distance(small, shifted, cls2.m_lo, cls2.m_hi) ==
        doctest::Approx(2.0 - cls2.m_hi).epsilon(1e-10));
  CHECK(pde_segment_distance(small, small.u_hat, cls2.m_lo, cls2.m_hi) ==
        doctest::Approx(0.0));
}

TEST_CASE("constrained membrane run converges to its classified limit") {
  auto cfg = default_config("pde_neumann");
  cfg.num["N"] = 16.0;
  cfg.num["T"] = 30.0;
  cfg.num["h"] = 0.01;

  cfg.num["c"] = 0.1;  // fits-within case
  auto run = run_scenario(cfg);
  CHECK(has_metric(run, "m_lo"));
  CHECK(has_metric(run, "m_hi"));
  CHECK(metric(run, "dist_shift_segment") < 1e-2);
  CHECK(metric(run, "h1_identity_max_rel_error") <= 1e-8);
  CHECK(has_metric(run, "h1_seminorm_final"));
  auto c7 = verdict_of(run, "C7");
  REQUIRE(c7 != nullptr);
  CHECK(c7->verdict == Verdict::summable);

  cfg.num["c"] = 25.0;  // spread-exceeds case
  auto run2 = run_scenario(cfg);
  CHECK(has_metric(run2, "m_star"));
  CHECK(metric(run2, "dist_shifted_solution") < 1e-2);
  CHECK(metric(run2, "spread") > 2.0);
}

TEST_CASE("vanishing regularization selects the least-norm minimizer") {
  auto cfg = default_config("tikhonov");
  cfg.num["T"] = 200.0;
  auto run = run_scenario(cfg);
  // minimizers of (x1 - 1)^2/2 form a line; the least-norm one is (1, 0)
  CHECK(metric(run, "dist_least_norm_minimizer") < 0.05);
  CHECK(std::abs(metric(run, "final_x1") - 1.0) < 0.05);
  CHECK(std::abs(metric(run, "final_x2")) < 0.05);
  CHECK(metric(run, "energy_violations") == 0.0);
  auto slow = verdict_of(run, "slow_eps");
  REQUIRE(slow != nullptr);
  CHECK(slow->verdict == Verdict::divergent);

  cfg.str["eps_kind"] = "osc_harmonic";
  auto run2 = run_scenario(cfg);
  CHECK(metric(run2, "dist_least_norm_minimizer") < 0.05);
}

TEST_CASE("sweeping run settles on the limit set") {
  auto cfg = default_config("sweeping");
  auto run = run_scenario(cfg);
  CHECK(metric(run, "dist_limit_set") < 1e-4);
  CHECK(metric(run, "dist_current_set") < 1e-6);
  auto drift = verdict_of(run, "drift_L2");
  REQUIRE(drift != nullptr);
  CHECK(drift->verdict == Verdict::summable);

  // halfspace sweep: C(t) = {x_1 <= -e^{-t}}, so the start must sit left of -1
  cfg.str["shape"] = "halfspace";
  cfg.num["x0_1"] = -1.5;
  auto run2 = run_scenario(cfg);
  CHECK(metric(run2, "dist_current_set") < 1e-6);
  CHECK(metric(run2, "dist_limit_set") < 1e-6);

  // an infeasible start is rejected with the dedicated error type
  cfg.num["x0_1"] = 1.0;
  CHECK_THROWS_AS(run_scenario(cfg), InfeasibleStart);
}

TEST_CASE("quasi-autonomous drift splits into summable components") {
  auto cfg = default_config("quasi_autonomous");
  cfg.num["T"] = 100.0;
  auto run = run_scenario(cfg);
  CHECK(has_metric(run, "dist_segment"));
  auto l1 = verdict_of(run, "L1_F");
  auto l2 = verdict_of(run, "L2_perp");
  REQUIRE(l1 != nullptr);
  REQUIRE(l2 != nullptr);
  // perpendicular drift (1+t)^{-0.6}: nothing along F, square-integrable
  // across it
  CHECK(l1->verdict == Verdict::summable);
  CHECK(l2->verdict == Verdict::summable);
  // the y component tracks the drift amplitude s(T)
  double sT = std::pow(1.0 + 100.0, -0.6);
  CHECK(std::abs(metric(run, "final_y") - sT) < 0.05);

  // the same drift aligned with the segment is not absolutely integrable
  cfg.str["drift_align"] = "span";
  auto run2 = run_scenario(cfg);
  auto s1 = verdict_of(run2, "L1_F");
  auto s2 = verdict_of(run2, "L2_perp");
  REQUIRE(s1 != nullptr);
  REQUIRE(s2 != nullptr);
  CHECK(s1->verdict == Verdict::divergent);
  CHECK(s2->verdict == Verdict::summable);
}

TEST_CASE("rotation run matches the exact discrete contraction factor") {
  auto cfg = default_config("rotation_ergodic");
  cfg.num["T"] = 50.0;
  cfg.num["h"] = 0.1;
  cfg.num["substeps"] = 5.0;
  auto run = run_scenario(cfg);
  // implicit steps on a rotation shrink the norm by (1 + h'^2)^{-1/2} each
  double hp = 0.1 / 5.0;
  double n = (50.0 / 0.1) * 5.0;
  double expect = std::pow(1.0 + hp * hp, -n / 2.0);
  CHECK(metric(run, "final_norm") == doctest::Approx(expect).epsilon(1e-10));
  CHECK(metric(run, "ergodic_avg_norm") < 0.1);
  CHECK(metric(run, "final_window_oscillation") > 0.5);
  CHECK(metric(run, "final_window_min_norm") > 0.5);
  auto c1 = verdict_of(run, "C1");
  REQUIRE(c1 != nullptr);
  CHECK(c1->verdict == Verdict::summable);
}

TEST_CASE("custom scenario runs a user-assembled flow") {
  ExperimentConfig cfg = default_config("custom");
  cfg.custom = Json::parse(R"({
    "x0": [2.0, 0.0],
    "T": 40.0,
    "h": 0.01,
    "phi": {"kind": "norm_sq", "dim": 2},
    "beta": {"kind": "constant", "value": 0.5},
    "psi": {"kind": "dist_sq", "set": {"kind": "box", "lo": [1.5, -1.0], "hi": [3.0, 1.0]}, "factor": 0.5},
    "nonincreasing_family": true
  })");
  auto run = run_scenario(cfg);
  // stationarity on the segment 0 < x < 1.5: x + 0.5 (x - 1.5) = 0 => x = 0.5
  CHECK(metric(run, "final_norm") == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(metric(run, "energy_violations") == 0.0);

  // forward_backward with an explicit A block is contradictory
  ExperimentConfig bad = cfg;
  bad.custom["mode"] = "forward_backward";
  bad.custom["A"] = Json::parse(R"({"kind": "identity", "dim": 2})");
  CHECK_THROWS_AS(run_scenario(bad), ConfigError);
}

TEST_CASE("trajectory CSV is deterministic, strided, and well-formed") {
  auto cfg = default_config("two_d");
  cfg.num["T"] = 5.0;
  cfg.num["h"] = 0.1;
  auto a = run_scenario(cfg);
  auto b = run_scenario(cfg);
  std::string csv_a = trajectory_csv(a);
  std::string csv_b = trajectory_csv(b);
  CHECK(csv_a == csv_b);  // byte-identical across reruns

  std::istringstream in(csv_a);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_1,x_2,residual,dist_S,energy");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == a.trajectory.size());

  // stride thins interior rows but always keeps the final node
  std::string thin = trajectory_csv(a, 10);
  std::istringstream tin(thin);
  std::getline(tin, header);
  std::string line, last;
  std::size_t thin_rows = 0;
  while (std::getline(tin, line)) {
    ++thin_rows;
    last = line;
  }
  std::size_t last_idx = a.trajectory.size() - 1;
  std::size_t expect_rows = last_idx / 10 + 1 + (last_idx % 10 != 0 ? 1 : 0);
  CHECK(thin_rows == expect_rows);
  double t_last = std::stod(last.substr(0, last.find(',')));
  CHECK(t_last == a.trajectory.times.back());
  CHECK_THROWS_AS(trajectory_csv(a, 0), ConfigError);

  // values render at full precision: reparsing reproduces the state exactly
  std::istringstream pin(csv_a);
  std::getline(pin, header);
  std::getline(pin, line);
  std::getline(pin, line);
  std::stringstream fields(line);
  std::string tok;
  std::getline(fields, tok, ',');
  std::getline(fields, tok, ',');
  CHECK(std::stod(tok) == a.trajectory.states[1][0]);

  std::string summary = summary_text(a);
  CHECK(summary.find("scenario = two_d") != std::string::npos);
  CHECK(summary.find("final_norm = ") != std::string::npos);
  std::string cond = conditions_csv(a.conditions);
  CHECK(cond.rfind("condition,", 0) == 0);
  CHECK(cond.find("C7") != std::string::npos);
}

TEST_CASE("ergodic-average columns extend the CSV header") {
  auto cfg = default_config("rotation_ergodic");
  cfg.num["T"] = 2.0;
  cfg.num["h"] = 0.1;
  cfg.num["substeps"] = 1.0;
  auto run = run_scenario(cfg);
  std::string csv = trajectory_csv(run);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_1,x_2,residual,dist_S,ergavg_1,ergavg_2");
}

TEST_CASE("simulate config parsing enforces the schema") {
  auto good = Json::parse(R"({
    "schema_version": 1,
    "scenario": "two_d",
    "parameters": {"T": 10.0, "beta_kind": "power"},
    "outputs": {"dir": "/tmp/x", "stride": 5, "svg": true},
    "seed": 7,
    "refine": true
  })");
  auto cfg = parse_experiment(good);
  CHECK(cfg.scenario == "two_d");
  CHECK(cfg.num.at("T") == 10.0);
  CHECK(cfg.num.at("h") == 0.01);  // untouched default
  CHECK(cfg.outputs.stride == 5);
  CHECK(cfg.outputs.svg);
  CHECK(cfg.seed == 7);
  CHECK(cfg.refine);

  auto reject = [&](const char* mutation) {
    Json bad = good;
    Json patch = Json::parse(mutation);
    for (auto it = patch.begin(); it != patch.end(); ++it)
      bad[it.key()] = it.value();
    CHECK_THROWS_AS(parse_experiment(bad), ConfigError);
  };
  reject(R"({"schema_version": 2})");
  reject(R"({"schema_version": "1"})");
  reject(R"({"scenario": "nosuch"})");
  reject(R"({"extra_key": 1})");
  reject(R"({"parameters": {"not_a_param": 1.0}})");
  reject(R"({"parameters": {"T": "ten"}})");
  reject(R"({"parameters": 3})");
  reject(R"({"outputs": {"stride": 0}})");
  reject(R"({"outputs": {"nested": {}}})");
  reject(R"({"seed": -1})");
  reject(R"({"refine": "yes"})");
  reject(R"({"custom": {}})");  // custom block without scenario = custom

  Json missing = good;
  missing.erase("schema_version");
  CHECK_THROWS_AS(parse_experiment(missing), ConfigError);

  Json needs_block = Json::parse(R"({"schema_version": 1, "scenario": "custom"})");
  CHECK_THROWS_AS(parse_experiment(needs_block), ConfigError);
}

TEST_CASE("omega job parsing covers both grid spellings") {
  auto arr = Json::parse(R"({
    "schema_version": 1,
    "psi": {"kind": "channel_quadratic", "a": 2.0},
    "phi": {"kind": "channel_tilt", "b": 1.0},
    "eps": [0.1, 0.01],
    "dual": true,
    "tol": 1e-10
  })");
  auto job = parse_omega_job(arr);
  CHECK(job.eps_grid == std::vector<double>{0.1, 0.01});
  CHECK(job.dual);
  CHECK(job.opts.tol == 1e-10);
  CHECK(job.psi->dim() == 2);

  auto grid = Json::parse(R"({
    "schema_version": 1,
    "psi": {"kind": "norm_sq", "dim": 1},
    "phi": {"kind": "affine", "c": [1.0]},
    "eps": {"from": 0.01, "to": 1.0, "per_decade": 2}
  })");
  auto job2 = parse_omega_job(grid);
  REQUIRE(job2.eps_grid.size() == 5);
  CHECK(job2.eps_grid.front() == doctest::Approx(0.01));
  CHECK(job2.eps_grid.back() == doctest::Approx(1.0));

  auto reject = [&](const char* mutation) {
    Json bad = arr;
    Json patch = Json::parse(mutation);
    for (auto it = patch.begin(); it != patch.end(); ++it)
      bad[it.key()] = it.value();
    CHECK_THROWS_AS(parse_omega_job(bad), ConfigError);
  };
  reject(R"({"eps": []})");
  reject(R"({"eps": [-0.1]})");
  reject(R"({"eps": {"from": 1.0, "to": 0.1, "per_decade": 2}})");
  reject(R"({"eps": "grid"})");
  reject(R"({"tol": 0.0})");
  reject(R"({"psi": {"kind": "nosuch"}})");
  reject(R"({"unknown": 1})");
}

TEST_CASE("condition job parsing assembles runnable entries") {
  auto root = Json::parse(R"({
    "schema_version": 1,
    "conditions": [
      {"id": "C2",
       "operator": {"kind": "identity", "dim": 1},
       "z": [0.0], "q": [1.0],
       "beta": {"kind": "power", "scale": 1.0, "exponent": 2.0}},
      {"id": "slow_eps", "schedule": {"kind": "power", "scale": 1.0, "exponent": -2.0}}
    ],
    "options": {"horizons": [10.0, 100.0], "nodes_per_decade": 64}
  })");
  auto job = parse_condition_job(root);
  REQUIRE(job.entries.size() == 2);
  CHECK(job.options.horizons == std::vector<double>{10.0, 100.0});
  CHECK(job.options.nodes_per_decade == 64);
  for (const auto& e : job.entries) {
    auto f = make_condition_integrand(e.id, e.ingredients);
    auto v = check_condition(e.id, f, job.options);
    CHECK(v.verdict == Verdict::summable);
  }

  auto reject = [&](const char* mutation) {
    Json bad = root;
    Json patch = Json::parse(mutation);
    for (auto it = patch.begin(); it != patch.end(); ++it)
      bad[it.key()] = it.value();
    CHECK_THROWS_AS(parse_condition_job(bad), ConfigError);
  };
  reject(R"({"conditions": []})");
  reject(R"({"conditions": [{"id": "C2", "mystery": 1}]})");
  reject(R"({"conditions": [{"operator": {"kind": "zero", "dim": 1}}]})");
  reject(R"({"options": {"unknown": 1}})");

  // ordering of the horizons is a run-time concern, not a parse-time one
  Json decreasing = root;
  decreasing["options"] = Json::parse(R"({"horizons": [100.0, 10.0]})");
  auto job2 = parse_condition_job(decreasing);
  CHECK_THROWS_AS(
      check_condition("x", [](double) { return 0.0; }, job2.options),
      ConfigError);
}

TEST_CASE("reproduce overlays key=value parameters onto the defaults") {
  auto cfg = make_reproduce_config("rotation_ergodic",
                                   {"T=50", "substeps=5"}, "/tmp/out", true);
  CHECK(cfg.scenario == "rotation_ergodic");
  CHECK(cfg.num.at("T") == 50.0);
  CHECK(cfg.num.at("substeps") == 5.0);
  CHECK(cfg.num.at("h") == 0.01);
  CHECK(cfg.outputs.dir == "/tmp/out");
  CHECK(cfg.outputs.svg);

  auto cfg2 = make_reproduce_config("two_d", {"beta_kind=osc_harmonic"}, "", false);
  CHECK(cfg2.str.at("beta_kind") == "osc_harmonic");

  CHECK_THROWS_AS(make_reproduce_config("two_d", {"T=abc"}, "", false),
                  ConfigError);
  CHECK_THROWS_AS(make_reproduce_config("two_d", {"nosuch=1"}, "", false),
                  ConfigError);
  CHECK_THROWS_AS(make_reproduce_config("two_d", {"noequals"}, "", false),
                  ConfigError);
  CHECK_THROWS_AS(make_reproduce_config("nosuch", {}, "", false), ConfigError);
}
