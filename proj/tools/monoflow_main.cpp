#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monoflow/config.hpp"
#include "monoflow/diagnostics.hpp"
#include "monoflow/errors.hpp"
#include "monoflow/experiments.hpp"
#include "monoflow/omega.hpp"

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_or_print(const std::string& out, const std::string& body) {
  if (out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(out);
  if (!f) throw monoflow::IoError("cannot open " + out + " for writing");
  f << body;
  f.close();
  if (!f.good()) throw monoflow::IoError("failed while writing " + out);
}

int cmd_simulate(const std::string& path) {
  monoflow::ExperimentConfig cfg =
      monoflow::parse_experiment(monoflow::load_config_file(path));
  monoflow::RunSummary run = monoflow::run_scenario(cfg);
  monoflow::emit_outputs(run, cfg.outputs);
  std::cout << monoflow::summary_text(run);
  return 0;
}

int cmd_omega(const std::string& path) {
  monoflow::OmegaJob job = monoflow::parse_omega_job(monoflow::load_config_file(path));
  std::string csv = "epsilon,primal,dual,gap,slope\n";
  for (double eps : job.eps_grid) {
    monoflow::OmegaResult r = job.dual
                                  ? monoflow::omega_dual(job.psi, job.phi, eps, job.opts)
                                  : monoflow::omega_primal(job.psi, job.phi, eps, job.opts);
    csv += g17(eps);
    csv += ',';
    csv += g17(r.primal_value.as_double());
    csv += ',';
    csv += r.dual_value ? g17(*r.dual_value) : std::string("nan");
    csv += ',';
    csv += r.gap ? g17(*r.gap) : std::string("nan");
    csv += ',';
    csv += (eps > 0.0 && r.primal_value.finite())
               ? g17(r.primal_value.finite_value() / eps)
               : std::string("nan");
    csv += '\n';
  }
  write_or_print(job.out, csv);
  return 0;
}

int cmd_conditions(const std::string& path) {
  monoflow::ConditionJob job =
      monoflow::parse_condition_job(monoflow::load_config_file(path));
  std::vector<monoflow::ConditionVerdict> verdicts;
  verdicts.reserve(job.entries.size());
  for (const monoflow::ConditionEntry& e : job.entries)
    verdicts.push_back(monoflow::check_condition(
        e.id, monoflow::make_condition_integrand(e.id, e.ingredients), job.options));
  write_or_print(job.out, monoflow::conditions_csv(verdicts));
  return 0;
}

int cmd_reproduce(const std::string& scenario, const std::vector<std::string>& params,
                  const std::string& out_dir, bool svg) {
  monoflow::ExperimentConfig cfg =
      monoflow::make_reproduce_config(scenario, params, out_dir, svg);
  monoflow::RunSummary run = monoflow::run_scenario(cfg);
  monoflow::emit_outputs(run, cfg.outputs);
  std::cout << monoflow::summary_text(run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monoflow: nonautonomous monotone flows, weighted minima, and "
               "summability diagnostics"};
  app.require_subcommand(1);

  std::string sim_config;
  CLI::App* sim = app.add_subcommand("simulate", "run a scenario from a JSON config");
  sim->add_option("config", sim_config, "JSON config file")->required();

  std::string omega_config;
  CLI::App* om =
      app.add_subcommand("omega", "evaluate the weighted minimum value map");
  om->add_option("config", omega_config, "JSON config file")->required();

  std::string cond_config;
  CLI::App* cc = app.add_subcommand("check-conditions",
                                    "run summability checks from a JSON config");
  cc->add_option("config", cond_config, "JSON config file")->required();

  std::string scenario, out_dir;
  std::vector<std::string> params;
  bool svg = false;
  CLI::App* rep =
      app.add_subcommand("reproduce", "run a named scenario with its defaults");
  rep->add_option("scenario", scenario, "scenario name")->required();
  rep->add_option("--param", params, "override a scenario parameter, key=value");
  rep->add_option("--out", out_dir, "output directory");
  rep->add_flag("--svg", svg, "also write SVG plots");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(sim_config);
    if (om->parsed()) return cmd_omega(omega_config);
    if (cc->parsed()) return cmd_conditions(cond_config);
    if (rep->parsed()) return cmd_reproduce(scenario, params, out_dir, svg);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return 2;
  } catch (const monoflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
