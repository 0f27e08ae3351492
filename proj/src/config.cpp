#include "monoflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "monoflow/errors.hpp"

namespace monoflow {
namespace {

constexpr int kSchemaVersion = 1;

void require_schema(const Json& root, const std::string& where) {
  if (!root.is_object())
    throw ConfigError(where + ": config root must be a JSON object");
  if (!root.contains("schema_version"))
    throw ConfigError(where + ": schema_version is required");
  const Json& v = root.at("schema_version");
  if (!v.is_number_integer() || v.get<long long>() != kSchemaVersion)
    throw ConfigError(where + ": unsupported schema_version (expected " +
                      std::to_string(kSchemaVersion) + ")");
}

double number_field(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

std::string string_field(const Json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " must be a string");
  return v.get<std::string>();
}

bool bool_field(const Json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + " must be a boolean");
  return v.get<bool>();
}

long positive_int_field(const Json& v, const std::string& where) {
  double d = number_field(v, where);
  long n = std::lround(d);
  if (std::abs(d - static_cast<double>(n)) > 1e-9 || n < 1)
    throw ConfigError(where + " must be a positive integer");
  return n;
}

}  // namespace

Json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  if (f.bad()) throw IoError("failed while reading " + path);
  Json root = Json::parse(buf.str(), nullptr, false);
  if (root.is_discarded())
    throw ConfigError("config file " + path + " is not valid JSON");
  return root;
}

ExperimentConfig parse_experiment(const Json& root) {
  require_schema(root, "simulate");
  check_keys(root, "simulate", {"schema_version", "scenario"},
             {"parameters", "custom", "outputs", "seed", "refine"});
  std::string scenario = string_field(root.at("scenario"), "simulate.scenario");
  ExperimentConfig cfg = default_config(scenario);

  if (root.contains("parameters")) {
    const Json& pars = root.at("parameters");
    if (!pars.is_object())
      throw ConfigError("simulate.parameters must be an object");
    for (auto it = pars.begin(); it != pars.end(); ++it) {
      const std::string& key = it.key();
      if (auto n = cfg.num.find(key); n != cfg.num.end()) {
        n->second = number_field(it.value(), "parameters." + key);
      } else if (auto s = cfg.str.find(key); s != cfg.str.end()) {
        s->second = string_field(it.value(), "parameters." + key);
      } else {
        throw ConfigError("parameters." + key +
                          " is not a parameter of scenario " + scenario);
      }
    }
  }

  if (scenario == "custom") {
    if (!root.contains("custom"))
      throw ConfigError("scenario custom needs a custom block");
    cfg.custom = root.at("custom");
  } else if (root.contains("custom")) {
    throw ConfigError("the custom block requires scenario = custom");
  }

  if (root.contains("outputs")) {
    const Json& o = root.at("outputs");
    check_keys(o, "outputs", {},
               {"dir", "trajectory_csv", "summary", "conditions_csv", "svg",
                "stride"});
    if (o.contains("dir")) cfg.outputs.dir = string_field(o.at("dir"), "outputs.dir");
    if (o.contains("trajectory_csv"))
      cfg.outputs.trajectory_csv =
          bool_field(o.at("trajectory_csv"), "outputs.trajectory_csv");
    if (o.contains("summary"))
      cfg.outputs.summary = bool_field(o.at("summary"), "outputs.summary");
    if (o.contains("conditions_csv"))
      cfg.outputs.conditions_csv =
          bool_field(o.at("conditions_csv"), "outputs.conditions_csv");
    if (o.contains("svg")) cfg.outputs.svg = bool_field(o.at("svg"), "outputs.svg");
    if (o.contains("stride"))
      cfg.outputs.stride = positive_int_field(o.at("stride"), "outputs.stride");
  }

  if (root.contains("seed")) {
    const Json& s = root.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0)
      throw ConfigError("simulate.seed must be a nonnegative integer");
    cfg.seed = static_cast<unsigned long>(s.get<long long>());
  }
  if (root.contains("refine"))
    cfg.refine = bool_field(root.at("refine"), "simulate.refine");
  return cfg;
}

OmegaJob parse_omega_job(const Json& root) {
  require_schema(root, "omega");
  check_keys(root, "omega", {"schema_version", "psi", "phi", "eps"},
             {"dual", "tol", "max_iters", "out"});
  OmegaJob job;
  job.psi = make_function(root.at("psi"));
  job.phi = make_function(root.at("phi"));

  const Json& eps = root.at("eps");
  if (eps.is_array()) {
    for (const Json& e : eps) {
      double v = number_field(e, "omega.eps[]");
      if (v < 0.0) throw ConfigError("omega.eps entries must be >= 0");
      job.eps_grid.push_back(v);
    }
  } else if (eps.is_object()) {
    check_keys(eps, "omega.eps", {"from", "to", "per_decade"}, {});
    double from = number_field(eps.at("from"), "omega.eps.from");
    double to = number_field(eps.at("to"), "omega.eps.to");
    long ppd = positive_int_field(eps.at("per_decade"), "omega.eps.per_decade");
    if (!(from > 0.0) || !(to > from))
      throw ConfigError("omega.eps grid needs 0 < from < to");
    double l0 = std::log10(from), l1 = std::log10(to);
    long n = std::max<long>(1, std::lround(std::ceil((l1 - l0) * static_cast<double>(ppd))));
    for (long k = 0; k <= n; ++k)
      job.eps_grid.push_back(
          std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(n)));
  } else {
    throw ConfigError("omega.eps must be an array or a {from,to,per_decade} grid");
  }
  if (job.eps_grid.empty()) throw ConfigError("omega.eps must not be empty");

  if (root.contains("dual")) job.dual = bool_field(root.at("dual"), "omega.dual");
  if (root.contains("tol")) {
    job.opts.tol = number_field(root.at("tol"), "omega.tol");
    if (!(job.opts.tol > 0.0)) throw ConfigError("omega.tol must be positive");
  }
  if (root.contains("max_iters"))
    job.opts.max_iters = positive_int_field(root.at("max_iters"), "omega.max_iters");
  if (root.contains("out")) job.out = string_field(root.at("out"), "omega.out");
  return job;
}

ConditionJob parse_condition_job(const Json& root) {
  require_schema(root, "check-conditions");
  check_keys(root, "check-conditions", {"schema_version", "conditions"},
             {"options", "out"});
  const Json& arr = root.at("conditions");
  if (!arr.is_array() || arr.empty())
    throw ConfigError("conditions must be a nonempty array");

  ConditionJob job;
  if (root.contains("options")) {
    const Json& o = root.at("options");
    check_keys(o, "options", {},
               {"horizons", "nodes_per_decade", "cauchy_tol",
                "divergence_threshold", "exponent_band"});
    if (o.contains("horizons")) {
      const Json& hs = o.at("horizons");
      if (!hs.is_array()) throw ConfigError("options.horizons must be an array");
      job.options.horizons.clear();
      for (const Json& h : hs)
        job.options.horizons.push_back(number_field(h, "options.horizons[]"));
    }
    if (o.contains("nodes_per_decade"))
      job.options.nodes_per_decade = static_cast<int>(
          positive_int_field(o.at("nodes_per_decade"), "options.nodes_per_decade"));
    if (o.contains("cauchy_tol"))
      job.options.cauchy_tol = number_field(o.at("cauchy_tol"), "options.cauchy_tol");
    if (o.contains("divergence_threshold"))
      job.options.divergence_threshold =
          number_field(o.at("divergence_threshold"), "options.divergence_threshold");
    if (o.contains("exponent_band"))
      job.options.exponent_band =
          number_field(o.at("exponent_band"), "options.exponent_band");
  }
  if (root.contains("out"))
    job.out = string_field(root.at("out"), "check-conditions.out");

  for (const Json& e : arr) {
    check_keys(e, "conditions[]", {"id"},
               {"operator", "offset_path", "set", "psi", "phi", "beta",
                "schedule", "forcing", "z", "p", "q", "omega_tol"});
    ConditionEntry ent;
    ent.id = string_field(e.at("id"), "conditions[].id");
    if (e.contains("operator")) ent.ingredients.op = make_operator(e.at("operator"));
    if (e.contains("offset_path"))
      ent.ingredients.offset_path = make_forcing(e.at("offset_path"));
    if (e.contains("set")) ent.ingredients.set_c = make_set(e.at("set"));
    if (e.contains("psi")) ent.ingredients.psi = make_function(e.at("psi"));
    if (e.contains("phi")) ent.ingredients.phi = make_function(e.at("phi"));
    if (e.contains("beta")) ent.ingredients.beta = make_schedule(e.at("beta"));
    if (e.contains("schedule"))
      ent.ingredients.schedule = make_schedule(e.at("schedule"));
    if (e.contains("forcing")) ent.ingredients.forcing = make_forcing(e.at("forcing"));
    if (e.contains("z")) ent.ingredients.z = make_vector(e.at("z"));
    if (e.contains("p")) ent.ingredients.p = make_vector(e.at("p"));
    if (e.contains("q")) ent.ingredients.q = make_vector(e.at("q"));
    if (e.contains("omega_tol")) {
      ent.ingredients.omega.tol =
          number_field(e.at("omega_tol"), "conditions[].omega_tol");
      if (!(ent.ingredients.omega.tol > 0.0))
        throw ConfigError("conditions[].omega_tol must be positive");
    }
    job.entries.push_back(std::move(ent));
  }
  return job;
}

ExperimentConfig make_reproduce_config(const std::string& scenario,
                                       const std::vector<std::string>& params,
                                       const std::string& out_dir, bool svg) {
  ExperimentConfig cfg = default_config(scenario);
  for (const std::string& kv : params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--param expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    std::string val = kv.substr(eq + 1);
    if (auto n = cfg.num.find(key); n != cfg.num.end()) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != val.size() || val.empty())
        throw ConfigError("--param " + key + " expects a numeric value");
      n->second = v;
    } else if (auto s = cfg.str.find(key); s != cfg.str.end()) {
      s->second = val;
    } else {
      throw ConfigError("--param " + key + " is not a parameter of scenario " +
                        scenario);
    }
  }
  cfg.outputs.dir = out_dir;
  cfg.outputs.svg = svg;
  return cfg;
}

}  // namespace monoflow
