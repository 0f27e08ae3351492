#include "monoflow/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monoflow/errors.hpp"

namespace monoflow {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

double number_at(const Json& spec, const std::string& where,
                 const std::string& key) {
  const Json& v = spec.at(key);
  if (v.is_number()) return v.get<double>();
  // boxes use string sentinels for unbounded coordinates
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  bad(where, "key '" + key + "' must be a number");
}

std::string kind_of(const Json& spec, const std::string& where) {
  if (!spec.is_object()) bad(where, "expected an object with a 'kind' key");
  if (!spec.contains("kind") || !spec.at("kind").is_string())
    bad(where, "missing string key 'kind'");
  return spec.at("kind").get<std::string>();
}

}  // namespace

void check_keys(const Json& spec, const std::string& where,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
  if (!spec.is_object()) bad(where, "expected an object");
  for (const std::string& k : required)
    if (!spec.contains(k)) bad(where, "missing required key '" + k + "'");
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    const std::string& k = it.key();
    if (std::find(required.begin(), required.end(), k) != required.end()) continue;
    if (std::find(optional.begin(), optional.end(), k) != optional.end()) continue;
    bad(where, "unknown key '" + k + "'");
  }
}

Vec make_vector(const Json& spec) {
  if (!spec.is_array()) throw ConfigError("vector: expected an array of numbers");
  Vec v(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Json& e = spec[i];
    if (e.is_number()) {
      v[static_cast<long>(i)] = e.get<double>();
    } else if (e.is_string() && e.get<std::string>() == "inf") {
      v[static_cast<long>(i)] = std::numeric_limits<double>::infinity();
    } else if (e.is_string() && e.get<std::string>() == "-inf") {
      v[static_cast<long>(i)] = -std::numeric_limits<double>::infinity();
    } else {
      throw ConfigError("vector: entries must be numbers (or \"inf\"/\"-inf\")");
    }
  }
  return v;
}

Mat make_matrix(const Json& spec) {
  if (!spec.is_array() || spec.empty())
    throw ConfigError("matrix: expected a nonempty array of rows");
  const std::size_t cols = spec[0].is_array() ? spec[0].size() : 0;
  if (cols == 0) throw ConfigError("matrix: rows must be nonempty arrays");
  Mat M(spec.size(), cols);
  for (std::size_t r = 0; r < spec.size(); ++r) {
    Vec row = make_vector(spec[r]);
    if (static_cast<std::size_t>(row.size()) != cols)
      throw ConfigError("matrix: ragged rows");
    M.row(static_cast<long>(r)) = row.transpose();
  }
  return M;
}

SetPtr make_set(const Json& spec) {
  const std::string where = "set";
  const std::string kind = kind_of(spec, where);
  if (kind == "whole") {
    check_keys(spec, where, {"kind", "dim"});
    return set_whole(spec.at("dim").get<int>());
  }
  if (kind == "ball") {
    check_keys(spec, where, {"kind", "center", "radius"});
    return set_ball(make_vector(spec.at("center")),
                    number_at(spec, where, "radius"));
  }
  if (kind == "box") {
    check_keys(spec, where, {"kind", "lo", "hi"});
    return set_box(make_vector(spec.at("lo")), make_vector(spec.at("hi")));
  }
  if (kind == "halfspace") {
    check_keys(spec, where, {"kind", "normal", "offset"});
    return set_halfspace(make_vector(spec.at("normal")),
                         number_at(spec, where, "offset"));
  }
  if (kind == "affine") {
    check_keys(spec, where, {"kind", "point", "basis"});
    return set_affine(make_vector(spec.at("point")), make_matrix(spec.at("basis")));
  }
  if (kind == "segment") {
    check_keys(spec, where, {"kind", "p", "q"});
    return set_segment(make_vector(spec.at("p")), make_vector(spec.at("q")));
  }
  if (kind == "singleton") {
    check_keys(spec, where, {"kind", "point"});
    return set_singleton(make_vector(spec.at("point")));
  }
  if (kind == "polytope") {
    check_keys(spec, where, {"kind", "vertices"});
    const Json& vs = spec.at("vertices");
    if (!vs.is_array() || vs.empty())
      bad(where, "polytope needs an array of vertices");
    std::vector<Vec> vertices;
    for (const Json& v : vs) vertices.push_back(make_vector(v));
    return set_polytope(std::move(vertices));
  }
  if (kind == "parabola_region") {
    check_keys(spec, where, {"kind"});
    return set_parabola_region();
  }
  bad(where, "unknown kind '" + kind + "'");
}

FunPtr make_function(const Json& spec) {
  const std::string where = "function";
  const std::string kind = kind_of(spec, where);
  if (kind == "quadratic") {
    check_keys(spec, where, {"kind", "Q"}, {"q", "c"});
    Mat Q = make_matrix(spec.at("Q"));
    Vec q = spec.contains("q") ? make_vector(spec.at("q")) : Vec(Vec::Zero(Q.rows()));
    double c = spec.contains("c") ? number_at(spec, where, "c") : 0.0;
    return fn_quadratic(std::move(Q), std::move(q), c);
  }
  if (kind == "norm_sq") {
    check_keys(spec, where, {"kind", "dim"});
    return fn_norm_sq(spec.at("dim").get<int>());
  }
  if (kind == "affine") {
    check_keys(spec, where, {"kind", "c"}, {"b"});
    return fn_affine(make_vector(spec.at("c")),
                     spec.contains("b") ? number_at(spec, where, "b") : 0.0);
  }
  if (kind == "indicator") {
    check_keys(spec, where, {"kind", "set"});
    return fn_indicator(make_set(spec.at("set")));
  }
  if (kind == "support") {
    check_keys(spec, where, {"kind", "set"});
    return fn_support(make_set(spec.at("set")));
  }
  if (kind == "dist_sq") {
    check_keys(spec, where, {"kind", "set"}, {"factor"});
    return fn_dist_sq(make_set(spec.at("set")),
                      spec.contains("factor") ? number_at(spec, where, "factor")
                                              : 0.5);
  }
  if (kind == "channel_quadratic") {
    check_keys(spec, where, {"kind", "a"});
    return fn_channel_quadratic(number_at(spec, where, "a"));
  }
  if (kind == "channel_tilt") {
    check_keys(spec, where, {"kind", "b"});
    return fn_channel_tilt(number_at(spec, where, "b"));
  }
  if (kind == "tridiag_quadratic") {
    check_keys(spec, where, {"kind", "diag", "off"}, {"q", "c"});
    Vec diag = make_vector(spec.at("diag"));
    Vec off = make_vector(spec.at("off"));
    Vec q = spec.contains("q") ? make_vector(spec.at("q"))
                               : Vec(Vec::Zero(diag.size()));
    double c = spec.contains("c") ? number_at(spec, where, "c") : 0.0;
    return fn_tridiag_quadratic(std::move(diag), std::move(off), std::move(q), c);
  }
  if (kind == "obstacle_penalty") {
    check_keys(spec, where, {"kind", "a", "b", "weights"});
    return fn_obstacle_penalty(number_at(spec, where, "a"),
                               number_at(spec, where, "b"),
                               make_vector(spec.at("weights")));
  }
  bad(where, "unknown kind '" + kind + "'");
}

OpPtr make_operator(const Json& spec) {
  const std::string where = "operator";
  const std::string kind = kind_of(spec, where);
  if (kind == "zero") {
    check_keys(spec, where, {"kind", "dim"});
    return op_zero(spec.at("dim").get<int>());
  }
  if (kind == "identity") {
    check_keys(spec, where, {"kind", "dim"}, {"scale"});
    return op_scaled_identity(spec.at("dim").get<int>(),
                              spec.contains("scale")
                                  ? number_at(spec, where, "scale")
                                  : 1.0);
  }
  if (kind == "rotation2d") {
    check_keys(spec, where, {"kind"});
    return op_rotation2d();
  }
  if (kind == "linear") {
    check_keys(spec, where, {"kind", "matrix"}, {"offset"});
    Mat A = make_matrix(spec.at("matrix"));
    Vec off = spec.contains("offset") ? make_vector(spec.at("offset")) : Vec();
    return op_linear(std::move(A), std::move(off));
  }
  if (kind == "normal_cone") {
    check_keys(spec, where, {"kind", "set"});
    return op_normal_cone(make_set(spec.at("set")));
  }
  if (kind == "subdifferential") {
    check_keys(spec, where, {"kind", "function"});
    return op_subdifferential(make_function(spec.at("function")));
  }
  if (kind == "scale") {
    check_keys(spec, where, {"kind", "operator", "factor"});
    return scale_operator(make_operator(spec.at("operator")),
                          number_at(spec, where, "factor"));
  }
  if (kind == "shift") {
    check_keys(spec, where, {"kind", "operator", "offset"});
    return shift_operator(make_operator(spec.at("operator")),
                          make_vector(spec.at("offset")));
  }
  if (kind == "sum") {
    check_keys(spec, where, {"kind", "a", "b"},
               {"weight_a", "weight_b", "inner_tol", "max_inner_iters"});
    SumOptions opts;
    if (spec.contains("inner_tol"))
      opts.inner_tol = number_at(spec, where, "inner_tol");
    if (spec.contains("max_inner_iters"))
      opts.max_inner_iters = spec.at("max_inner_iters").get<long>();
    return sum_operator(
        make_operator(spec.at("a")), make_operator(spec.at("b")),
        spec.contains("weight_a") ? number_at(spec, where, "weight_a") : 1.0,
        spec.contains("weight_b") ? number_at(spec, where, "weight_b") : 1.0,
        opts);
  }
  bad(where, "unknown kind '" + kind + "'");
}

Schedule make_schedule(const Json& spec) {
  const std::string where = "schedule";
  const std::string kind = kind_of(spec, where);
  if (kind == "constant") {
    check_keys(spec, where, {"kind", "value"});
    return Schedule::constant(number_at(spec, where, "value"));
  }
  if (kind == "power") {
    check_keys(spec, where, {"kind", "scale", "exponent"});
    return Schedule::power(number_at(spec, where, "scale"),
                           number_at(spec, where, "exponent"));
  }
  if (kind == "exp_decay") {
    check_keys(spec, where, {"kind", "scale", "rate"});
    return Schedule::exp_decay(number_at(spec, where, "scale"),
                               number_at(spec, where, "rate"));
  }
  if (kind == "inv_log") {
    check_keys(spec, where, {"kind", "scale"});
    return Schedule::inv_log(number_at(spec, where, "scale"));
  }
  if (kind == "osc_harmonic") {
    check_keys(spec, where, {"kind", "scale"});
    return Schedule::osc_harmonic(number_at(spec, where, "scale"));
  }
  if (kind == "log_grow") {
    check_keys(spec, where, {"kind", "scale"});
    return Schedule::log_grow(number_at(spec, where, "scale"));
  }
  if (kind == "tabulated") {
    check_keys(spec, where, {"kind", "times", "values"});
    Vec t = make_vector(spec.at("times")), v = make_vector(spec.at("values"));
    return Schedule::tabulated(std::vector<double>(t.data(), t.data() + t.size()),
                               std::vector<double>(v.data(), v.data() + v.size()));
  }
  bad(where, "unknown kind '" + kind + "'");
}

Forcing make_forcing(const Json& spec) {
  const std::string where = "forcing";
  if (spec.is_object() && spec.contains("constant")) {
    check_keys(spec, where, {"constant"});
    return Forcing::constant(make_vector(spec.at("constant")));
  }
  check_keys(spec, where, {"limit", "direction", "schedule"});
  return Forcing(make_vector(spec.at("limit")), make_vector(spec.at("direction")),
                 make_schedule(spec.at("schedule")));
}

}  // namespace monoflow
