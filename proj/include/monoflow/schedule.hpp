#pragma once

#include <string>
#include <vector>

#include "monoflow/types.hpp"

namespace monoflow {

// Scalar time path t -> value with a symbolic family tag, so integrals are
// exact where the family allows and adaptive Simpson elsewhere.
class Schedule {
 public:
  enum class Family { constant, power, exp_decay, inv_log, osc_harmonic, log_grow, tabulated };

  static Schedule constant(double c);
  static Schedule power(double c, double p);      // c * (1+t)^p
  static Schedule exp_decay(double c, double r);  // c * exp(-r t)
  static Schedule inv_log(double c);              // c / log(2+t)
  static Schedule osc_harmonic(double c);         // c * (2 + sin t)/(1+t)
  static Schedule log_grow(double c);             // c * log(1+t)
  static Schedule tabulated(std::vector<double> t, std::vector<double> v);

  double operator()(double t) const;
  double integral(double a, double b) const;  // exact for closed-form families
  double integral(double T) const { return integral(0.0, T); }

  Family family() const { return family_; }
  double amplitude() const { return c_; }
  double exponent() const { return p_; }  // power p / exp rate r
  // True when values are > 0 for all t >= 0 (family-level guarantee).
  bool strictly_positive() const;
  // True when the values converge to 0 as t -> infinity.
  bool vanishes_at_infinity() const;
  std::string describe() const;

 private:
  Schedule() = default;
  Family family_ = Family::constant;
  double c_ = 0.0;
  double p_ = 0.0;
  std::vector<double> tab_t_, tab_v_;
};

// Vector-valued time path f(t) = f_inf + s(t) * dir, the shape used for
// forcing terms and moving-set drifts.
class Forcing {
 public:
  Forcing(Vec f_inf, Vec dir, Schedule s);
  static Forcing constant(Vec f);

  Vec operator()(double t) const { return f_inf_ + s_(t) * dir_; }
  const Vec& limit() const { return f_inf_; }
  bool has_limit() const;  // s vanishes at infinity, so f(t) -> f_inf
  Vec deviation(double t) const { return s_(t) * dir_; }
  const Schedule& schedule() const { return s_; }
  const Vec& direction() const { return dir_; }
  int dim() const { return static_cast<int>(f_inf_.size()); }
  std::string describe() const;

 private:
  Vec f_inf_, dir_;
  Schedule s_;
};

}  // namespace monoflow
