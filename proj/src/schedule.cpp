#include "monoflow/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "monoflow/errors.hpp"

namespace monoflow {
namespace {

// Adaptive Simpson for the families without a closed-form antiderivative.
double simpson(const Schedule& s, double a, double b, int panels) {
  double h = (b - a) / panels;
  double acc = s(a) + s(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * s(a + i * h);
  return acc * h / 3.0;
}

double adaptive(const Schedule& s, double a, double b) {
  if (b <= a) return 0.0;
  int panels = 64;
  double prev = simpson(s, a, b, panels);
  for (int round = 0; round < 14; ++round) {
    panels *= 2;
    double cur = simpson(s, a, b, panels);
    if (std::abs(cur - prev) <= 1e-12 * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

Schedule Schedule::constant(double c) {
  Schedule s;
  s.family_ = Family::constant;
  s.c_ = c;
  return s;
}

Schedule Schedule::power(double c, double p) {
  Schedule s;
  s.family_ = Family::power;
  s.c_ = c;
  s.p_ = p;
  return s;
}

Schedule Schedule::exp_decay(double c, double r) {
  Schedule s;
  s.family_ = Family::exp_decay;
  s.c_ = c;
  s.p_ = r;
  return s;
}

Schedule Schedule::inv_log(double c) {
  Schedule s;
  s.family_ = Family::inv_log;
  s.c_ = c;
  return s;
}

Schedule Schedule::osc_harmonic(double c) {
  Schedule s;
  s.family_ = Family::osc_harmonic;
  s.c_ = c;
  return s;
}

Schedule Schedule::log_grow(double c) {
  Schedule s;
  s.family_ = Family::log_grow;
  s.c_ = c;
  return s;
}

Schedule Schedule::tabulated(std::vector<double> t, std::vector<double> v) {
  if (t.size() != v.size() || t.size() < 2)
    throw ConfigError("tabulated schedule needs matching t/v arrays of size >= 2");
  if (!std::is_sorted(t.begin(), t.end()))
    throw ConfigError("tabulated schedule: t must be increasing");
  Schedule s;
  s.family_ = Family::tabulated;
  s.tab_t_ = std::move(t);
  s.tab_v_ = std::move(v);
  return s;
}

double Schedule::operator()(double t) const {
  switch (family_) {
    case Family::constant:
      return c_;
    case Family::power:
      return c_ * std::pow(1.0 + t, p_);
    case Family::exp_decay:
      return c_ * std::exp(-p_ * t);
    case Family::inv_log:
      return c_ / std::log(2.0 + t);
    case Family::osc_harmonic:
      return c_ * (2.0 + std::sin(t)) / (1.0 + t);
    case Family::log_grow:
      return c_ * std::log(1.0 + t);
    case Family::tabulated: {
      if (t <= tab_t_.front()) return tab_v_.front();
      if (t >= tab_t_.back()) return tab_v_.back();
      auto it = std::upper_bound(tab_t_.begin(), tab_t_.end(), t);
      size_t i = static_cast<size_t>(it - tab_t_.begin());
      double w = (t - tab_t_[i - 1]) / (tab_t_[i] - tab_t_[i - 1]);
      return (1.0 - w) * tab_v_[i - 1] + w * tab_v_[i];
    }
  }
  return 0.0;
}

double Schedule::integral(double a, double b) const {
  if (b <= a) return 0.0;
  switch (family_) {
    case Family::constant:
      return c_ * (b - a);
    case Family::power: {
      if (p_ == -1.0) return c_ * (std::log1p(b) - std::log1p(a));
      double q = p_ + 1.0;
      return c_ * (std::pow(1.0 + b, q) - std::pow(1.0 + a, q)) / q;
    }
    case Family::exp_decay: {
      if (p_ == 0.0) return c_ * (b - a);
      return c_ * (std::exp(-p_ * a) - std::exp(-p_ * b)) / p_;
    }
    case Family::log_grow: {
      // antiderivative of log(1+t): (1+t)log(1+t) - t
      auto F = [](double t) { return (1.0 + t) * std::log1p(t) - t; };
      return c_ * (F(b) - F(a));
    }
    default:
      return adaptive(*this, a, b);
  }
}

bool Schedule::strictly_positive() const {
  switch (family_) {
    case Family::constant:
    case Family::power:
    case Family::exp_decay:
    case Family::inv_log:
    case Family::osc_harmonic:
      return c_ > 0.0;
    case Family::log_grow:
      return false;  // zero at t = 0
    case Family::tabulated:
      return *std::min_element(tab_v_.begin(), tab_v_.end()) > 0.0;
  }
  return false;
}

bool Schedule::vanishes_at_infinity() const {
  switch (family_) {
    case Family::constant:
      return c_ == 0.0;
    case Family::power:
      return c_ == 0.0 || p_ < 0.0;
    case Family::exp_decay:
      return c_ == 0.0 || p_ > 0.0;
    case Family::inv_log:
    case Family::osc_harmonic:
      return true;
    case Family::log_grow:
      return c_ == 0.0;
    case Family::tabulated:
      return tab_v_.back() == 0.0;  // constant extrapolation beyond the table
  }
  return false;
}

std::string Schedule::describe() const {
  char buf[128];
  switch (family_) {
    case Family::constant:
      std::snprintf(buf, sizeof buf, "constant(%g)", c_);
      break;
    case Family::power:
      std::snprintf(buf, sizeof buf, "%g*(1+t)^%g", c_, p_);
      break;
    case Family::exp_decay:
      std::snprintf(buf, sizeof buf, "%g*exp(-%g t)", c_, p_);
      break;
    case Family::inv_log:
      std::snprintf(buf, sizeof buf, "%g/log(2+t)", c_);
      break;
    case Family::osc_harmonic:
      std::snprintf(buf, sizeof buf, "%g*(2+sin t)/(1+t)", c_);
      break;
    case Family::log_grow:
      std::snprintf(buf, sizeof buf, "%g*log(1+t)", c_);
      break;
    case Family::tabulated:
      std::snprintf(buf, sizeof buf, "tabulated(%zu points)", tab_t_.size());
      break;
  }
  return buf;
}

Forcing::Forcing(Vec f_inf, Vec dir, Schedule s)
    : f_inf_(std::move(f_inf)), dir_(std::move(dir)), s_(std::move(s)) {
  if (f_inf_.size() != dir_.size())
    throw ConfigError("forcing: limit and direction dimensions differ");
}

Forcing Forcing::constant(Vec f) {
  Vec zero = Vec::Zero(f.size());
  return Forcing(std::move(f), std::move(zero), Schedule::constant(0.0));
}

bool Forcing::has_limit() const {
  return dir_.norm() == 0.0 || s_.vanishes_at_infinity();
}

std::string Forcing::describe() const {
  return "f_inf + [" + s_.describe() + "] * dir";
}

}  // namespace monoflow
