#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "enumerate.hpp"

namespace momo {

enum class Moment { count, m1, m2 };

inline const char* moment_name(Moment m) {
  switch (m) {
    case Moment::count: return "count";
    case Moment::m1: return "m1";
    case Moment::m2: return "m2";
  }
  return "?";
}

enum class ErrorFamily { h_free_count, h_full_count, moment };

// Shape of a theorem's O-term. For counts the scale is x^exponent (log x)^log_power;
// for moments it is x^exponent (loglog x)^log_power / log x, matching the
// remainders x/log x, x loglog x/log x, x^{1/h}/log x, x^{1/h} loglog x/log x.
struct ErrorClass {
  double exponent = 0.0;
  int log_power = 0;
  ErrorFamily family = ErrorFamily::moment;

  double scale(u64 x) const {
    const double xd = double(x);
    const double lx = std::log(xd);
    if (family == ErrorFamily::moment) {
      double v = std::pow(xd, exponent) / lx;
      if (log_power) v *= std::log(lx);
      return v;
    }
    double v = std::pow(xd, exponent);
    if (log_power) v *= lx;
    return v;
  }
};

namespace detail {

// Equality of a floating theta against an exact fraction: exact when theta was
// produced by the same division, with a snap window for decimal inputs.
inline bool theta_equals(double theta, unsigned num, unsigned den) {
  const double q = double(num) / double(den);
  return theta == q || std::abs(theta - q) < 1e-12;
}

inline void check_theta(double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw std::domain_error("theta must be in [0,1)");
}

}  // namespace detail

// Case split of the h-free remainder: x^theta, x^theta log x at theta = 1/h,
// else x^{1/h}.
inline ErrorClass error_exponent_h_free(double theta, unsigned h) {
  detail::check_theta(theta);
  check_h(h);
  ErrorClass ec;
  ec.family = ErrorFamily::h_free_count;
  if (detail::theta_equals(theta, 1, h)) {
    ec.exponent = theta;
    ec.log_power = 1;
  } else if (theta > 1.0 / double(h)) {
    ec.exponent = theta;
    ec.log_power = 0;
  } else {
    ec.exponent = 1.0 / double(h);
    ec.log_power = 0;
  }
  return ec;
}

// Case split of the h-full remainder: x^{theta/h}; x^{1/(h+1)} log x when
// theta = h/(h+i) for some i in 1..h-1; else x^{1/(h+1)}.
inline ErrorClass error_exponent_h_full(double theta, unsigned h) {
  detail::check_theta(theta);
  check_h(h);
  ErrorClass ec;
  ec.family = ErrorFamily::h_full_count;
  for (unsigned i = 1; i <= h - 1; ++i) {
    if (detail::theta_equals(theta, h, h + i)) {
      ec.exponent = 1.0 / double(h + 1);
      ec.log_power = 1;
      return ec;
    }
  }
  if (theta > double(h) / double(h + 1)) {
    ec.exponent = theta / double(h);
    ec.log_power = 0;
  } else {
    ec.exponent = 1.0 / double(h + 1);
    ec.log_power = 0;
  }
  return ec;
}

// A theorem's main-term value at x, with the per-term breakdown
// (largest order first) and the O-term scale class.
struct Prediction {
  u64 x = 0;
  unsigned h = 2;
  Family family = Family::h_free;
  Moment moment = Moment::count;
  double main_value = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  ErrorClass error_class;
};

inline Prediction predict(u64 x, unsigned h, Family family, Moment moment, const ConstantsBundle& bundle,
                          const MonoidParams& params) {
  check_h(h);
  params.validate();
  if (x < 16) throw std::domain_error("predict: x must be >= 16 (loglog domain)");
  if (bundle.h != h) throw std::invalid_argument("predict: bundle computed for different h");
  if (bundle.x_mode != params.x_mode || (params.x_mode == XMode::q_power && bundle.q != params.q))
    throw std::invalid_argument("predict: bundle computed for different X mode");

  const double xd = double(x);
  const double llx = std::log(std::log(xd));
  const double kappa = params.kappa;
  Prediction p;
  p.x = x;
  p.h = h;
  p.family = family;
  p.moment = moment;

  if (family == Family::h_free) {
    const double dens = kappa / bundle.zeta_h.value;  // kappa / zeta_M(h)
    switch (moment) {
      case Moment::count:
        p.terms = {{"x", dens * xd}};
        p.error_class = error_exponent_h_free(params.theta, h);
        break;
      case Moment::m1:
        p.terms = {{"x loglog x", dens * xd * llx}, {"x", dens * bundle.C3.value * xd}};
        p.error_class = ErrorClass{1.0, 0, ErrorFamily::moment};
        break;
      case Moment::m2:
        p.terms = {{"x (loglog x)^2", dens * xd * llx * llx},
                   {"x loglog x", dens * (2.0 * bundle.C3.value + 1.0) * xd * llx},
                   {"x", dens * bundle.C4.value * xd}};
        p.error_class = ErrorClass{1.0, 1, ErrorFamily::moment};
        break;
    }
  } else {
    const double lead = kappa * bundle.gamma.value;  // kappa gamma_h
    const double xr = std::pow(xd, 1.0 / double(h));
    const double hd = double(h);
    switch (moment) {
      case Moment::count:
        p.terms = {{"x^(1/h)", lead * xr}};
        p.error_class = error_exponent_h_full(params.theta, h);
        break;
      case Moment::m1:
        p.terms = {{"x^(1/h) loglog x", hd * lead * xr * llx}, {"x^(1/h)", bundle.D3.value * lead * xr}};
        p.error_class = ErrorClass{1.0 / hd, 0, ErrorFamily::moment};
        break;
      case Moment::m2:
        p.terms = {{"x^(1/h) (loglog x)^2", hd * hd * lead * xr * llx * llx},
                   {"x^(1/h) loglog x", (2.0 * bundle.D3.value + hd) * hd * lead * xr * llx},
                   {"x^(1/h)", bundle.D4.value * lead * xr}};
        p.error_class = ErrorClass{1.0 / hd, 1, ErrorFamily::moment};
        break;
    }
  }
  p.main_value = 0.0;
  for (auto& [label, v] : p.terms) p.main_value += v;
  return p;
}

struct Residual {
  double residual = 0.0;    // empirical - main_value
  double normalized = 0.0;  // residual / error scale at x
};

inline Residual residual_report(double empirical, const Prediction& pred) {
  Residual r;
  r.residual = empirical - pred.main_value;
  r.normalized = r.residual / pred.error_class.scale(pred.x);
  return r;
}

inline Residual residual_report(const MomentTally& tally, const Prediction& pred) {
  double empirical = 0.0;
  switch (pred.moment) {
    case Moment::count: empirical = double(tally.count); break;
    case Moment::m1: empirical = double(tally.sum_omega); break;
    case Moment::m2: empirical = double(tally.sum_omega_sq); break;
  }
  return residual_report(empirical, pred);
}

}  // namespace momo
