#pragma once

// Asymptotic scaling classes and small least-squares helpers shared by the analyses.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "powerlawst/core_model.hpp"

namespace powerlawst {

enum class ScalingKind {
  kConstant,
  kLogarithmic,
  kPower,               // r^exponent
  kPolylog,             // log(r)^exponent
  kStretchedExponential // exp(gamma * sqrt(log r))
};

struct ScalingClass {
  ScalingKind kind = ScalingKind::kConstant;
  double exponent = 0.0;
  double gamma = 0.0;

  /// Representative growth function with unit prefactor.
  [[nodiscard]] double evaluate(double r) const {
    switch (kind) {
      case ScalingKind::kConstant: return 1.0;
      case ScalingKind::kLogarithmic: return std::log(r);
      case ScalingKind::kPower: return std::pow(r, exponent);
      case ScalingKind::kPolylog: return std::pow(std::log(r), exponent);
      case ScalingKind::kStretchedExponential: return std::exp(gamma * std::sqrt(std::log(r)));
    }
    return 0.0;
  }

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case ScalingKind::kConstant: return "constant";
      case ScalingKind::kLogarithmic: return "logarithmic";
      case ScalingKind::kPower: return "power";
      case ScalingKind::kPolylog: return "polylog";
      case ScalingKind::kStretchedExponential: return "stretched_exponential";
    }
    return "unknown";
  }

  [[nodiscard]] std::string describe() const {
    char buf[96];
    switch (kind) {
      case ScalingKind::kConstant: return "O(1)";
      case ScalingKind::kLogarithmic: return "O(log r)";
      case ScalingKind::kPower: std::snprintf(buf, sizeof buf, "O(r^%.6g)", exponent); return buf;
      case ScalingKind::kPolylog: std::snprintf(buf, sizeof buf, "O(log^%.6g r)", exponent); return buf;
      case ScalingKind::kStretchedExponential:
        std::snprintf(buf, sizeof buf, "O(exp(%.6g sqrt(log r)))", gamma);
        return buf;
    }
    return "?";
  }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Largest |y - fit(x)|.
  double max_abs_residual = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DomainError("least squares needs at least two paired samples");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least squares needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(ys[i] - (f.slope * xs[i] + f.intercept)));
  }
  return f;
}

/// Slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("log-log fit needs positive samples");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return least_squares(lx, ly).slope;
}

}  // namespace powerlawst
