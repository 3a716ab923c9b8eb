#pragma once

// Smooth monotone model of the size curve and everything derived from it:
// credibility through the size/credibility integral relation, the
// lambda -> 1 ratio limit L_max / L(D), and lambda inversions.
//
// Model: with u = (lambda - lambda0) / (1 - lambda0),
//   s(lambda) = (1 - u)^zeta * (1 + a1 u + a2 u^2) / (1 + b1 u + b2 u^2),
// so s(lambda0) = 1 holds exactly and s vanishes like (1 - lambda)^zeta.
// When the rational fit is not monotone or misses the data, a monotone
// piecewise cubic in t = sqrt(1 - u) through the isotonic estimates is used.

#include <array>
#include <vector>

#include "optreg/blr.hpp"
#include "optreg/numerics.hpp"

namespace optreg {

class SizeFit {
 public:
  double size(double lambda) const;
  // [lambda s + int_lambda^1 s] / int_0^1 s
  double credibility(double lambda) const;
  // int_lambda^1 s(lambda') dlambda'
  double tail_integral(double lambda) const;

  double zeta() const { return zeta_; }
  double lambda0() const { return lambda0_; }
  const std::array<double, 3>& num_coeffs() const { return num_; }
  const std::array<double, 3>& den_coeffs() const { return den_; }
  double residual() const { return residual_; }
  double integral_total() const { return integral_total_; }
  bool fallback_used() const { return fallback_used_; }
  bool zeta_fitted() const { return zeta_fitted_; }

 private:
  friend SizeFit fit_size(const BlrCurve& curve, const Pom& pom);

  double size_at_t(double t) const;

  double zeta_ = 1.0;
  double lambda0_ = 0.0;
  std::array<double, 3> num_{1.0, 0.0, 0.0};
  std::array<double, 3> den_{1.0, 0.0, 0.0};
  double residual_ = 0.0;
  double integral_total_ = 1.0;
  bool fallback_used_ = false;
  bool zeta_fitted_ = false;
  numerics::MonotoneCubic fallback_;
};

// Weighted least squares of log s. zeta is d/2 for an interior MLE and fitted
// in [0.25, 2] for a boundary MLE. Throws UsageError with fewer than 20 usable
// grid points or a degenerate (constant) curve.
SizeFit fit_size(const BlrCurve& curve, const Pom& pom);

double credibility_from_size(const SizeFit& fit, double lambda);

// L_max / L(D) = 1 / int_0^1 s dlambda.
double ratio_limit(const SizeFit& fit);

// log L(D) implied by the fit: log L_max + log int_0^1 s dlambda.
double implied_log_prior_likelihood(const SizeFit& fit, double log_L_max);

enum class TargetMode { Size, Credibility };

// lambda at which the fitted size (or derived credibility) equals target;
// throws UsageError unless 0 < target < 1.
double find_lambda(const SizeFit& fit, double target, TargetMode mode);

}  // namespace optreg
