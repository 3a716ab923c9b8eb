#include "optreg/curvefit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "optreg/errors.hpp"

namespace optreg {

namespace {

constexpr std::size_t kMinGridPoints = 20;
constexpr double kZetaMin = 0.25;
constexpr double kZetaMax = 2.0;
constexpr double kQuadTolerance = 1e-10;

struct FitPoint {
  double u;
  double s;
  double weight;  // for the log-space residual
};

using Params = Eigen::Vector4d;  // a1, a2, b1, b2

double poly(double c1, double c2, double u) { return 1.0 + u * (c1 + u * c2); }

bool params_valid(const Params& p) {
  for (int k = 0; k <= 200; ++k) {
    const double u = k / 200.0;
    if (!(poly(p[0], p[1], u) > 0.0) || !(poly(p[2], p[3], u) > 0.0)) return false;
  }
  return p.allFinite();
}

double log_model(double u, double zeta, const Params& p) {
  return zeta * std::log1p(-u) + std::log(poly(p[0], p[1], u)) - std::log(poly(p[2], p[3], u));
}

double cost(const std::vector<FitPoint>& pts, double zeta, const Params& p) {
  double acc = 0.0;
  for (const auto& q : pts) {
    const double r = std::log(q.s) - log_model(q.u, zeta, p);
    acc += q.weight * r * r;
  }
  return acc;
}

// Levenberg-Marquardt on the weighted log residuals for a fixed exponent,
// started from the linearized (Pade-style) least-squares solution.
Params fit_rational(const std::vector<FitPoint>& pts, double zeta, double* final_cost) {
  const std::size_t n = pts.size();
  Params p = Params::Zero();
  {
    Eigen::MatrixXd a(n, 4);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& q = pts[i];
      const double y = q.s / std::pow(1.0 - q.u, zeta);
      const double sw = std::sqrt(q.weight) / y;
      a.row(static_cast<Eigen::Index>(i)) << sw * q.u, sw * q.u * q.u, -sw * q.u * y, -sw * q.u * q.u * y;
      rhs[static_cast<Eigen::Index>(i)] = sw * (y - 1.0);
    }
    const Params init = a.colPivHouseholderQr().solve(rhs);
    if (params_valid(init)) p = init;
  }
  double current = cost(pts, zeta, p);
  double damping = 1e-3;
  for (int iter = 0; iter < 300; ++iter) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (const auto& q : pts) {
      const double num = poly(p[0], p[1], q.u);
      const double den = poly(p[2], p[3], q.u);
      const double r = std::log(q.s) - log_model(q.u, zeta, p);
      // derivative of the residual
      const Eigen::Vector4d j(-q.u / num, -q.u * q.u / num, q.u / den, q.u * q.u / den);
      jtj += q.weight * j * j.transpose();
      jtr += q.weight * j * r;
    }
    bool improved = false;
    for (int attempt = 0; attempt < 20; ++attempt) {
      Eigen::Matrix4d lhs = jtj;
      lhs.diagonal() *= (1.0 + damping);
      lhs.diagonal().array() += 1e-12;
      const Params step = lhs.ldlt().solve(-jtr);
      const Params trial = p + step;
      if (params_valid(trial)) {
        const double c = cost(pts, zeta, trial);
        if (c < current) {
          const double gain = current - c;
          p = trial;
          current = c;
          damping = std::max(damping / 3.0, 1e-12);
          improved = gain > 1e-14 * (1.0 + current);
          break;
        }
      }
      damping *= 4.0;
    }
    if (!improved) break;
  }
  if (final_cost) *final_cost = current;
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double SizeFit::size_at_t(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  if (fallback_used_) return std::clamp(fallback_(t), 0.0, 1.0);
  const double u = 1.0 - t * t;
  const double value = std::pow(t, 2.0 * zeta_) * poly(num_[1], num_[2], u) / poly(den_[1], den_[2], u);
  return std::clamp(value, 0.0, 1.0);
}

double SizeFit::size(double lambda) const {
  if (lambda <= lambda0_) return 1.0;
  if (lambda >= 1.0) return 0.0;
  const double u = (lambda - lambda0_) / (1.0 - lambda0_);
  return size_at_t(std::sqrt(1.0 - u));
}

double SizeFit::tail_integral(double lambda) const {
  if (lambda >= 1.0) return 0.0;
  if (lambda < lambda0_) return (lambda0_ - lambda) + tail_integral(lambda0_);
  const double u = (lambda - lambda0_) / (1.0 - lambda0_);
  const double t_max = std::sqrt(1.0 - u);
  // lambda' = 1 - (1 - lambda0) t^2 turns the tail into a smooth integral in t.
  return (1.0 - lambda0_) *
         numerics::integrate([&](double t) { return size_at_t(t) * 2.0 * t; }, 0.0, t_max, kQuadTolerance);
}

double SizeFit::credibility(double lambda) const {
  if (lambda <= lambda0_) return 1.0;
  if (lambda >= 1.0) return 0.0;
  return std::clamp((lambda * size(lambda) + tail_integral(lambda)) / integral_total_, 0.0, 1.0);
}

SizeFit fit_size(const BlrCurve& curve, const Pom& pom) {
  const std::size_t n = curve.lambdas.size();
  if (curve.degenerate) throw UsageError("cannot fit a degenerate (N = 0) size curve");
  if (curve.s.size() != n || curve.s_stderr.size() != n) throw UsageError("size curve arrays differ in length");
  std::size_t finite = 0;
  for (double e : curve.s_stderr) finite += std::isfinite(e) ? 1 : 0;
  if (finite < kMinGridPoints) throw UsageError("size fit needs at least 20 grid points with finite errors");

  SizeFit fit;
  fit.lambda0_ = curve.lambda0;
  const double span = 1.0 - curve.lambda0;
  if (!(span > 0.0)) throw UsageError("lambda0 = 1: the likelihood is constant");

  std::vector<FitPoint> pts;
  std::vector<double> errors;
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = curve.lambdas[i];
    if (!(lam > curve.lambda0 && lam < 1.0) || !(curve.s[i] > 0.0) || !std::isfinite(curve.s_stderr[i])) continue;
    pts.push_back({(lam - curve.lambda0) / span, curve.s[i], 0.0});
    errors.push_back(curve.s_stderr[i]);
  }
  if (pts.size() < 5) throw UsageError("size fit has fewer usable points than parameters");
  bool all_one = true;
  for (const auto& q : pts) all_one = all_one && q.s >= 1.0;
  if (all_one) throw UsageError("size curve is constant; nothing to fit");

  const double med_err = median(errors);
  const double floor = std::max(1e-6, 0.25 * med_err);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double sigma = std::max(errors[i], floor);
    pts[i].weight = (pts[i].s / sigma) * (pts[i].s / sigma);
  }

  Params best;
  if (curve.mle_on_boundary) {
    fit.zeta_fitted_ = true;
    const auto neg_cost = [&](double zeta) {
      double c = 0.0;
      fit_rational(pts, zeta, &c);
      return -c;
    };
    fit.zeta_ = numerics::golden_maximize(neg_cost, kZetaMin, kZetaMax, 1e-5);
  } else {
    fit.zeta_ = 0.5 * static_cast<double>(pom.dimension());
  }
  best = fit_rational(pts, fit.zeta_, nullptr);
  fit.num_ = {1.0, best[0], best[1]};
  fit.den_ = {1.0, best[2], best[3]};

  double ss = 0.0;
  for (const auto& q : pts) {
    const double d = fit.size(curve.lambda0 + q.u * span) - q.s;
    ss += d * d;
  }
  fit.residual_ = std::sqrt(ss / static_cast<double>(pts.size()));

  bool acceptable = fit.residual_ <= 5.0 * med_err;
  double prev = 1.0;
  for (int k = 0; k <= 2000 && acceptable; ++k) {
    const double u = k / 2000.0;
    const double raw = std::pow(1.0 - u, fit.zeta_) * poly(best[0], best[1], u) / poly(best[2], best[3], u);
    if (!std::isfinite(raw) || raw > 1.0 + 1e-9 || raw < 0.0 || raw > prev + 1e-12) acceptable = false;
    prev = raw;
  }

  if (!acceptable) {
    fit.fallback_used_ = true;
    // Knots in t = sqrt(1 - u): t = 0 at lambda = 1 (s = 0), t = 1 at lambda0 (s = 1).
    std::vector<double> t{0.0}, s{0.0};
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      const double tk = std::sqrt(1.0 - it->u);
      if (tk <= t.back() || tk >= 1.0) continue;
      t.push_back(tk);
      s.push_back(std::clamp(it->s, s.back(), 1.0));
    }
    t.push_back(1.0);
    s.push_back(1.0);
    fit.fallback_ = numerics::MonotoneCubic(std::move(t), std::move(s));
    ss = 0.0;
    for (const auto& q : pts) {
      const double d = fit.size(curve.lambda0 + q.u * span) - q.s;
      ss += d * d;
    }
    fit.residual_ = std::sqrt(ss / static_cast<double>(pts.size()));
  }

  fit.integral_total_ = curve.lambda0 + fit.tail_integral(curve.lambda0);
  if (!(fit.integral_total_ > 0.0 && fit.integral_total_ <= 1.0 + 1e-9))
    throw IntegrationError("integral of the fitted size curve is outside (0, 1]");
  fit.integral_total_ = std::min(fit.integral_total_, 1.0);
  return fit;
}

double credibility_from_size(const SizeFit& fit, double lambda) { return fit.credibility(lambda); }

double ratio_limit(const SizeFit& fit) { return 1.0 / fit.integral_total(); }

double implied_log_prior_likelihood(const SizeFit& fit, double log_L_max) {
  return log_L_max + std::log(fit.integral_total());
}

double find_lambda(const SizeFit& fit, double target, TargetMode mode) {
  if (!(target > 0.0 && target < 1.0)) throw UsageError("target must lie strictly between 0 and 1");
  const auto f = [&](double lambda) {
    return (mode == TargetMode::Size ? fit.size(lambda) : fit.credibility(lambda)) - target;
  };
  return numerics::bisect(f, fit.lambda0(), 1.0, 1e-14);
}

}  // namespace optreg
