#include "optreg/blr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "optreg/errors.hpp"

namespace optreg {

using std::numbers::pi;

double lambda0(const Pom& pom, const Counts& counts) {
  pom.check_counts(counts);
  if (counts.total() == 0) return 1.0;
  const double log_max = mle(pom, counts).log_L_max;
  // The log-likelihood is concave, so its minimum over the closed space is
  // attained on the boundary. Outcomes with clicks whose probability
  // vanishes somewhere give lambda0 = 0 directly.
  for (std::size_t k = 0; k < pom.num_outcomes(); ++k)
    if (counts[k] > 0 && std::isinf(log_likelihood(pom, counts, pom.vanishing_point(k)))) return 0.0;
  double log_min = std::numeric_limits<double>::infinity();
  if (pom.is_disk()) {
    const std::size_t grid = 4096;
    const double step = 2.0 * pi / static_cast<double>(grid);
    const auto f = [&](double a) { return -log_likelihood(pom, counts, pom.boundary_point(a)); };
    std::size_t best = 0;
    for (std::size_t k = 0; k < grid; ++k) {
      const double v = -f(step * static_cast<double>(k));
      if (v < log_min) {
        log_min = v;
        best = k;
      }
    }
    const double centre = step * static_cast<double>(best);
    const double a = numerics::golden_maximize(f, centre - step, centre + step, 1e-12);
    log_min = std::min(log_min, -f(a));
  } else {
    log_min = std::min(log_likelihood(pom, counts, ReconstructionPoint::segment(-1.0)),
                       log_likelihood(pom, counts, ReconstructionPoint::segment(1.0)));
  }
  return std::exp(log_min - log_max);
}

bool membership(const Pom& pom, const Counts& counts, const ReconstructionPoint& pt, double lambda,
                double log_L_max) {
  if (lambda < 0.0 || lambda > 1.0) throw UsageError("lambda must lie in [0, 1]");
  if (!pom.contains(pt)) throw DomainError("point outside the reconstruction space");
  return log_likelihood(pom, counts, pt) >= std::log(lambda) + log_L_max;
}

std::vector<double> default_lambda_grid(double lambda0, std::size_t points, std::size_t refine) {
  if (points < 3) throw UsageError("lambda grid needs at least three points");
  const double span = 1.0 - lambda0;
  std::vector<double> out{lambda0};
  // s drops steeply just above lambda0 (like 1 - C u^(1/n)); log-spaced
  // nodes below the first regular node keep the integral of s honest there.
  const double step = 1.0 / static_cast<double>(points - 1);
  const double u1 = 1.0 - (1.0 - step) * (1.0 - step);
  for (std::size_t j = refine; j >= 1; --j)
    out.push_back(lambda0 + span * u1 * std::pow(10.0, -static_cast<double>(j) / 4.0));
  for (std::size_t i = 1; i + 1 < points; ++i) {
    // t runs from 1 (lambda0) down to 0 (lambda = 1).
    const double t = static_cast<double>(points - 1 - i) * step;
    out.push_back(1.0 - span * t * t);
  }
  out.push_back(1.0);
  return out;
}

BlrSampler::BlrSampler(const Pom& pom, const PriorSpec& prior, const Counts& counts,
                       const IntegrationBudget& budget) {
  pom.check_counts(counts);
  check_compatible(prior, pom);
  const PriorSample draw = sample(prior, pom, budget.samples, budget.seed);
  redraws_ = draw.redraws;
  const std::size_t n = draw.points.size();
  log_L_max_ = counts.total() > 0 ? mle(pom, counts).log_L_max : 0.0;
  std::vector<double> log_ratio(n);
  for (std::size_t i = 0; i < n; ++i)
    log_ratio[i] = log_likelihood(pom, counts, draw.points[i].pt) - log_L_max_;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return log_ratio[a] > log_ratio[b]; });
  log_ratio_.resize(n);
  cw_.assign(n + 1, 0.0);
  cw2_.assign(n + 1, 0.0);
  cv_.assign(n + 1, 0.0);
  cv2_.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const double w = draw.points[i].weight;
    const double v = w * std::exp(log_ratio[i]);
    log_ratio_[k] = log_ratio[i];
    cw_[k + 1] = cw_[k] + w;
    cw2_[k + 1] = cw2_[k] + w * w;
    cv_[k + 1] = cv_[k] + v;
    cv2_[k + 1] = cv2_[k] + v * v;
  }
}

std::size_t BlrSampler::members(double lambda) const {
  const double threshold = std::log(lambda);
  // First index whose log ratio falls below the threshold.
  const auto it = std::partition_point(log_ratio_.begin(), log_ratio_.end(),
                                       [&](double lr) { return lr >= threshold; });
  return static_cast<std::size_t>(it - log_ratio_.begin());
}

namespace {

// Self-normalized fraction of the weight inside the region and its
// delta-method standard error.
Estimate fraction(const std::vector<double>& cw, const std::vector<double>& cw2, std::size_t m) {
  const double total = cw.back();
  if (!(total > 0.0)) throw IntegrationError("sample carries no weight");
  const double f = cw[m] / total;
  const double in2 = cw2[m];
  const double out2 = cw2.back() - in2;
  const double var = in2 * (1.0 - f) * (1.0 - f) + out2 * f * f;
  return {f, std::sqrt(std::max(var, 0.0)) / total};
}

}  // namespace

Estimate BlrSampler::size(double lambda) const { return fraction(cw_, cw2_, members(lambda)); }

Estimate BlrSampler::credibility(double lambda) const { return fraction(cv_, cv2_, members(lambda)); }

Estimate BlrSampler::log_prior_likelihood() const {
  // mean ratio = sum w r / sum w
  const double sw = cw_.back();
  const double mean = cv_.back() / sw;
  // sum_i w_i^2 (r_i - mean)^2 = sum (w r)^2 - 2 mean sum w^2 r + mean^2 sum w^2;
  // the cross term is recomputed exactly from the sorted data.
  double cross = 0.0;
  for (std::size_t k = 0; k < log_ratio_.size(); ++k) {
    const double w = cw_[k + 1] - cw_[k];
    cross += w * w * std::exp(log_ratio_[k]);
  }
  const double var = cv2_.back() - 2.0 * mean * cross + mean * mean * cw2_.back();
  const double se = std::sqrt(std::max(var, 0.0)) / sw;
  if (!(mean > 0.0) || !std::isfinite(mean)) throw IntegrationError("prior likelihood estimate failed");
  return {log_L_max_ + std::log(mean), se / mean};
}

namespace {

void check_grid(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw UsageError("lambda grid is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0 && lambdas[i] <= 1.0)) throw UsageError("lambda grid values must lie in [0, 1]");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw UsageError("lambda grid must be strictly increasing");
  }
}

}  // namespace

BlrCurve blr_curve(const Pom& pom, const PriorSpec& prior, const Counts& counts, const std::vector<double>& lambdas,
                   const IntegrationBudget& budget, bool with_direct_credibility) {
  check_grid(lambdas);
  pom.check_counts(counts);
  check_compatible(prior, pom);
  BlrCurve curve;
  curve.lambdas = lambdas;
  curve.dimension = pom.dimension();
  const std::size_t n = lambdas.size();
  if (counts.total() == 0) {
    curve.degenerate = true;
    curve.lambda0 = 1.0;
    curve.s.assign(n, 1.0);
    curve.s_raw.assign(n, 1.0);
    curve.s_stderr.assign(n, 0.0);
    if (with_direct_credibility) {
      curve.c_direct.assign(n, 1.0);
      curve.c_direct_raw.assign(n, 1.0);
      curve.c_stderr.assign(n, 0.0);
    }
    return curve;
  }
  const MleResult peak = mle(pom, counts);
  curve.log_L_max = peak.log_L_max;
  curve.mle_on_boundary = peak.on_boundary;
  curve.lambda0 = lambda0(pom, counts);

  const BlrSampler sampler(pom, prior, counts, budget);
  const Estimate evidence = sampler.log_prior_likelihood();
  curve.log_L_D = evidence.value;
  curve.log_L_D_stderr = evidence.std_error;
  for (double lambda : lambdas) {
    const Estimate s = sampler.size(lambda);
    curve.s_raw.push_back(s.value);
    curve.s_stderr.push_back(s.std_error);
    if (with_direct_credibility) {
      const Estimate c = sampler.credibility(lambda);
      curve.c_direct_raw.push_back(c.value);
      curve.c_stderr.push_back(c.std_error);
    }
  }
  curve.s = numerics::isotonic_nonincreasing(curve.s_raw);
  if (with_direct_credibility) curve.c_direct = numerics::isotonic_nonincreasing(curve.c_direct_raw);
  return curve;
}

BlrCurve size_curve(const Pom& pom, const PriorSpec& prior, const Counts& counts, const std::vector<double>& lambdas,
                    const IntegrationBudget& budget) {
  return blr_curve(pom, prior, counts, lambdas, budget, false);
}

std::vector<Estimate> credibility_direct(const Pom& pom, const PriorSpec& prior, const Counts& counts,
                                         const std::vector<double>& lambdas, const IntegrationBudget& budget) {
  check_grid(lambdas);
  std::vector<Estimate> out;
  out.reserve(lambdas.size());
  if (counts.total() == 0) {
    out.assign(lambdas.size(), Estimate{1.0, 0.0});
    return out;
  }
  const BlrSampler sampler(pom, prior, counts, budget);
  for (double lambda : lambdas) out.push_back(sampler.credibility(lambda));
  return out;
}

Contour boundary_contour(const Pom& pom, const Counts& counts, double lambda, std::size_t n_angles) {
  if (!pom.is_disk()) throw UsageError("boundary contours are traced on the disk models; use coin_interval");
  if (!(lambda > 0.0 && lambda < 1.0)) throw UsageError("contour lambda must lie in (0, 1)");
  if (n_angles < 3) throw UsageError("contour needs at least three rays");
  const MleResult peak = mle(pom, counts);
  const double threshold = std::log(lambda) + peak.log_L_max;
  const auto loglik = [&](double x, double y) {
    return log_likelihood(pom, counts, ReconstructionPoint::disk(x, y));
  };

  Contour out;
  out.lambda = lambda;
  out.centre = peak.point;
  if (peak.on_boundary) {
    out.approximate = true;
    double shrink = 1e-6;
    for (;;) {
      const ReconstructionPoint c =
          ReconstructionPoint::disk(peak.point.x() * (1.0 - shrink), peak.point.y() * (1.0 - shrink));
      if (loglik(c.x(), c.y()) > threshold || shrink < 1e-15) {
        out.centre = c;
        break;
      }
      shrink *= 0.5;
    }
  }
  const double cx = out.centre.x();
  const double cy = out.centre.y();
  out.points.reserve(n_angles);
  for (std::size_t k = 0; k < n_angles; ++k) {
    const double angle = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n_angles);
    const double dx = std::cos(angle), dy = std::sin(angle);
    // |c + t d| = 1
    const double b = cx * dx + cy * dy;
    const double t_exit = -b + std::sqrt(std::max(0.0, b * b - (cx * cx + cy * cy) + 1.0));
    ContourPoint p{angle, cx + t_exit * dx, cy + t_exit * dy, false};
    if (loglik(p.x, p.y) >= threshold) {
      p.clipped = true;
    } else {
      const double t = numerics::bisect([&](double tt) { return loglik(cx + tt * dx, cy + tt * dy) - threshold; },
                                        0.0, t_exit, 0.0, 2000);
      p.x = cx + t * dx;
      p.y = cy + t * dy;
    }
    out.points.push_back(p);
  }
  return out;
}

std::pair<double, double> coin_interval(const Counts& counts, double lambda) {
  const Pom coin(PomKind::Coin);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  if (counts.total() == 0 || lambda == 0.0) return {-1.0, 1.0};
  const MleResult peak = mle(coin, counts);
  const double threshold = std::log(lambda) + peak.log_L_max;
  const auto g = [&](double u) { return log_likelihood(coin, counts, ReconstructionPoint::segment(u)) - threshold; };
  const double u_hat = peak.point.x();
  const double lo = g(-1.0) >= 0.0 ? -1.0 : numerics::bisect(g, -1.0, u_hat, 0.0, 2000);
  const double hi = g(1.0) >= 0.0 ? 1.0 : numerics::bisect(g, u_hat, 1.0, 0.0, 2000);
  return {lo, hi};
}

}  // namespace optreg
