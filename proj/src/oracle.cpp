#include "optreg/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "optreg/errors.hpp"
#include "optreg/likelihood.hpp"

namespace optreg {

using std::numbers::pi;

namespace {
constexpr double kQuadTolerance = 1e-12;
}

CoinPrior coin_prior_from(const PriorSpec& prior) {
  if (prior.kind == PriorKind::Primitive) return CoinPrior::Primitive;
  if (prior.kind == PriorKind::JeffreysCoin) return CoinPrior::Jeffreys;
  throw UsageError("coin oracle supports the primitive and Jeffreys priors only");
}

SizeCredibility coin_closed_form(CoinPrior prior, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  const double root = std::sqrt(1.0 - lambda);
  if (prior == CoinPrior::Primitive) return {root, 0.5 * (2.0 + lambda) * root};
  const double s = 1.0 - 2.0 / pi * std::asin(std::sqrt(lambda));
  return {s, s + 2.0 / pi * std::sqrt(lambda * (1.0 - lambda))};
}

CoinOracle::CoinOracle(CoinPrior prior, Counts counts) : prior_(prior), counts_(std::move(counts)) {
  Pom(PomKind::Coin).check_counts(counts_);
  const long total = counts_.total();
  if (total == 0) {
    degenerate_ = true;
    return;
  }
  p_hat_ = static_cast<double>(counts_[0]) / static_cast<double>(total);
  log_L_max_ = log_ratio(p_hat_);  // log_ratio uses log_L_max_ = 0 here
  evidence_ratio_ = weighted(0.0, 1.0, true);
  log_L_D_ = log_L_max_ + std::log(evidence_ratio_);
}

double CoinOracle::log_ratio(double p1) const {
  ProbabilityVector p;
  p.size = 2;
  p[0] = p1;
  p[1] = 1.0 - p1;
  return log_likelihood(counts_, p) - log_L_max_;
}

double CoinOracle::weighted(double a, double b, bool with_likelihood) const {
  if (b <= a) return 0.0;
  if (!with_likelihood) {
    // prior content of [a, b] in closed form
    if (prior_ == CoinPrior::Primitive) return b - a;
    return 2.0 / pi * (std::asin(std::sqrt(b)) - std::asin(std::sqrt(a)));
  }
  const auto g = [&](double p1) { return with_likelihood ? std::exp(log_ratio(p1)) : 1.0; };
  if (prior_ == CoinPrior::Primitive) return numerics::integrate(g, a, b, kQuadTolerance);
  // p1 = sin^2(alpha) makes the Jeffreys prior the flat measure 2/pi dalpha.
  const double lo = std::asin(std::sqrt(a));
  const double hi = std::asin(std::sqrt(b));
  return 2.0 / pi *
         numerics::integrate([&](double alpha) { return g(std::sin(alpha) * std::sin(alpha)); }, lo, hi,
                             kQuadTolerance);
}

std::pair<double, double> CoinOracle::interval(double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  if (degenerate_ || lambda == 0.0) return {0.0, 1.0};
  const double threshold = std::log(lambda);
  const auto g = [&](double p1) { return log_ratio(p1) - threshold; };
  const double lo = g(0.0) >= 0.0 ? 0.0 : numerics::bisect(g, 0.0, p_hat_, 1e-15);
  const double hi = g(1.0) >= 0.0 ? 1.0 : numerics::bisect(g, p_hat_, 1.0, 1e-15);
  return {lo, hi};
}

double CoinOracle::size(double lambda) const {
  const auto [a, b] = interval(lambda);
  if (a == 0.0 && b == 1.0) return 1.0;
  return weighted(a, b, false);
}

double CoinOracle::credibility(double lambda) const {
  const auto [a, b] = interval(lambda);
  if (a == 0.0 && b == 1.0) return 1.0;
  return weighted(a, b, true) / evidence_ratio_;
}

double CoinOracle::find_lambda(double target, TargetMode mode) const {
  if (!(target > 0.0 && target < 1.0)) throw UsageError("target must lie strictly between 0 and 1");
  if (degenerate_) throw UsageError("no lambda inversion for N = 0");
  const auto f = [&](double lambda) {
    return (mode == TargetMode::Size ? size(lambda) : credibility(lambda)) - target;
  };
  return numerics::bisect(f, 0.0, 1.0, 1e-14);
}

CoinCurve coin_quadrature(CoinPrior prior, const Counts& counts, const std::vector<double>& lambdas) {
  const CoinOracle oracle(prior, counts);
  CoinCurve out;
  out.prior = prior;
  out.counts = counts;
  out.lambdas = lambdas;
  out.log_L_max = oracle.log_L_max();
  out.log_L_D = oracle.log_L_D();
  for (double lambda : lambdas) {
    out.s.push_back(oracle.size(lambda));
    out.c.push_back(oracle.credibility(lambda));
  }
  return out;
}

}  // namespace optreg
