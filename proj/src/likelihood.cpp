#include "optreg/likelihood.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "optreg/errors.hpp"

namespace optreg {

using std::numbers::pi;

double log_likelihood(const Counts& counts, const ProbabilityVector& p) {
  if (counts.size() != p.size) throw UsageError("counts and probabilities differ in length");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size; ++k) {
    if (counts[k] == 0) continue;
    const double pk = p[k];
    if (pk <= 0.0) return -std::numeric_limits<double>::infinity();
    acc += static_cast<double>(counts[k]) * std::log(pk);
  }
  return acc;
}

double log_likelihood(const Pom& pom, const Counts& counts, const ReconstructionPoint& pt) {
  pom.check_counts(counts);
  return log_likelihood(counts, pom.probabilities(pt));
}

namespace {

constexpr std::size_t kBoundaryGrid = 4096;

// Largest log-likelihood on the boundary circle: dense scan, then golden
// refinement around the best grid angle.
ReconstructionPoint boundary_argmax(const Pom& pom, const Counts& counts, double angle_tol) {
  const auto f = [&](double a) { return log_likelihood(pom, counts, pom.boundary_point(a)); };
  const double step = 2.0 * pi / static_cast<double>(kBoundaryGrid);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kBoundaryGrid; ++k) {
    const double v = f(step * static_cast<double>(k));
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double centre = step * static_cast<double>(best);
  const double angle = numerics::golden_maximize(f, centre - step, centre + step, angle_tol);
  return pom.boundary_point(angle);
}

}  // namespace

MleResult mle(const Pom& pom, const Counts& counts, double tol) {
  pom.check_counts(counts);
  if (counts.total() == 0) throw UsageError("the likelihood is constant for N = 0; no maximum-likelihood point");
  MleResult out;
  if (pom.kind() == PomKind::Coin) {
    // Frequencies always give a point of the closed segment.
    out.point = *pom.coordinates_from_frequencies(counts);
  } else if (auto candidate = pom.coordinates_from_frequencies(counts)) {
    out.point = *candidate;
  } else if (pom.kind() == PomKind::CrossHair4 &&
             (counts[0] + counts[1] == 0 || counts[2] + counts[3] == 0)) {
    // One axis carries no data: the likelihood is flat along it, so take the
    // axis coordinate 0 and the frequency estimate along the other.
    const bool no_x = counts[0] + counts[1] == 0;
    const long a = no_x ? counts[2] : counts[0];
    const long b = no_x ? counts[3] : counts[1];
    const double v = static_cast<double>(a - b) / static_cast<double>(a + b);
    out.point = no_x ? ReconstructionPoint::disk(0.0, v) : ReconstructionPoint::disk(v, 0.0);
  } else {
    out.point = boundary_argmax(pom, counts, std::min(tol, 1e-12));
  }
  out.on_boundary = out.point.radius() >= 1.0 - kBoundaryTolerance;
  out.log_L_max = log_likelihood(pom, counts, out.point);
  return out;
}

Estimate prior_likelihood(const Pom& pom, const PriorSpec& prior, const Counts& counts,
                          const IntegrationBudget& budget) {
  pom.check_counts(counts);
  check_compatible(prior, pom);
  if (counts.total() == 0) return {0.0, 0.0};
  const double log_max = mle(pom, counts).log_L_max;
  const auto ratio = [&](const ReconstructionPoint& pt) {
    return std::exp(log_likelihood(pom, counts, pt) - log_max);
  };
  if (budget.method == IntegrationBudget::Method::Quadrature) {
    const double z = normalize(prior, pom, budget).value;
    const double integral = integrate_over_space(
        pom, [&](const ReconstructionPoint& pt) { return density(prior, pom, pt) * ratio(pt); }, budget);
    const double mean = integral / z;
    if (!(mean > 0.0)) throw IntegrationError("prior likelihood integral is not positive");
    return {log_max + std::log(mean), 0.0};
  }
  const PriorSample draw = sample(prior, pom, budget.samples, budget.seed);
  const WeightedMean m = weighted_mean(draw.points, ratio);
  if (!(m.value > 0.0) || !std::isfinite(m.value)) throw IntegrationError("prior likelihood estimate failed");
  return {log_max + std::log(m.value), m.std_error / m.value};
}

BayesianMean bayesian_mean(const Pom& pom, const PriorSpec& prior, const std::optional<Counts>& counts,
                           const IntegrationBudget& budget) {
  check_compatible(prior, pom);
  PriorSample draw = sample(prior, pom, budget.samples, budget.seed);
  if (counts && counts->total() > 0) {
    const double log_max = mle(pom, *counts).log_L_max;
    for (auto& wp : draw.points) wp.weight *= std::exp(log_likelihood(pom, *counts, wp.pt) - log_max);
  }
  BayesianMean out;
  out.point.dim = pom.dimension();
  for (std::size_t c = 0; c < pom.dimension(); ++c) {
    const WeightedMean m = weighted_mean(draw.points, [c](const ReconstructionPoint& pt) { return pt.coords[c]; });
    out.point.coords[c] = m.value;
    out.std_error[c] = m.std_error;
    out.effective_size = m.effective_size;
  }
  out.low_effective_size = out.effective_size < 100.0;
  return out;
}

Counts simulate(const Pom& pom, const ReconstructionPoint& true_point, long clicks, std::uint64_t seed) {
  if (clicks < 0) throw UsageError("number of clicks must be nonnegative");
  if (!pom.contains(true_point)) throw DomainError("true point outside the reconstruction space");
  const ProbabilityVector p = pom.probabilities(true_point);
  Counts out{std::vector<long>(p.size, 0)};
  numerics::Rng rng(numerics::split_seed(seed, 0));
  for (long i = 0; i < clicks; ++i) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t k = 0;
    for (; k + 1 < p.size; ++k) {
      cumulative += std::max(0.0, p[k]);
      if (u < cumulative) break;
    }
    ++out.n[k];
  }
  return out;
}

}  // namespace optreg
