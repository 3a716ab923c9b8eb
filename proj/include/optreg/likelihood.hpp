#pragma once

// Point likelihood of multinomial click counts, maximum-likelihood search over
// the reconstruction space, prior likelihood L(D), Bayesian means and data
// simulation. All likelihood arithmetic is in log space.

#include <cstdint>
#include <optional>

#include "optreg/prior.hpp"

namespace optreg {

// sum_k n_k log p_k with 0 log 0 = 0; -infinity when some n_k > 0 meets p_k = 0.
double log_likelihood(const Counts& counts, const ProbabilityVector& p);
double log_likelihood(const Pom& pom, const Counts& counts, const ReconstructionPoint& pt);

struct MleResult {
  ReconstructionPoint point;
  bool on_boundary = false;
  double log_L_max = 0.0;
};

// Maximizer over the closed reconstruction space. Uses the frequency
// stationary point when it is inside the space, otherwise a search along
// the boundary circle. Throws UsageError for N = 0.
MleResult mle(const Pom& pom, const Counts& counts, double tol = 1e-10);

struct LikelihoodSummary {
  double log_L_max = 0.0;
  ReconstructionPoint mle;
  bool mle_on_boundary = false;
  std::optional<double> log_L_D;
};

// log L(D) = log of the prior average of L(D|pt), with the standard error of
// the log estimate (zero on the quadrature path).
Estimate prior_likelihood(const Pom& pom, const PriorSpec& prior, const Counts& counts,
                          const IntegrationBudget& budget = {});

struct BayesianMean {
  ReconstructionPoint point;
  std::array<double, 2> std_error{};
  double effective_size = 0.0;
  // Set when the effective sample size falls below 100.
  bool low_effective_size = false;
};

// Prior mean without counts, posterior mean with counts, from one weighted
// sample of budget.samples points.
BayesianMean bayesian_mean(const Pom& pom, const PriorSpec& prior, const std::optional<Counts>& counts,
                           const IntegrationBudget& budget = {});

// Multinomial draw of N clicks at the probabilities of true_point.
Counts simulate(const Pom& pom, const ReconstructionPoint& true_point, long clicks, std::uint64_t seed);

}  // namespace optreg
