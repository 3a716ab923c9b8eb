#pragma once

// Prior densities on the reconstruction space.
//
// Densities are unnormalized and taken relative to the flat coordinate
// measure: dx dy on the unit disk, du on the coin segment. Sampling draws from
// the flat (primitive) proposal and carries the density ratio as an
// importance weight; every estimator that uses the weights self-normalizes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optreg/numerics.hpp"
#include "optreg/pom.hpp"

namespace optreg {

enum class PriorKind {
  Primitive,
  JeffreysCoin,
  JeffreysCrossHair4,
  JeffreysTrine3,
  HedgedCoin,
  Conjugate,
  MarginalPurityDisk,
};

struct PriorSpec {
  PriorKind kind = PriorKind::Primitive;
  // Conjugate only: target probabilities t and strength alpha > 0.
  ProbabilityVector target;
  double alpha = 0.0;
  std::optional<double> norm;

  static PriorSpec primitive() { return {}; }
  // Resolves to the Jeffreys prior of the given measurement model.
  static PriorSpec jeffreys(const Pom& pom);
  static PriorSpec hedged() { return {PriorKind::HedgedCoin, {}, 0.0, std::nullopt}; }
  static PriorSpec conjugate(const ProbabilityVector& target, double alpha);
  static PriorSpec marginal_purity() { return {PriorKind::MarginalPurityDisk, {}, 0.0, std::nullopt}; }

  // "primitive" | "jeffreys" | "hedged" | "conjugate" | "marginal-purity".
  static PriorSpec from_key(const std::string& key, const Pom& pom, std::span<const double> target = {},
                            double alpha = 0.0);
  std::string key() const;
};

// Throws UsageError when the prior is not defined for the model.
void check_compatible(const PriorSpec& prior, const Pom& pom);

// Unnormalized density at pt; +infinity on the measure-zero set where the
// Jeffreys densities diverge. Throws DomainError outside the space.
double density(const PriorSpec& prior, const Pom& pom, const ReconstructionPoint& pt);

// Normalized density of the flat proposal: 1/pi on the disk, 1/2 on the segment.
double proposal_density(const Pom& pom);

struct IntegrationBudget {
  enum class Method { Quadrature, MonteCarlo };
  Method method = Method::Quadrature;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  // Tensor-product polar rule: midpoint in angle, adaptive in radius.
  std::size_t angles = 512;
  double tolerance = 1e-10;
};

// Integral of f over the reconstruction space with respect to the flat
// coordinate measure, by the deterministic rule. f must be continuous away
// from the boundary (indicator functions belong on the Monte Carlo path).
double integrate_over_space(const Pom& pom, const std::function<double(const ReconstructionPoint&)>& f,
                            const IntegrationBudget& budget = {});

// Normalization constant Z with its standard error (zero for closed-form
// and quadrature results).
Estimate normalize(const PriorSpec& prior, const Pom& pom, const IntegrationBudget& budget = {});

// Copy of prior with norm filled in.
PriorSpec normalized(PriorSpec prior, const Pom& pom, const IntegrationBudget& budget = {});

struct WeightedPoint {
  ReconstructionPoint pt;
  double weight = 1.0;
};

struct PriorSample {
  std::vector<WeightedPoint> points;
  // Draws rejected for a non-finite weight and redrawn.
  std::size_t redraws = 0;
};

inline constexpr std::size_t kSampleChunk = 8192;

// count points from the flat proposal with weights density / proposal
// density. Deterministic for a fixed seed regardless of thread count.
PriorSample sample(const PriorSpec& prior, const Pom& pom, std::size_t count, std::uint64_t seed);

struct WeightedMean {
  double value = 0.0;
  double std_error = 0.0;
  // Kish effective sample size.
  double effective_size = 0.0;
};

WeightedMean weighted_mean(std::span<const WeightedPoint> points,
                           const std::function<double(const ReconstructionPoint&)>& f);

// Purity (1 + x^2 + y^2 + z^2) / 2 of the qubit with Bloch vector (x, y, z).
double purity(const ReconstructionPoint& pt, double z = 0.0);

// Prior content of the disk of radius s under the marginal uniform-in-purity
// prior: s^2 acosh(1/s) - sqrt(1 - s^2) + 1.
double marginal_purity_radial_content(double s);

}  // namespace optreg
