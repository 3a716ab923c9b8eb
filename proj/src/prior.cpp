#include "optreg/prior.hpp"

#include <cmath>
#include <numbers>

#include "optreg/errors.hpp"

namespace optreg {

using std::numbers::pi;

PriorSpec PriorSpec::jeffreys(const Pom& pom) {
  PriorSpec p;
  switch (pom.kind()) {
    case PomKind::Coin: p.kind = PriorKind::JeffreysCoin; break;
    case PomKind::CrossHair4: p.kind = PriorKind::JeffreysCrossHair4; break;
    case PomKind::Trine3: p.kind = PriorKind::JeffreysTrine3; break;
  }
  return p;
}

PriorSpec PriorSpec::conjugate(const ProbabilityVector& target, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw UsageError("conjugate prior needs alpha > 0");
  if (!target.is_normalized(kEqualityTolerance))
    throw UsageError("conjugate target must be a probability vector");
  PriorSpec p;
  p.kind = PriorKind::Conjugate;
  p.target = target;
  p.alpha = alpha;
  return p;
}

PriorSpec PriorSpec::from_key(const std::string& key, const Pom& pom, std::span<const double> target,
                              double alpha) {
  PriorSpec p;
  if (key == "primitive") {
    p = primitive();
  } else if (key == "jeffreys") {
    p = jeffreys(pom);
  } else if (key == "hedged") {
    p = hedged();
  } else if (key == "conjugate") {
    if (target.size() != pom.num_outcomes())
      throw UsageError("conjugate prior needs a target with " + std::to_string(pom.num_outcomes()) +
                       " probabilities");
    p = conjugate(ProbabilityVector(target), alpha);
  } else if (key == "marginal-purity") {
    p = marginal_purity();
  } else {
    throw UsageError("unknown prior key '" + key +
                     "' (expected primitive, jeffreys, hedged, conjugate or marginal-purity)");
  }
  check_compatible(p, pom);
  return p;
}

std::string PriorSpec::key() const {
  switch (kind) {
    case PriorKind::Primitive: return "primitive";
    case PriorKind::JeffreysCoin:
    case PriorKind::JeffreysCrossHair4:
    case PriorKind::JeffreysTrine3: return "jeffreys";
    case PriorKind::HedgedCoin: return "hedged";
    case PriorKind::Conjugate: return "conjugate";
    case PriorKind::MarginalPurityDisk: return "marginal-purity";
  }
  return {};
}

void check_compatible(const PriorSpec& prior, const Pom& pom) {
  const auto fail = [&](const std::string& why) {
    throw UsageError("prior '" + prior.key() + "' is not available for pom '" + pom.key() + "': " + why);
  };
  switch (prior.kind) {
    case PriorKind::Primitive: return;
    case PriorKind::JeffreysCoin:
      if (pom.kind() != PomKind::Coin) fail("coin Jeffreys prior");
      return;
    case PriorKind::JeffreysCrossHair4:
      if (pom.kind() != PomKind::CrossHair4) fail("four-outcome Jeffreys prior");
      return;
    case PriorKind::JeffreysTrine3:
      if (pom.kind() != PomKind::Trine3) fail("trine Jeffreys prior");
      return;
    case PriorKind::HedgedCoin:
      if (pom.kind() != PomKind::Coin) fail("hedged prior is defined for the coin only");
      return;
    case PriorKind::Conjugate:
      if (prior.target.size != pom.num_outcomes()) fail("target length does not match the outcomes");
      if (!pom.is_permissible(prior.target)) fail("target probabilities are not permissible");
      return;
    case PriorKind::MarginalPurityDisk:
      if (!pom.is_disk()) fail("marginal purity prior lives on the disk");
      return;
  }
}

double proposal_density(const Pom& pom) { return pom.is_disk() ? 1.0 / pi : 0.5; }

double density(const PriorSpec& prior, const Pom& pom, const ReconstructionPoint& pt) {
  pom.check_point(pt);
  if (!pom.contains(pt)) throw DomainError("point outside the reconstruction space");
  const double x = pt.x();
  const double y = pt.y();
  switch (prior.kind) {
    case PriorKind::Primitive:
      return proposal_density(pom);
    case PriorKind::JeffreysCoin: {
      const double q = std::max(0.0, (1.0 - x) * (1.0 + x));
      return 1.0 / (pi * std::sqrt(q));
    }
    case PriorKind::HedgedCoin: {
      const double q = std::max(0.0, (1.0 - x) * (1.0 + x));
      return 2.0 / pi * std::sqrt(q);
    }
    case PriorKind::JeffreysCrossHair4: {
      // 1 - s^2 + s^4 sin^2(2 phi) / 4 == (1 - x^2)(1 - y^2)
      const double q = std::max(0.0, (1.0 - x) * (1.0 + x) * (1.0 - y) * (1.0 + y));
      return 1.0 / std::sqrt(q);
    }
    case PriorKind::JeffreysTrine3: {
      // 1 - 3 s^2 / 4 + s^3 cos(3 phi) / 4, with s^3 cos(3 phi) = x^3 - 3 x y^2
      const double q = std::max(0.0, 1.0 - 0.75 * (x * x + y * y) + 0.25 * (x * x * x - 3.0 * x * y * y));
      return 1.0 / std::sqrt(q);
    }
    case PriorKind::Conjugate: {
      const ProbabilityVector p = pom.probabilities(pt);
      double log_w = 0.0;
      for (std::size_t k = 0; k < p.size; ++k) {
        const double t = prior.target[k];
        if (t == 0.0) continue;
        const double pk = std::max(0.0, p[k]);
        if (pk == 0.0) return 0.0;
        log_w += t * std::log(pk);
      }
      return std::exp(prior.alpha * log_w);
    }
    case PriorKind::MarginalPurityDisk: {
      const double s = std::min(1.0, pt.radius());
      return std::acosh(1.0 / s) / pi;
    }
  }
  return 0.0;
}

double integrate_over_space(const Pom& pom, const std::function<double(const ReconstructionPoint&)>& f,
                            const IntegrationBudget& budget) {
  if (!pom.is_disk()) {
    return numerics::integrate_singular_ends(
        [&](double u) { return f(ReconstructionPoint::segment(u)); }, -1.0, 1.0, budget.tolerance);
  }
  const std::size_t m = std::max<std::size_t>(budget.angles, 8);
  const double dphi = 2.0 * pi / static_cast<double>(m);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double phi = (static_cast<double>(j) + 0.5) * dphi;
    const double c = std::cos(phi), s = std::sin(phi);
    total += numerics::integrate_singular_ends(
        [&](double r) { return f(ReconstructionPoint::disk(r * c, r * s)) * r; }, 0.0, 1.0, budget.tolerance);
  }
  total *= dphi;
  if (!std::isfinite(total)) throw IntegrationError("polar quadrature returned a non-finite value");
  return total;
}

Estimate normalize(const PriorSpec& prior, const Pom& pom, const IntegrationBudget& budget) {
  check_compatible(prior, pom);
  switch (prior.kind) {
    case PriorKind::Primitive:
    case PriorKind::JeffreysCoin:
    case PriorKind::HedgedCoin:
    case PriorKind::MarginalPurityDisk:
      // Closed forms; the densities above already carry their constants.
      return {1.0, 0.0};
    default:
      break;
  }
  if (budget.method == IntegrationBudget::Method::MonteCarlo) {
    const PriorSample draw = sample(prior, pom, budget.samples, budget.seed);
    // weight = density / proposal, so Z = E_proposal[weight].
    double mean = 0.0;
    for (const auto& wp : draw.points) mean += wp.weight;
    const double n = static_cast<double>(draw.points.size());
    mean /= n;
    double var = 0.0;
    for (const auto& wp : draw.points) var += (wp.weight - mean) * (wp.weight - mean);
    var /= (n - 1.0);
    if (!std::isfinite(mean) || !(mean > 0.0)) throw IntegrationError("Monte Carlo normalization failed");
    return {mean, std::sqrt(var / n)};
  }
  const double z = integrate_over_space(pom, [&](const ReconstructionPoint& pt) { return density(prior, pom, pt); },
                                        budget);
  if (!(z > 0.0)) throw IntegrationError("normalization integral is not positive");
  return {z, 0.0};
}

PriorSpec normalized(PriorSpec prior, const Pom& pom, const IntegrationBudget& budget) {
  prior.norm = normalize(prior, pom, budget).value;
  return prior;
}

PriorSample sample(const PriorSpec& prior, const Pom& pom, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw UsageError("sample count must be at least 1");
  check_compatible(prior, pom);
  PriorSample out;
  out.points.resize(count);
  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::size_t> redraws(chunks, 0);
  const double q = proposal_density(pom);
  const bool disk = pom.is_disk();
  numerics::for_each_chunk(count, kSampleChunk, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    numerics::Rng rng(numerics::split_seed(seed, chunk));
    for (std::size_t i = begin; i < end; ++i) {
      for (;;) {
        ReconstructionPoint pt;
        if (disk) {
          const double r = std::sqrt(rng.uniform());
          const double phi = 2.0 * pi * rng.uniform();
          pt = ReconstructionPoint::disk(r * std::cos(phi), r * std::sin(phi));
        } else {
          pt = ReconstructionPoint::segment(2.0 * rng.uniform() - 1.0);
        }
        const double w = density(prior, pom, pt) / q;
        if (std::isfinite(w)) {
          out.points[i] = {pt, w};
          break;
        }
        ++redraws[chunk];
      }
    }
  });
  for (std::size_t r : redraws) out.redraws += r;
  return out;
}

WeightedMean weighted_mean(std::span<const WeightedPoint> points,
                           const std::function<double(const ReconstructionPoint&)>& f) {
  double sw = 0.0, sw2 = 0.0, swf = 0.0;
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    values[i] = f(points[i].pt);
    sw += points[i].weight;
    sw2 += points[i].weight * points[i].weight;
    swf += points[i].weight * values[i];
  }
  WeightedMean out;
  if (!(sw > 0.0)) return out;
  out.value = swf / sw;
  double var = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = points[i].weight * (values[i] - out.value);
    var += d * d;
  }
  out.std_error = std::sqrt(var) / sw;
  out.effective_size = sw * sw / sw2;
  return out;
}

double purity(const ReconstructionPoint& pt, double z) {
  const double r2 = pt.dim == 1 ? pt.x() * pt.x() + z * z : pt.x() * pt.x() + pt.y() * pt.y() + z * z;
  if (r2 > 1.0 + kBoundaryTolerance) throw DomainError("Bloch vector outside the unit ball");
  return 0.5 * (1.0 + r2);
}

double marginal_purity_radial_content(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * std::acosh(1.0 / s) - std::sqrt((1.0 - s) * (1.0 + s)) + 1.0;
}

}  // namespace optreg
