#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "optreg/errors.hpp"
#include "optreg/prior.hpp"
#include "support/oracles.hpp"

using namespace optreg;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

IntegrationBudget monte_carlo(std::size_t n, std::uint64_t seed = 1) {
  IntegrationBudget b;
  b.method = IntegrationBudget::Method::MonteCarlo;
  b.samples = n;
  b.seed = seed;
  return b;
}

ReconstructionPoint polar(double s, double phi) { return ReconstructionPoint::disk(s * std::cos(phi), s * std::sin(phi)); }

}  // namespace

TEST_CASE("density values") {
  const Pom coin(PomKind::Coin), ch(PomKind::CrossHair4), tr(PomKind::Trine3);
  CHECK(density(PriorSpec::jeffreys(ch), ch, ReconstructionPoint::disk(0, 0)) == Approx(1.0));
  CHECK(std::isinf(density(PriorSpec::jeffreys(tr), tr, polar(1.0, pi / 3))));
  CHECK(density(PriorSpec::marginal_purity(), ch, polar(1.0, 0.4)) == Approx(0.0));
  CHECK(density(PriorSpec::primitive(), ch, polar(0.5, 0.4)) == Approx(density(PriorSpec::primitive(), ch, polar(0.9, 2))));
  CHECK_THROWS_AS(density(PriorSpec::primitive(), ch, ReconstructionPoint::disk(1, 1)), DomainError);
  CHECK(density(PriorSpec::jeffreys(coin), coin, ReconstructionPoint::segment(0)) == Approx(1 / pi));
  CHECK(PriorSpec::jeffreys(tr).kind == PriorKind::JeffreysTrine3);
}

TEST_CASE("compatibility") {
  const Pom coin(PomKind::Coin), ch(PomKind::CrossHair4);
  CHECK_THROWS_AS(check_compatible(PriorSpec::hedged(), ch), UsageError);
  CHECK_THROWS_AS(check_compatible(PriorSpec::marginal_purity(), coin), UsageError);
  CHECK_THROWS_AS(check_compatible(PriorSpec::jeffreys(ch), coin), UsageError);
  CHECK_THROWS_AS(PriorSpec::from_key("flat", coin), UsageError);
  const double t[] = {0.5, 0.5};
  CHECK_THROWS_AS(PriorSpec::conjugate(ProbabilityVector(t), -1.0), UsageError);
}

TEST_CASE("closed-form normalizations") {
  const Pom coin(PomKind::Coin), ch(PomKind::CrossHair4);
  CHECK(normalize(PriorSpec::primitive(), ch).value == Approx(1.0));
  CHECK(normalize(PriorSpec::jeffreys(coin), coin).value == Approx(1.0));
  CHECK(normalize(PriorSpec::marginal_purity(), ch).value == Approx(1.0));
  // the Jeffreys coin density integrates to one by itself
  const PriorSpec jc = PriorSpec::jeffreys(coin);
  const double z = oracle::simpson(
      [&](double a) { return a <= 0 || a >= pi ? 1 / pi : density(jc, coin, ReconstructionPoint::segment(std::cos(a))) * std::sin(a); },
      0, pi);
  CHECK(z == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("disk normalizations against a polar oracle") {
  const Pom ch(PomKind::CrossHair4), tr(PomKind::Trine3);
  const PriorSpec jc = PriorSpec::jeffreys(ch);
  const double zc = normalize(jc, ch).value;
  const double oc = oracle::disk_integral([&](double x, double y) {
    return 1 / std::sqrt((1 - x * x) * (1 - y * y));
  });
  CHECK(zc == Approx(oc).epsilon(2e-3));

  const PriorSpec ref_mp = PriorSpec::marginal_purity();
  const double omp = oracle::disk_integral([&](double x, double y) {
    const double s = std::hypot(x, y);
    return s == 0 ? 0.0 : std::acosh(1 / std::min(s, 1.0)) / pi;
  });
  CHECK(omp == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("every prior integrates to one") {
  const Pom coin(PomKind::Coin), ch(PomKind::CrossHair4), tr(PomKind::Trine3);
  const double tc[] = {0.7, 0.3};
  const double td[] = {0.4, 0.1, 0.3, 0.2};
  const std::pair<Pom, PriorSpec> cases[] = {
      {coin, PriorSpec::primitive()},          {coin, PriorSpec::jeffreys(coin)},
      {coin, PriorSpec::hedged()},             {coin, PriorSpec::conjugate(ProbabilityVector(tc), 3.0)},
      {ch, PriorSpec::primitive()},            {ch, PriorSpec::jeffreys(ch)},
      {ch, PriorSpec::marginal_purity()},      {ch, PriorSpec::conjugate(ProbabilityVector(td), 2.0)},
      {tr, PriorSpec::jeffreys(tr)},           {tr, PriorSpec::marginal_purity()},
  };
  for (const auto& [pom, prior] : cases) {
    CAPTURE(prior.key());
    const PriorSpec n = normalized(prior, pom);
    const auto pts = sample(n, pom, 200000, 17).points;
    // mean weight of the normalized density over the flat proposal
    double sum = 0, sum2 = 0;
    for (const auto& w : pts) {
      const double v = density(n, pom, w.pt) / *n.norm / proposal_density(pom);
      sum += v;
      sum2 += v * v;
    }
    const double m = sum / pts.size();
    const double se = std::sqrt((sum2 / pts.size() - m * m) / pts.size());
    CHECK(std::abs(m - 1.0) < 3 * se + 1e-9);
    const Estimate q = normalize(prior, pom);
    CHECK(q.value == Approx(*n.norm));
    const Estimate mc = normalize(prior, pom, monte_carlo(200000, 5));
    CHECK(std::abs(mc.value - q.value) < 3 * mc.std_error + 1e-9);
  }
}

TEST_CASE("weighted means") {
  const Pom coin(PomKind::Coin), ch(PomKind::CrossHair4);
  const auto flat = sample(PriorSpec::primitive(), ch, 100000, 3).points;
  const auto half = weighted_mean(flat, [](const ReconstructionPoint& p) { return p.x() > 0 ? 1.0 : 0.0; });
  CHECK(std::abs(half.value - 0.5) < 3 * half.std_error);

  const auto mp = sample(PriorSpec::marginal_purity(), ch, 100000, 3).points;
  const auto inner = weighted_mean(mp, [](const ReconstructionPoint& p) { return p.radius() < 0.5 ? 1.0 : 0.0; });
  const double expect = 0.25 * std::acosh(2.0) - std::sqrt(0.75) + 1;
  CHECK(expect == Approx(0.46324).epsilon(1e-4));
  CHECK(marginal_purity_radial_content(0.5) == Approx(expect).epsilon(1e-14));
  CHECK(std::abs(inner.value - expect) < 3 * inner.std_error);

  const auto jc = sample(PriorSpec::jeffreys(coin), coin, 100000, 3).points;
  for (int i = 1; i <= 10; ++i) {
    const double b = i / 10.0;
    const auto cdf = weighted_mean(jc, [&](const ReconstructionPoint& p) { return (1 + p.x()) / 2 <= b ? 1.0 : 0.0; });
    CHECK(std::abs(cdf.value - 2 / pi * std::asin(std::sqrt(b))) < 3 * cdf.std_error + 1e-12);
  }
  const auto band = weighted_mean(jc, [](const ReconstructionPoint& p) {
    const double p1 = (1 + p.x()) / 2;
    return p1 >= 0.2 && p1 <= 0.6 ? 1.0 : 0.0;
  });
  CHECK(std::abs(band.value - 2 / pi * (std::asin(std::sqrt(0.6)) - std::asin(std::sqrt(0.2)))) < 3 * band.std_error);
}

TEST_CASE("sampling is deterministic") {
  const Pom tr(PomKind::Trine3);
  const auto a = sample(PriorSpec::jeffreys(tr), tr, 30000, 8).points;
  const auto b = sample(PriorSpec::jeffreys(tr), tr, 30000, 8).points;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].pt.x() == b[i].pt.x());
    REQUIRE(a[i].weight == b[i].weight);
  }
}

TEST_CASE("purity") {
  CHECK(purity(ReconstructionPoint::disk(0, 0)) == 0.5);
  CHECK(purity(ReconstructionPoint::disk(0.6, 0.2)) == Approx(0.7));
  CHECK(purity(ReconstructionPoint::disk(1, 0)) == 1.0);
}

TEST_CASE("Jeffreys densities respect the measurement symmetry") {
  const Pom ch(PomKind::CrossHair4), tr(PomKind::Trine3);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> s(0, 0.999), phi(0, 2 * pi);
  for (int i = 0; i < 1000; ++i) {
    const double r = s(gen), a = phi(gen);
    const double c0 = density(PriorSpec::jeffreys(ch), ch, polar(r, a));
    const double c1 = density(PriorSpec::jeffreys(ch), ch, polar(r, a + pi / 2));
    REQUIRE(std::abs(c0 - c1) <= 1e-12 * std::max(1.0, c0));
    const double t0 = density(PriorSpec::jeffreys(tr), tr, polar(r, a));
    const double t1 = density(PriorSpec::jeffreys(tr), tr, polar(r, a + 2 * pi / 3));
    REQUIRE(std::abs(t0 - t1) <= 1e-12 * std::max(1.0, t0));
    // trine density from its outcome probabilities
    const auto p = oracle::trine_probs(r * std::cos(a), r * std::sin(a));
    const double bracket = 27 * p[0] * p[1] * p[2];
    const double centre = density(PriorSpec::jeffreys(tr), tr, ReconstructionPoint::disk(0, 0));
    REQUIRE(t0 * std::sqrt(bracket) == Approx(centre).epsilon(1e-10));
    REQUIRE(bracket == Approx(1 - 0.75 * r * r + 0.25 * r * r * r * std::cos(3 * a)).epsilon(1e-12));
    const auto q = oracle::crosshair_probs(r * std::cos(a), r * std::sin(a));
    const double cross = 256 * q[0] * q[1] * q[2] * q[3];
    REQUIRE(c0 * std::sqrt(cross) == Approx(density(PriorSpec::jeffreys(ch), ch, ReconstructionPoint::disk(0, 0))).epsilon(1e-10));
  }
}

TEST_CASE("conjugate density peaks at its target") {
  const Pom ch(PomKind::CrossHair4), coin(PomKind::Coin);
  const double t[] = {0.4, 0.1, 0.3, 0.2};
  const PriorSpec prior = PriorSpec::conjugate(ProbabilityVector(t), 3.0);
  const double top = density(prior, ch, ReconstructionPoint::disk(0.6, 0.2));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1, 1);
  int tested = 0;
  while (tested < 100) {
    const double x = u(gen), y = u(gen);
    if (x * x + y * y > 1) continue;
    ++tested;
    CHECK(density(prior, ch, ReconstructionPoint::disk(x, y)) < top);
  }
  const double tc[] = {0.75, 0.25};
  const PriorSpec pc = PriorSpec::conjugate(ProbabilityVector(tc), 4.0);
  const double peak = density(pc, coin, ReconstructionPoint::segment(0.5));
  for (int i = 0; i <= 100; ++i) {
    const double v = -1 + 0.02 * i;
    if (std::abs(v - 0.5) > 1e-9) CHECK(density(pc, coin, ReconstructionPoint::segment(v)) < peak);
  }
}
