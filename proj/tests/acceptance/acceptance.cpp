// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "optreg/blr.hpp"
#include "optreg/commands.hpp"
#include "optreg/confidence.hpp"
#include "optreg/curvefit.hpp"
#include "optreg/likelihood.hpp"
#include "optreg/oracle.hpp"
#include "optreg/prior.hpp"
#include "optreg/tiling.hpp"
#include "support/oracles.hpp"

using namespace optreg;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  int failures = 0;

  // Keeps the first few failure messages.
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (failures < 4) detail += (failures ? "; " : "") + what;
    if (failures == 4) detail += "; ...";
    ++failures;
    pass = false;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

IntegrationBudget mc(std::size_t n, std::uint64_t seed) {
  IntegrationBudget b;
  b.method = IntegrationBudget::Method::MonteCarlo;
  b.samples = n;
  b.seed = seed;
  return b;
}

std::vector<double> eleven() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

// s_lambda of the coin (1,1) against a closed form at 11 grid points.
Outcome coin_sizes(const PriorSpec& prior, const std::function<double(double)>& exact, double& worst) {
  Outcome o;
  const Pom coin(PomKind::Coin);
  const BlrCurve c = size_curve(coin, prior, {{1, 1}}, eleven(), mc(100000, 1));
  worst = 0;
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    const double d = std::abs(c.s[i] - exact(c.lambdas[i]));
    worst = std::max(worst, d);
    o.require(d <= std::max(3 * c.s_stderr[i], 0.01), fmt("s(%.2f) off by %.4f", c.lambdas[i], d));
  }
  return o;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  Outcome o = coin_sizes(PriorSpec::primitive(), [](double l) { return std::sqrt(1 - l); }, worst);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 5.0, fmt("took %.2f s", secs));
  if (o.pass) o.detail = fmt("max |s - sqrt(1-l)| = %.4f, %.2f s", worst, secs);
  return o;
}

Outcome criterion2() {
  const Pom coin(PomKind::Coin);
  const PriorSpec jeff = PriorSpec::jeffreys(coin);
  double worst = 0;
  Outcome o = coin_sizes(jeff, [](double l) { return 1 - 2 / pi * std::asin(std::sqrt(l)); }, worst);
  const BlrCurve curve = size_curve(coin, jeff, {{1, 1}}, default_lambda_grid(0.0), mc(100000, 2));
  const SizeFit fit = fit_size(curve, coin);
  double worst_c = 0;
  for (double l : eleven()) {
    const double exact = coin_closed_form(CoinPrior::Jeffreys, l).c;
    const double d = std::abs(credibility_from_size(fit, l) - exact);
    worst_c = std::max(worst_c, d);
    o.require(d <= 0.02, fmt("c(%.2f) off by %.4f", l, d));
  }
  if (o.pass) o.detail = fmt("max s deviation %.4f, max c deviation %.4f", worst, worst_c);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const Pom coin(PomKind::Coin);
  const struct {
    PriorSpec prior;
    CoinPrior oracle;
    double ratio, evidence;
  } cases[] = {{PriorSpec::primitive(), CoinPrior::Primitive, 1.5, 1.0 / 6},
               {PriorSpec::jeffreys(coin), CoinPrior::Jeffreys, 2.0, 1.0 / 8}};
  for (const auto& c : cases) {
    const BlrCurve curve = size_curve(coin, c.prior, {{1, 1}}, default_lambda_grid(0.0), mc(400000, 3));
    const SizeFit fit = fit_size(curve, coin);
    const double r = ratio_limit(fit);
    const CoinOracle oracle(c.oracle, {{1, 1}});
    const double quad = std::exp(oracle.log_L_D());
    const double implied = std::exp(implied_log_prior_likelihood(fit, curve.log_L_max));
    o.require(std::abs(r / c.ratio - 1) <= 0.05, fmt("ratio %.4f vs %.1f", r, c.ratio));
    o.require(std::abs(quad / c.evidence - 1) <= 1e-9, fmt("oracle L(D) %.6f vs %.6f", quad, c.evidence));
    o.require(std::abs(implied / quad - 1) <= 0.05, fmt("implied L(D) %.5f vs %.5f", implied, quad));
  }
  if (o.pass) o.detail = "primitive 1.5 and Jeffreys 2.0 ratios, implied L(D) within 5%";
  return o;
}

struct Dataset {
  Pom pom;
  Counts counts;
};

const std::vector<Dataset>& datasets() {
  static const std::vector<Dataset> d = {{Pom(PomKind::CrossHair4), {{8, 5, 10, 1}}},
                                         {Pom(PomKind::CrossHair4), {{6, 3, 10, 5}}},
                                         {Pom(PomKind::Trine3), {{15, 8, 1}}},
                                         {Pom(PomKind::Trine3), {{13, 7, 4}}}};
  return d;
}

struct Run {
  const Dataset* data;
  PriorSpec prior;
  BlrCurve curve;
  std::string label;
  std::uint64_t seed;
};

constexpr std::size_t kRunSamples = 200000;

const std::vector<Run>& dataset_runs() {
  static const std::vector<Run> runs = [] {
    std::vector<Run> out;
    std::uint64_t seed = 40;
    for (const Dataset& d : datasets())
      for (const PriorSpec& p : {PriorSpec::primitive(), PriorSpec::jeffreys(d.pom)}) {
        std::ostringstream label;
        label << d.pom.key() << " (";
        for (std::size_t k = 0; k < d.counts.size(); ++k) label << (k ? "," : "") << d.counts[k];
        label << ") " << p.key();
        ++seed;
        out.push_back({&d, p, blr_curve(d.pom, p, d.counts, default_lambda_grid(0.0), mc(kRunSamples, seed)),
                       label.str(), seed});
      }
    return out;
  }();
  return runs;
}

Outcome criterion4() {
  Outcome o;
  for (const Run& r : dataset_runs()) {
    const BlrCurve& c = r.curve;
    for (std::size_t i = 1; i < c.lambdas.size(); ++i) {
      o.require(c.s[i] <= c.s[i - 1], r.label + ": s not monotone");
      o.require(c.c_direct[i] <= c.c_direct[i - 1], r.label + ": c not monotone");
    }
    for (std::size_t i = 1; i + 1 < c.lambdas.size(); ++i) {
      const double se = std::hypot(c.s_stderr[i], c.c_stderr[i]);
      o.require(c.c_direct[i] - c.s[i] >= -3 * se, r.label + fmt(": c < s at lambda %.4g", c.lambdas[i]));
    }
  }
  if (o.pass) o.detail = "8 curves, c >= s - 3 stderr, both monotone";
  return o;
}

Outcome criterion5() {
  Outcome o;
  const Pom ch(PomKind::CrossHair4), tr(PomKind::Trine3);
  const MleResult m = mle(ch, {{8, 5, 10, 1}});
  const auto [gx, gy] = oracle::grid_mle(oracle::crosshair_probs, {8, 5, 10, 1});
  o.require(!m.on_boundary, "crosshair MLE on the boundary");
  o.require(std::abs(m.point.x() - 3.0 / 13) <= 1e-6 && std::abs(m.point.y() - 9.0 / 11) <= 1e-6,
            fmt("crosshair MLE (%.8f, %.8f)", m.point.x(), m.point.y()));
  o.require(std::abs(m.point.x() - gx) <= 1e-6 && std::abs(m.point.y() - gy) <= 1e-6,
            fmt("grid oracle (%.8f, %.8f)", gx, gy));
  const MleResult t = mle(tr, {{15, 8, 1}});
  o.require(t.on_boundary, "trine MLE not flagged on the boundary");
  o.require(std::abs(t.point.radius() - 1) <= 1e-9, fmt("trine |r| - 1 = %.3g", t.point.radius() - 1));
  const double a = oracle::circle_mle_angle(oracle::trine_probs, {15, 8, 1});
  o.require(std::hypot(t.point.x() - std::cos(a), t.point.y() - std::sin(a)) <= 1e-4, "trine MLE angle");
  if (o.pass)
    o.detail = fmt("crosshair (%.9f, %.9f), trine |r| - 1 = %.2g", m.point.x(), m.point.y(), t.point.radius() - 1);
  return o;
}

bool inside_polygon(const Contour& c, double x, double y) {
  bool in = false;
  const auto& p = c.points;
  for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++)
    if ((p[i].y > y) != (p[j].y > y) && x < (p[j].x - p[i].x) * (y - p[i].y) / (p[j].y - p[i].y) + p[i].x) in = !in;
  return in;
}

Outcome criterion6() {
  Outcome o;
  const ReconstructionPoint truth = ReconstructionPoint::disk(0.6, 0.2);
  for (const Run& r : dataset_runs()) {
    const Pom& pom = r.data->pom;
    const SizeFit fit = fit_size(r.curve, pom);
    const double l9 = find_lambda(fit, 0.9, TargetMode::Credibility);
    const double l5 = find_lambda(fit, 0.5, TargetMode::Credibility);
    o.require(l5 > l9, r.label + ": lambda(0.5) <= lambda(0.9)");
    const Contour c9 = boundary_contour(pom, r.data->counts, l9, 256);
    const Contour c5 = boundary_contour(pom, r.data->counts, l5, 256);
    // the sample behind the curve, so its direct estimates are the run's c_direct
    const BlrSampler sampler(pom, r.prior, r.data->counts, mc(kRunSamples, r.seed));
    const bool polygon = inside_polygon(c9, truth.x(), truth.y());
    const bool member = membership(pom, r.data->counts, truth, l9, r.curve.log_L_max);
    if (!(polygon && member)) {
      // credibility of the smallest region that reaches the true state
      const double l_truth = std::exp(log_likelihood(pom, r.data->counts, truth) - r.curve.log_L_max);
      o.require(false, r.label + fmt(": (0.6, 0.2) outside the 0.9 region (contour %g, member %g), enters at c = %.4f",
                                     polygon, member, sampler.credibility(l_truth).value));
    }
    for (std::size_t i = 0; i < c9.points.size(); ++i) {
      const auto& a = c5.points[i];
      const auto& b = c9.points[i];
      const double ra = std::hypot(a.x - c5.centre.x(), a.y - c5.centre.y());
      const double rb = std::hypot(b.x - c9.centre.x(), b.y - c9.centre.y());
      if (a.clipped)
        o.require(b.clipped, r.label + ": 0.5 contour reaches the rim where 0.9 does not");
      else
        o.require(ra < rb, r.label + fmt(": not nested at angle %.4f", a.angle));
    }
    // fitted against direct credibility at the two levels and along the grid
    for (double l : {l9, l5}) {
      const Estimate d = sampler.credibility(l);
      o.require(std::abs(fit.credibility(l) - d.value) <= 3 * d.std_error,
                r.label + fmt(": c_fit %.5f vs c_direct %.5f +- %.5f", fit.credibility(l), d.value, d.std_error));
    }
    const BlrCurve& c = r.curve;
    for (std::size_t i = 1; i + 1 < c.lambdas.size(); ++i) {
      if (c.s[i] * kRunSamples < 10) continue;
      o.require(std::abs(fit.credibility(c.lambdas[i]) - c.c_direct[i]) <= 3 * c.c_stderr[i] + 1e-8,
                r.label + fmt(": c_fit vs c_direct at lambda %.4g", c.lambdas[i]));
    }
  }
  if (o.pass) o.detail = "true state inside every 0.9 region, 0.5 nested, c_fit within 3 stderr";
  return o;
}

Outcome criterion7() {
  Outcome o;
  const Pom ch(PomKind::CrossHair4), tr(PomKind::Trine3);
  const std::pair<Pom, PriorSpec> cases[] = {{ch, PriorSpec::primitive()},
                                             {ch, PriorSpec::jeffreys(ch)},
                                             {tr, PriorSpec::jeffreys(tr)},
                                             {ch, PriorSpec::marginal_purity()}};
  double worst = 0;
  for (const auto& [pom, prior] : cases)
    for (TilingVariant v : {TilingVariant::RadialRays, TilingVariant::ConcentricRings}) {
      TilingOptions opt;
      opt.variant = v;
      const Tiling t = make_tiling(prior, pom, opt);
      const auto cells = cell_sizes_quadrature(t, prior, pom, 1e-9);
      o.require(cells.size() == 96, "cell count");
      for (double q : cells) {
        worst = std::max(worst, std::abs(q - 1.0 / 96));
        o.require(std::abs(q - 1.0 / 96) <= 1e-4, pom.key() + " " + prior.key() + fmt(": cell %.6f", q));
      }
    }
  const Tiling flat = make_tiling(PriorSpec::primitive(), ch);
  for (std::size_t i = 0; i < flat.ring_radii.size(); ++i)
    o.require(std::abs(flat.ring_radii[i] - std::sqrt((i + 1) / 8.0)) <= 1e-9, "primitive ring radius");
  if (o.pass) o.detail = fmt("max cell deviation %.2g (tolerance 1e-4)", worst);
  return o;
}

Outcome criterion8() {
  Outcome o;
  const Pom coin(PomKind::Coin), ch(PomKind::CrossHair4), tr(PomKind::Trine3);
  const double tc[] = {0.7, 0.3}, td[] = {0.4, 0.1, 0.3, 0.2}, tt[] = {0.5, 0.3, 0.2};
  const std::pair<Pom, PriorSpec> priors[] = {
      {coin, PriorSpec::primitive()},    {coin, PriorSpec::jeffreys(coin)},
      {coin, PriorSpec::hedged()},       {coin, PriorSpec::conjugate(ProbabilityVector(tc), 3.0)},
      {ch, PriorSpec::primitive()},      {ch, PriorSpec::jeffreys(ch)},
      {ch, PriorSpec::marginal_purity()}, {ch, PriorSpec::conjugate(ProbabilityVector(td), 2.0)},
      {tr, PriorSpec::primitive()},      {tr, PriorSpec::jeffreys(tr)},
      {tr, PriorSpec::marginal_purity()}, {tr, PriorSpec::conjugate(ProbabilityVector(tt), 2.0)},
  };
  for (const auto& [pom, prior] : priors) {
    const PriorSpec n = normalized(prior, pom);
    const auto pts = sample(n, pom, 200000, 8).points;
    double sum = 0, sum2 = 0;
    for (const auto& w : pts) {
      const double v = density(n, pom, w.pt) / *n.norm / proposal_density(pom);
      sum += v;
      sum2 += v * v;
    }
    const double m = sum / pts.size();
    const double se = std::sqrt((sum2 / pts.size() - m * m) / pts.size());
    o.require(std::abs(m - 1) <= 3 * se, pom.key() + " " + prior.key() + fmt(": total %.5f +- %.5f", m, se));
  }

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0;
  for (const Pom& pom : {coin, ch, tr})
    for (int i = 0; i < 100; ++i) {
      ReconstructionPoint pt = ReconstructionPoint::segment(unit(rng));
      if (pom.is_disk()) do
          pt = ReconstructionPoint::disk(unit(rng), unit(rng));
        while (pt.radius() > 1);
      for (long total = 1; total <= 4; ++total) {
        std::vector<std::vector<long>> all;
        std::vector<long> cur;
        oracle::compositions(static_cast<int>(pom.num_outcomes()), total, cur, all);
        double s = 0;
        for (const auto& n : all) {
          Counts c;
          c.n = n;
          // every click sequence with these counts has the same likelihood
          double log_sequences = std::lgamma(total + 1.0);
          for (long k : n) log_sequences -= std::lgamma(k + 1.0);
          s += std::exp(log_sequences + log_likelihood(pom, c, pt));
        }
        worst = std::max(worst, std::abs(s - 1));
      }
    }
  o.require(worst <= 1e-10, fmt("unit sum off by %.3g", worst));
  if (o.pass) o.detail = fmt("12 priors normalized, max |sum_D L - 1| = %.2g", worst);
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (long n : {1L, 2L, 4L}) {
    o.require(confidence_level(RegionSet::whole(n), 10000) == 1.0, "whole set");
    o.require(confidence_level(RegionSet::empty(n), 10000) == 0.0, "empty set");
  }
  const RegionSet s = scr_interval_set(2, CoinPrior::Primitive, 0.8);
  const double g4 = confidence_level(s, 10000), g5 = confidence_level(s, 100000);
  o.require(std::abs(g4 - g5) <= 1e-3, fmt("gamma %.6f vs %.6f", g4, g5));
  for (const Interval& a : s.regions[0])
    for (const Interval& b : s.regions[2]) o.require(a.hi < b.lo || b.hi < a.lo, "SCRs for (0,2) and (2,0) overlap");
  if (o.pass) o.detail = fmt("gamma(N=2, c=0.8) = %.6f (1e4) and %.6f (1e5)", g4, g5);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

Outcome criterion10() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "optreg_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json")
      << R"({"pom": "crosshair4", "prior": "jeffreys", "counts": [6, 3, 10, 5], "budget": {"samples": 100000, "seed": 7}})";
  std::ostringstream sink;
  for (const char* sub : {"a", "b"}) {
    CommandOptions opt;
    opt.command = "regions";
    opt.config = dir / "config.json";
    opt.out = dir / sub;
    o.require(run_command(opt, sink, sink) == kExitOk, "regions failed: " + sink.str());
  }
  for (const char* f : {"curve.csv", "fit.json", "summary.json"}) {
    const std::string a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
    o.require(!a.empty() && a == b, std::string(f) + " differs");
  }
  fs::remove_all(dir);
  if (o.pass) o.detail = "curve.csv, fit.json, summary.json identical";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"coin closed form, primitive", criterion1},  {"coin closed form, Jeffreys", criterion2},
      {"ratio limit and implied L(D)", criterion3}, {"duality c >= s, monotone curves", criterion4},
      {"MLE checks", criterion5},                    {"true state in 0.9 SCRs, nesting", criterion6},
      {"uniform tilings", criterion7},               {"normalization and unit sum", criterion8},
      {"confidence evaluator", criterion9},          {"determinism of regions", criterion10},
  };
  int failed = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += out.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
