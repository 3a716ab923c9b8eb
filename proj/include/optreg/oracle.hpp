#pragma once

// Reference results for the coin: closed forms for one click of each outcome
// and brute-force 1D quadrature for arbitrary counts. Independent of the
// sampling and fitting machinery, so tests can check one against the other.

#include <utility>
#include <vector>

#include "optreg/curvefit.hpp"
#include "optreg/pom.hpp"

namespace optreg {

enum class CoinPrior { Primitive, Jeffreys };

// Primitive or JeffreysCoin; throws UsageError for anything else.
CoinPrior coin_prior_from(const PriorSpec& prior);

struct SizeCredibility {
  double s = 1.0;
  double c = 1.0;
};

// Closed-form (s, c) for counts (1, 1).
SizeCredibility coin_closed_form(CoinPrior prior, double lambda);

class CoinOracle {
 public:
  CoinOracle(CoinPrior prior, Counts counts);

  double size(double lambda) const;
  double credibility(double lambda) const;
  // R_lambda as an interval of p1.
  std::pair<double, double> interval(double lambda) const;
  double find_lambda(double target, TargetMode mode) const;

  double log_L_max() const { return log_L_max_; }
  double log_L_D() const { return log_L_D_; }
  CoinPrior prior() const { return prior_; }
  const Counts& counts() const { return counts_; }

 private:
  // Prior integral of L / L_max over p1 in [a, b].
  double weighted(double a, double b, bool with_likelihood) const;
  double log_ratio(double p1) const;

  CoinPrior prior_;
  Counts counts_;
  bool degenerate_ = false;
  double p_hat_ = 0.5;
  double log_L_max_ = 0.0;
  double evidence_ratio_ = 1.0;  // L(D) / L_max
  double log_L_D_ = 0.0;
};

struct CoinCurve {
  CoinPrior prior = CoinPrior::Primitive;
  Counts counts;
  std::vector<double> lambdas;
  std::vector<double> s;
  std::vector<double> c;
  double log_L_max = 0.0;
  double log_L_D = 0.0;
};

CoinCurve coin_quadrature(CoinPrior prior, const Counts& counts, const std::vector<double>& lambdas);

}  // namespace optreg
