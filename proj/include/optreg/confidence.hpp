#pragma once

// Confidence level of a set of coin regions, one region (a union of closed
// p1-intervals) per possible outcome (n1, N - n1):
//   gamma = min over p1 of sum_D L(D|p1) [p1 in C_D].

#include <cstddef>
#include <vector>

#include "optreg/oracle.hpp"

namespace optreg {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct RegionSet {
  long copies = 0;
  // regions[n1] for n1 = 0..N.
  std::vector<std::vector<Interval>> regions;

  // Throws UsageError unless there are N+1 regions of ordered intervals in [0, 1].
  void validate() const;
  bool contains(long n1, double p1) const;

  static RegionSet whole(long copies);
  static RegionSet empty(long copies);
};

// Probability that the region of the observed data contains p1.
double coverage(const RegionSet& set, double p1);

// Minimum coverage over a uniform grid of `grid` + 1 points plus every
// interval endpoint and its one-sided neighbours. Throws UsageError for
// grid < 1000 or a malformed set.
double confidence_level(const RegionSet& set, std::size_t grid);

// The smallest credible intervals of credibility c for every outcome, from
// the coin oracle.
RegionSet scr_interval_set(long copies, CoinPrior prior, double credibility);

}  // namespace optreg
