#include "optreg/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/binomial.hpp>

#include "optreg/errors.hpp"

namespace optreg {

void RegionSet::validate() const {
  if (copies < 0) throw UsageError("region set needs N >= 0");
  if (regions.size() != static_cast<std::size_t>(copies + 1))
    throw UsageError("region set needs one entry per outcome n1 = 0..N");
  for (const auto& region : regions) {
    double last = -std::numeric_limits<double>::infinity();
    for (const Interval& iv : region) {
      if (!(iv.lo >= 0.0 && iv.hi <= 1.0 && iv.lo <= iv.hi))
        throw UsageError("intervals must satisfy 0 <= lo <= hi <= 1");
      if (iv.lo < last) throw UsageError("intervals of a region must be ordered");
      last = iv.hi;
    }
  }
}

bool RegionSet::contains(long n1, double p1) const {
  for (const Interval& iv : regions[static_cast<std::size_t>(n1)])
    if (p1 >= iv.lo && p1 <= iv.hi) return true;
  return false;
}

RegionSet RegionSet::whole(long copies) {
  return {copies, std::vector<std::vector<Interval>>(static_cast<std::size_t>(copies + 1), {Interval{0.0, 1.0}})};
}

RegionSet RegionSet::empty(long copies) {
  return {copies, std::vector<std::vector<Interval>>(static_cast<std::size_t>(copies + 1))};
}

double coverage(const RegionSet& set, double p1) {
  const boost::math::binomial_distribution<double> dist(static_cast<double>(set.copies), p1);
  double inside = 0.0, outside = 0.0;
  for (long n1 = 0; n1 <= set.copies; ++n1) {
    const double mass = boost::math::pdf(dist, static_cast<double>(n1));
    (set.contains(n1, p1) ? inside : outside) += mass;
  }
  // Normalizing by the computed total keeps whole = 1 and empty = 0 exact.
  return inside / (inside + outside);
}

double confidence_level(const RegionSet& set, std::size_t grid) {
  if (grid < 1000) throw UsageError("confidence grid needs at least 1000 points");
  set.validate();
  std::vector<double> points;
  points.reserve(grid + 1);
  for (std::size_t i = 0; i <= grid; ++i) points.push_back(static_cast<double>(i) / static_cast<double>(grid));
  // Coverage jumps at interval endpoints; the infimum sits just outside a
  // closed interval, so probe both sides.
  const double nudge = 1e-12;
  for (const auto& region : set.regions)
    for (const Interval& iv : region)
      for (double e : {iv.lo, iv.hi})
        for (double p : {e - nudge, e, e + nudge})
          if (p >= 0.0 && p <= 1.0) points.push_back(p);
  double worst = 1.0;
  for (double p : points) worst = std::min(worst, coverage(set, p));
  return worst;
}

RegionSet scr_interval_set(long copies, CoinPrior prior, double credibility) {
  if (copies < 0) throw UsageError("number of copies must be nonnegative");
  if (!(credibility > 0.0 && credibility < 1.0)) throw UsageError("credibility must lie strictly between 0 and 1");
  RegionSet set{copies, {}};
  for (long n1 = 0; n1 <= copies; ++n1) {
    const CoinOracle oracle(prior, Counts{{n1, copies - n1}});
    if (copies == 0) {
      set.regions.push_back({Interval{0.0, 1.0}});
      continue;
    }
    const double lambda = oracle.find_lambda(credibility, TargetMode::Credibility);
    const auto [lo, hi] = oracle.interval(lambda);
    set.regions.push_back({Interval{lo, hi}});
  }
  return set;
}

}  // namespace optreg
