#pragma once

// Bounded-likelihood regions R_lambda = { pt : L(D|pt) >= lambda L_max }.
// They are the maximum-likelihood regions of given size and the smallest
// credible regions of given credibility at the same time, so one size curve
// s_lambda (and credibility curve c_lambda) describes all of them.

#include <cstddef>
#include <utility>
#include <vector>

#include "optreg/likelihood.hpp"

namespace optreg {

struct BlrCurve {
  std::vector<double> lambdas;
  // Isotonic (non-increasing) sizes, the raw estimates, and their errors.
  std::vector<double> s;
  std::vector<double> s_raw;
  std::vector<double> s_stderr;
  // Direct credibility estimates; empty when not computed.
  std::vector<double> c_direct;
  std::vector<double> c_direct_raw;
  std::vector<double> c_stderr;
  double lambda0 = 0.0;
  double log_L_max = 0.0;
  double log_L_D = 0.0;
  double log_L_D_stderr = 0.0;
  std::size_t dimension = 2;
  bool mle_on_boundary = false;
  // N = 0: the whole space for every lambda.
  bool degenerate = false;
};

// Ratio of the smallest point likelihood over the closed space to L_max.
double lambda0(const Pom& pom, const Counts& counts);

// log L(D|pt) >= log(lambda) + log_L_max.
bool membership(const Pom& pom, const Counts& counts, const ReconstructionPoint& pt, double lambda,
                double log_L_max);

// points values lambda = 1 - (1 - lambda0) t^2 for t uniform in [0, 1], plus
// refine log-spaced values (four per decade) between lambda0 and the first
// regular node. Increasing order.
std::vector<double> default_lambda_grid(double lambda0, std::size_t points = 101, std::size_t refine = 28);

// One weighted prior sample with the likelihood ratio of every point,
// sorted so that s_lambda and c_lambda for any lambda are prefix sums.
// Shared by all lambdas (common random numbers).
class BlrSampler {
 public:
  BlrSampler(const Pom& pom, const PriorSpec& prior, const Counts& counts, const IntegrationBudget& budget);

  Estimate size(double lambda) const;
  Estimate credibility(double lambda) const;
  // log L(D) with the standard error of the log.
  Estimate log_prior_likelihood() const;
  double log_L_max() const { return log_L_max_; }
  std::size_t redraws() const { return redraws_; }

 private:
  std::size_t members(double lambda) const;

  double log_L_max_ = 0.0;
  std::size_t redraws_ = 0;
  // Sorted by decreasing log ratio log L - log L_max.
  std::vector<double> log_ratio_;
  // Prefix sums over the sorted order: w, w^2, w r, (w r)^2.
  std::vector<double> cw_, cw2_, cv_, cv2_;
};

BlrCurve size_curve(const Pom& pom, const PriorSpec& prior, const Counts& counts, const std::vector<double>& lambdas,
                    const IntegrationBudget& budget);

std::vector<Estimate> credibility_direct(const Pom& pom, const PriorSpec& prior, const Counts& counts,
                                         const std::vector<double>& lambdas, const IntegrationBudget& budget);

// Size curve plus direct credibility from the same sample.
BlrCurve blr_curve(const Pom& pom, const PriorSpec& prior, const Counts& counts, const std::vector<double>& lambdas,
                   const IntegrationBudget& budget, bool with_direct_credibility = true);

struct ContourPoint {
  double angle = 0.0;
  double x = 0.0;
  double y = 0.0;
  // On the unit circle because the ray left the disk inside the region.
  bool clipped = false;
};

struct Contour {
  std::vector<ContourPoint> points;
  ReconstructionPoint centre;
  double lambda = 0.0;
  // Traced from a point slightly inside the disk because the MLE is on the
  // boundary.
  bool approximate = false;
};

// Boundary of R_lambda on n_angles rays from the MLE, by radial bisection.
// Superlevel sets of the concave log-likelihood are convex, hence star-shaped
// about any interior member point.
Contour boundary_contour(const Pom& pom, const Counts& counts, double lambda, std::size_t n_angles = 256);

// The coin's R_lambda as an interval [u_lo, u_hi] of u = p1 - p2.
std::pair<double, double> coin_interval(const Counts& counts, double lambda);

}  // namespace optreg
