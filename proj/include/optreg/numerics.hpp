#pragma once

// Numerical plumbing shared by the region modules: adaptive quadrature,
// bracketing root finders, seeded chunked random streams, isotonic
// regression and monotone cubic interpolation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace optreg {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

namespace numerics {

// Adaptive Gauss-Kronrod (15/31) on [a, b]. Never evaluates f at the
// endpoints. Throws IntegrationError on a non-finite result.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10,
                 double* error_estimate = nullptr);

// Double-exponential (tanh-sinh) rule for integrands with integrable
// endpoint singularities.
// Fixed 15-point Gauss-Legendre rule on [a, b], for smooth pieces.
double integrate_fixed(const std::function<double(double)>& f, double a, double b);

// Nodes and weights of the same rule mapped to [a, b].
std::vector<std::pair<double, double>> fixed_rule(double a, double b);

double integrate_singular_ends(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12);

// Bisection for the sign change of f on [lo, hi]. f(lo) and f(hi) must have
// opposite signs (or one of them be zero). Stops once the bracket is below x_tol.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol = 1e-14,
              int max_iter = 400);

// Golden-section search for the maximum of a unimodal f on [lo, hi].
double golden_maximize(const std::function<double(double)>& f, double lo, double hi, double x_tol);

// SplitMix64 step; derives independent seeds for chunk streams.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

// xoshiro256** generator with a portable uniform double, so sampled values
// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();

 private:
  std::uint64_t s_[4];
};

// Runs fn(chunk, begin, end) over [0, total) split into fixed-size chunks on
// up to hardware_concurrency threads. Chunk boundaries depend only on
// chunk_size, so per-chunk seeded work is schedule independent.
void for_each_chunk(std::size_t total, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Pool-adjacent-violators fit of a non-increasing sequence.
std::vector<double> isotonic_nonincreasing(std::span<const double> values,
                                           std::span<const double> weights = {});

// Shape-preserving (Fritsch-Carlson) piecewise cubic Hermite interpolant.
// Knots must be strictly increasing.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double t) const;
  // Exact integral of the interpolant over [a, b] within the knot range.
  double integral(double a, double b) const;
  bool empty() const { return x_.empty(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  double segment_integral(std::size_t i, double a, double b) const;

  std::vector<double> x_, y_, m_;
};

}  // namespace numerics
}  // namespace optreg
