#include "optreg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "optreg/errors.hpp"

namespace optreg::numerics {

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double* error_estimate) {
  if (a == b) return 0.0;
  double err = 0.0;
  // Boost compares its error on [-1, 1] with a tolerance scaled by the
  // interval, so narrow intervals would never converge; map onto [-1, 1].
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const auto g = [&](double t) { return f(mid + half * t) * half; };
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, -1.0, 1.0, 20, abs_tol, &err);
  if (!std::isfinite(value)) throw IntegrationError("adaptive quadrature returned a non-finite value");
  if (error_estimate) *error_estimate = err;
  return value;
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  const double value = boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
  if (!std::isfinite(value)) throw IntegrationError("Gauss-Legendre rule returned a non-finite value");
  return value;
}

std::vector<std::pair<double, double>> fixed_rule(double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 15>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<std::pair<double, double>> out;
  // x[0] = 0 for an odd rule; the others come in +- pairs
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(mid + half * x[i], half * w[i]);
    if (x[i] != 0.0) out.emplace_back(mid - half * x[i], half * w[i]);
  }
  return out;
}

double integrate_singular_ends(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  const double value = rule.integrate(f, a, b, tol);
  if (!std::isfinite(value)) throw IntegrationError("tanh-sinh quadrature returned a non-finite value");
  return value;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw IntegrationError("bisection bracket does not change sign");
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_maximize(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > x_tol) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    if (c >= d) break;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  for (int i = 0; i < 4; ++i) s_[i] = split_seed(seed, static_cast<std::uint64_t>(i));
}

std::uint64_t Rng::next() {
  const auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

void for_each_chunk(std::size_t total, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (total == 0) return;
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t chunks = (total + chunk_size - 1) / chunk_size;
  const std::size_t workers =
      std::min<std::size_t>(chunks, std::max(1u, std::thread::hardware_concurrency()));
  auto run = [&](std::size_t worker) {
    for (std::size_t c = worker; c < chunks; c += workers)
      fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
  };
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
}

std::vector<double> isotonic_nonincreasing(std::span<const double> values, std::span<const double> weights) {
  struct Block {
    double mean, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    blocks.push_back({values[i], w, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean < blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double wt = a.weight + b.weight;
      a.mean = wt > 0.0 ? (a.mean * a.weight + b.mean * b.weight) / wt : 0.5 * (a.mean + b.mean);
      a.weight = wt;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

namespace {

double pchip_end_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if ((m > 0.0) != (d0 > 0.0) || m == 0.0) return 0.0;
  if ((d0 > 0.0) != (d1 > 0.0) && std::abs(m) > std::abs(3.0 * d0)) return 3.0 * d0;
  return m;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size() || n < 2) throw UsageError("monotone cubic needs at least two matching knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw UsageError("monotone cubic knots must be strictly increasing");
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  if (n == 2) {
    m_[0] = m_[1] = d[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  m_[0] = pchip_end_slope(h[0], h[1], d[0], d[1]);
  m_[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * m_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
         (s3 - s2) * h * m_[i + 1];
}

double MonotoneCubic::segment_integral(std::size_t i, double a, double b) const {
  const double h = x_[i + 1] - x_[i];
  const auto anti = [&](double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    return (s - s3 + 0.5 * s4) * y_[i] + (0.5 * s2 - 2.0 * s3 / 3.0 + 0.25 * s4) * h * m_[i] +
           (s3 - 0.5 * s4) * y_[i + 1] + (-s3 / 3.0 + 0.25 * s4) * h * m_[i + 1];
  };
  return h * (anti((b - x_[i]) / h) - anti((a - x_[i]) / h));
}

double MonotoneCubic::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  a = std::max(a, x_.front());
  b = std::min(b, x_.back());
  if (b <= a) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double lo = std::max(a, x_[i]);
    const double hi = std::min(b, x_[i + 1]);
    if (hi > lo) acc += segment_integral(i, lo, hi);
  }
  return acc;
}

}  // namespace optreg::numerics
