#include "optreg/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "optreg/errors.hpp"

namespace optreg {

using std::numbers::pi;

namespace {

constexpr double kTwoPi = 2.0 * pi;

bool factors_in_polar(const PriorSpec& prior) {
  return prior.kind == PriorKind::Primitive || prior.kind == PriorKind::MarginalPurityDisk;
}

double wrap_angle(double phi) {
  phi = std::fmod(phi, kTwoPi);
  return phi < 0.0 ? phi + kTwoPi : phi;
}

// Linear interpolation of values tabulated on an increasing grid.
double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double t) {
  if (t <= grid.front()) return values.front();
  if (t >= grid.back()) return values.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
  const double f = (t - grid[i]) / (grid[i + 1] - grid[i]);
  return values[i] + f * (values[i + 1] - values[i]);
}

// Periodic linear interpolation on the uniform angle grid m * 2pi / M.
double interpolate_periodic(const std::vector<double>& values, double phi) {
  const std::size_t m = values.size();
  const double pos = wrap_angle(phi) / kTwoPi * static_cast<double>(m);
  const std::size_t i = std::min(static_cast<std::size_t>(pos), m - 1);
  const double f = pos - static_cast<double>(i);
  return values[i] + f * (values[(i + 1) % m] - values[i]);
}

class PolarDensity {
 public:
  PolarDensity(const PriorSpec& prior, const Pom& pom, double tol) : prior_(prior), pom_(pom), tol_(tol) {}

  double operator()(double s, double phi) const {
    return density(prior_, pom_, ReconstructionPoint::disk(s * std::cos(phi), s * std::sin(phi)));
  }

  // Integral of rho s ds over [0, r] along the ray at phi.
  double radial(double phi, double r) const {
    if (r <= 0.0) return 0.0;
    return numerics::integrate_singular_ends([&](double s) { return (*this)(s, phi) * s; }, 0.0, r, tol_);
  }

  // Integral of rho dphi over [a, b] on the circle of radius s.
  double angular(double s, double a, double b) const {
    return numerics::integrate([&](double phi) { return (*this)(s, phi); }, a, b, tol_);
  }

 private:
  const PriorSpec& prior_;
  const Pom& pom_;
  double tol_;
};

// Integral over [0, phi] of a function of angle, assembled from fixed
// Gauss-Legendre rules on `pieces` equal pieces of the circle. Piece
// boundaries are multiples of 2 pi / pieces, which include the symmetry
// angles of both measurement models when pieces is a multiple of 12.
class AngularCumulative {
 public:
  // adaptive_tol > 0 switches the per-piece rule to adaptive Gauss-Kronrod.
  AngularCumulative(std::function<double(double)> g, std::size_t pieces, double adaptive_tol = 0.0)
      : g_(std::move(g)), width_(kTwoPi / static_cast<double>(pieces)), tol_(adaptive_tol), prefix_(pieces + 1, 0.0) {
    for (std::size_t k = 0; k < pieces; ++k)
      prefix_[k + 1] = prefix_[k] + piece(width_ * static_cast<double>(k), width_ * static_cast<double>(k + 1));
  }
  double total() const { return prefix_.back(); }
  double operator()(double phi) const {
    if (phi <= 0.0) return 0.0;
    if (phi >= kTwoPi) return total();
    const std::size_t k = std::min(static_cast<std::size_t>(phi / width_), prefix_.size() - 2);
    return prefix_[k] + piece(width_ * static_cast<double>(k), phi);
  }

 private:
  double piece(double a, double b) const {
    return tol_ > 0.0 ? numerics::integrate(g_, a, b, tol_) : numerics::integrate_fixed(g_, a, b);
  }
  std::function<double(double)> g_;
  double width_;
  double tol_;
  std::vector<double> prefix_;
};

// Integral of rho s ds over [0, r] along one ray, from fixed rules on equal
// pieces; the last piece uses the double-exponential rule because the
// density may diverge where the ray meets the rim.
class RayCumulative {
 public:
  RayCumulative(const PolarDensity& rho, double phi, std::size_t pieces = 32)
      : rho_(&rho), phi_(phi), width_(1.0 / static_cast<double>(pieces)), prefix_(pieces + 1, 0.0) {
    for (std::size_t k = 0; k < pieces; ++k)
      prefix_[k + 1] = prefix_[k] + piece(width_ * static_cast<double>(k), width_ * static_cast<double>(k + 1));
  }
  double total() const { return prefix_.back(); }
  double operator()(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return total();
    const std::size_t k = std::min(static_cast<std::size_t>(r / width_), prefix_.size() - 2);
    return prefix_[k] + piece(width_ * static_cast<double>(k), r);
  }

 private:
  double piece(double a, double b) const {
    const auto g = [this](double s) { return (*rho_)(s, phi_) * s; };
    if (b > 1.0 - width_ * 0.5) return numerics::integrate_singular_ends(g, a, b, 1e-12);
    return numerics::integrate_fixed(g, a, b);
  }
  const PolarDensity* rho_;
  double phi_;
  double width_;
  std::vector<double> prefix_;
};

double solve_increasing(const std::function<double(double)>& cumulative, double target, double lo, double hi,
                        const char* what) {
  const double flo = cumulative(lo) - target;
  const double fhi = cumulative(hi) - target;
  if (!(flo <= 0.0 && fhi >= 0.0))
    throw IntegrationError(std::string("cumulative ") + what +
                           " content is not monotone; increase the integration resolution");
  return numerics::bisect([&](double t) { return cumulative(t) - target; }, lo, hi, 1e-13);
}

}  // namespace

double Tiling::ring_boundary(std::size_t i, double phi) const {
  if (i + 1 >= rings) return 1.0;
  if (variant == TilingVariant::RadialRays && !ring_curves.empty())
    return interpolate_periodic(ring_curves[i], phi);
  return ring_radii[i];
}

double Tiling::slice_boundary(std::size_t j, double s) const {
  if (j == 0) return 0.0;
  if (j >= slices) return kTwoPi;
  if (variant == TilingVariant::ConcentricRings && !slice_curves.empty())
    return interpolate(curve_grid, slice_curves[j - 1], s);
  return slice_boundaries[j];
}

std::size_t Tiling::cell_of(const ReconstructionPoint& pt) const {
  const double s = pt.radius();
  const double phi = wrap_angle(std::atan2(pt.y(), pt.x()));
  std::size_t ring = 0;
  while (ring + 1 < rings && s > ring_boundary(ring, phi)) ++ring;
  std::size_t slice = 0;
  while (slice + 1 < slices && phi >= slice_boundary(slice + 1, s)) ++slice;
  return ring * slices + slice;
}

Tiling make_tiling(const PriorSpec& prior, const Pom& pom, const TilingOptions& options) {
  if (!pom.is_disk()) throw UsageError("tilings are defined for the disk models only");
  check_compatible(prior, pom);
  if (options.rings < 1 || options.slices < 1) throw UsageError("tiling needs at least one ring and one slice");
  const double tol = std::min(options.budget.tolerance, 1e-12);
  const PolarDensity rho(prior, pom, tol);
  const std::size_t m = std::max<std::size_t>(options.curve_points, 16);

  Tiling t;
  t.variant = options.variant;
  t.rings = options.rings;
  t.slices = options.slices;

  if (factors_in_polar(prior)) {
    // Uniform in angle; radial content r^2 or the marginal-purity closed form.
    const std::function<double(double)> radial_cumulative =
        prior.kind == PriorKind::MarginalPurityDisk ? std::function<double(double)>(marginal_purity_radial_content)
                                                    : [](double r) { return r * r; };
    for (std::size_t i = 1; i < t.rings; ++i) {
      const double target = static_cast<double>(i) / static_cast<double>(t.rings);
      t.ring_radii.push_back(prior.kind == PriorKind::Primitive
                                 ? std::sqrt(target)
                                 : solve_increasing(radial_cumulative, target, 0.0, 1.0, "radial"));
    }
    t.ring_radii.push_back(1.0);
    for (std::size_t j = 0; j < t.slices; ++j)
      t.slice_boundaries.push_back(kTwoPi * static_cast<double>(j) / static_cast<double>(t.slices));
    return t;
  }

  // Angular profile A(phi) = integral of rho s ds over the whole ray.
  const AngularCumulative angular_cumulative([&](double phi) { return RayCumulative(rho, phi).total(); }, m);
  const double total = angular_cumulative.total();
  if (!(total > 0.0)) throw IntegrationError("prior has no mass on the disk");

  // Marginal radial content from ray cumulatives at the Gauss nodes of 96
  // angular pieces.
  constexpr std::size_t kRadialPieces = 96;
  std::vector<RayCumulative> rays;
  std::vector<double> ray_weights;
  for (std::size_t k = 0; k < kRadialPieces; ++k) {
    const double width = kTwoPi / kRadialPieces;
    for (const auto& [phi, w] : numerics::fixed_rule(width * static_cast<double>(k), width * static_cast<double>(k + 1))) {
      rays.emplace_back(rho, phi);
      ray_weights.push_back(w);
    }
  }
  const auto radial_cumulative = [&](double r) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rays.size(); ++q) acc += ray_weights[q] * rays[q](r);
    return acc / total;
  };
  for (std::size_t i = 1; i < t.rings; ++i) {
    const double target = static_cast<double>(i) / static_cast<double>(t.rings);
    t.ring_radii.push_back(solve_increasing(radial_cumulative, target, 0.0, 1.0, "radial"));
  }
  t.ring_radii.push_back(1.0);

  t.slice_boundaries.push_back(0.0);
  for (std::size_t j = 1; j < t.slices; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(t.slices);
    t.slice_boundaries.push_back(
        solve_increasing(std::cref(angular_cumulative), target, t.slice_boundaries.back(), kTwoPi, "angular"));
  }
  for (std::size_t i = 1; i < t.ring_radii.size(); ++i)
    if (!(t.ring_radii[i] > t.ring_radii[i - 1])) throw IntegrationError("ring radii are not increasing");

  if (t.variant == TilingVariant::RadialRays) {
    t.curve_grid.resize(m);
    t.ring_curves.assign(t.rings - 1, std::vector<double>(m));
    for (std::size_t k = 0; k < m; ++k) {
      const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
      t.curve_grid[k] = phi;
      const RayCumulative ray(rho, phi);
      double lo = 0.0;
      for (std::size_t i = 0; i + 1 < t.rings; ++i) {
        const double target = ray.total() * static_cast<double>(i + 1) / static_cast<double>(t.rings);
        lo = solve_increasing(std::cref(ray), target, lo, 1.0, "conditional radial");
        t.ring_curves[i][k] = lo;
      }
    }
  } else {
    t.curve_grid.resize(m);
    t.slice_curves.assign(t.slices - 1, std::vector<double>(m));
    for (std::size_t k = 0; k < m; ++k) {
      // The rim itself is excluded: on it the Jeffreys densities are not
      // integrable in angle. Closer in than 1e-4 their peaks at the symmetry
      // angles get narrower than a piece, and 1 - x^2 loses digits.
      const double s = std::min(static_cast<double>(k) / static_cast<double>(m - 1), 1.0 - 1e-4);
      t.curve_grid[k] = s;
      if (s == 0.0) {
        for (std::size_t j = 0; j + 1 < t.slices; ++j)
          t.slice_curves[j][k] = kTwoPi * static_cast<double>(j + 1) / static_cast<double>(t.slices);
        continue;
      }
      const AngularCumulative circle([&](double phi) { return rho(s, phi); }, m);
      double lo = 0.0;
      for (std::size_t j = 0; j + 1 < t.slices; ++j) {
        const double target = circle.total() * static_cast<double>(j + 1) / static_cast<double>(t.slices);
        lo = solve_increasing(std::cref(circle), target, lo, kTwoPi, "conditional angular");
        t.slice_curves[j][k] = lo;
      }
    }
  }
  return t;
}

std::vector<Estimate> cell_sizes_monte_carlo(const Tiling& tiling, const PriorSpec& prior, const Pom& pom,
                                             std::size_t samples, std::uint64_t seed) {
  const PriorSample draw = sample(prior, pom, samples, seed);
  const std::size_t cells = tiling.cell_count();
  std::vector<double> sw(cells, 0.0);
  std::vector<std::size_t> cell(draw.points.size());
  double total = 0.0;
  for (std::size_t i = 0; i < draw.points.size(); ++i) {
    cell[i] = tiling.cell_of(draw.points[i].pt);
    sw[cell[i]] += draw.points[i].weight;
    total += draw.points[i].weight;
  }
  std::vector<double> frac(cells), var(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) frac[c] = sw[c] / total;
  // Self-normalized variance: sum_i w_i^2 (1[i in c] - f_c)^2 / W^2.
  double sum_w2 = 0.0;
  std::vector<double> sum_w2_in(cells, 0.0);
  for (std::size_t i = 0; i < draw.points.size(); ++i) {
    const double w2 = draw.points[i].weight * draw.points[i].weight;
    sum_w2 += w2;
    sum_w2_in[cell[i]] += w2;
  }
  std::vector<Estimate> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double f = frac[c];
    const double v = sum_w2_in[c] * (1.0 - f) * (1.0 - f) + (sum_w2 - sum_w2_in[c]) * f * f;
    out[c] = {f, std::sqrt(v) / total};
  }
  return out;
}

std::vector<double> cell_sizes_quadrature(const Tiling& tiling, const PriorSpec& prior, const Pom& pom,
                                          double tolerance) {
  // The outer rule is fixed per piece, so the inner integrals can be tight
  // without the outer one chasing their noise.
  const PolarDensity rho(prior, pom, std::min(tolerance, 1e-10));
  IntegrationBudget budget;
  budget.tolerance = tolerance;
  const double total =
      integrate_over_space(pom, [&](const ReconstructionPoint& pt) { return density(prior, pom, pt); }, budget);
  std::vector<double> out(tiling.cell_count(), 0.0);

  // Integrates g over [a, b], splitting at tabulation nodes where the
  // interpolated boundaries have kinks.
  const auto piecewise = [&](const std::function<double(double)>& g, double a, double b) {
    std::vector<double> cuts{a};
    for (double node : tiling.curve_grid)
      if (node > a && node < b) cuts.push_back(node);
    cuts.push_back(b);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      // pieces without tabulation nodes are split evenly
      const std::size_t parts = tiling.curve_grid.empty() ? 64 : 1;
      for (std::size_t m = 0; m < parts; ++m) {
        const double lo = cuts[k] + (cuts[k + 1] - cuts[k]) * static_cast<double>(m) / parts;
        const double hi = cuts[k] + (cuts[k + 1] - cuts[k]) * static_cast<double>(m + 1) / parts;
        acc += numerics::integrate_fixed(g, lo, hi);
      }
    }
    return acc;
  };

  for (std::size_t i = 0; i < tiling.rings; ++i) {
    for (std::size_t j = 0; j < tiling.slices; ++j) {
      double content = 0.0;
      if (tiling.variant == TilingVariant::RadialRays) {
        const double a = tiling.slice_boundary(j, 0.0);
        const double b = tiling.slice_boundary(j + 1, 0.0);
        content = piecewise(
            [&](double phi) {
              const double inner = i == 0 ? 0.0 : tiling.ring_boundary(i - 1, phi);
              const double outer = tiling.ring_boundary(i, phi);
              return rho.radial(phi, outer) - rho.radial(phi, inner);
            },
            a, b);
      } else {
        const double a = i == 0 ? 0.0 : tiling.ring_radii[i - 1];
        const double b = tiling.ring_radii[i];
        content = piecewise(
            [&](double s) {
              const double lo = tiling.slice_boundary(j, s);
              const double hi = tiling.slice_boundary(j + 1, s);
              return s * rho.angular(s, lo, hi);
            },
            a, b);
      }
      out[i * tiling.slices + j] = content / total;
    }
  }
  return out;
}

}  // namespace optreg
