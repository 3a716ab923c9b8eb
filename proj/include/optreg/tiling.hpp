#pragma once

// Equal-size tilings of the unit disk: `rings` tree rings times `slices` pie
// slices, every cell carrying prior content 1/(rings*slices).
//
// RadialRays: slice boundaries are rays at equal marginal angular content;
//   ring boundaries are curves r_i(phi) at equal conditional radial content
//   along each ray.
// ConcentricRings: ring boundaries are circles at equal marginal radial
//   content; slice boundaries are curves phi_j(s) at equal conditional angular
//   content on each circle.
// For priors that factor in polar coordinates both variants coincide.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "optreg/prior.hpp"

namespace optreg {

enum class TilingVariant { RadialRays, ConcentricRings };

struct Tiling {
  TilingVariant variant = TilingVariant::RadialRays;
  std::size_t rings = 8;
  std::size_t slices = 12;
  // Radii of equal marginal radial content, strictly increasing, last = 1.
  std::vector<double> ring_radii;
  // Angles of equal marginal angular content in [0, 2 pi), first = 0.
  std::vector<double> slice_boundaries;
  // Grid on which curved boundaries are tabulated: angles for RadialRays,
  // radii for ConcentricRings. Empty when the prior factors.
  std::vector<double> curve_grid;
  // RadialRays: ring_curves[i][m] is the outer radius of ring i at
  // curve_grid[m] (i < rings - 1). ConcentricRings: slice_curves[j][m] is the
  // lower angle of slice j + 1 at radius curve_grid[m] (j < slices - 1).
  std::vector<std::vector<double>> ring_curves;
  std::vector<std::vector<double>> slice_curves;

  std::size_t cell_count() const { return rings * slices; }
  // Cell index ring * slices + slice of a disk point.
  std::size_t cell_of(const ReconstructionPoint& pt) const;
  // Outer radius of ring i along the ray at angle phi.
  double ring_boundary(std::size_t i, double phi) const;
  // Lower angle of slice j at radius s (slice 0 starts at angle 0).
  double slice_boundary(std::size_t j, double s) const;
};

struct TilingOptions {
  std::size_t rings = 8;
  std::size_t slices = 12;
  TilingVariant variant = TilingVariant::RadialRays;
  // Resolution of tabulated boundary curves.
  std::size_t curve_points = 720;
  IntegrationBudget budget{};
};

// Throws UsageError for a non-disk model and IntegrationError when a
// cumulative content fails to increase.
Tiling make_tiling(const PriorSpec& prior, const Pom& pom, const TilingOptions& options = {});

// Weighted Monte Carlo estimates of every cell's prior content.
std::vector<Estimate> cell_sizes_monte_carlo(const Tiling& tiling, const PriorSpec& prior, const Pom& pom,
                                             std::size_t samples, std::uint64_t seed);

// Cell contents by direct 2D quadrature over each cell as represented.
std::vector<double> cell_sizes_quadrature(const Tiling& tiling, const PriorSpec& prior, const Pom& pom,
                                          double tolerance = 1e-9);

}  // namespace optreg
