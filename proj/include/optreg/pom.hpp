#pragma once

// Built-in measurement models (POMs) and their reconstruction spaces.
//
// Coin        K=2, d=1   coordinate u = p1 - p2 in [-1, 1]
// CrossHair4  K=4, d=2   sigma_x and sigma_y projective measurements, unit disk
// Trine3      K=3, d=2   trine measurement, unit disk
//
// Disk coordinates are the Bloch-equator components x = <sigma_x>,
// y = <sigma_y>.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace optreg {

inline constexpr double kEqualityTolerance = 1e-9;
inline constexpr double kBoundaryTolerance = 1e-12;

struct ReconstructionPoint {
  std::array<double, 2> coords{};
  std::size_t dim = 2;

  static ReconstructionPoint segment(double u) { return {{u, 0.0}, 1}; }
  static ReconstructionPoint disk(double x, double y) { return {{x, y}, 2}; }

  double x() const { return coords[0]; }
  double y() const { return coords[1]; }
  // Distance from the centre of the reconstruction space (|u| on the segment).
  double radius() const;
  std::span<const double> values() const { return {coords.data(), dim}; }
};

struct ProbabilityVector {
  std::array<double, 4> p{};
  std::size_t size = 0;

  ProbabilityVector() = default;
  explicit ProbabilityVector(std::span<const double> values);

  double operator[](std::size_t k) const { return p[k]; }
  double& operator[](std::size_t k) { return p[k]; }
  std::span<const double> values() const { return {p.data(), size}; }
  double sum() const;
  // p^2 = sum_k p_k^2
  double square_norm() const;
  // Nonnegative components summing to one within 1e-12.
  bool is_normalized(double tol = 1e-12) const;
};

struct Counts {
  std::vector<long> n;

  long total() const;
  std::size_t size() const { return n.size(); }
  long operator[](std::size_t k) const { return n[k]; }
};

enum class PomKind { Coin, CrossHair4, Trine3 };

class Pom {
 public:
  explicit Pom(PomKind kind) : kind_(kind) {}

  // "coin" | "crosshair4" | "trine3"; throws UsageError otherwise.
  static Pom from_key(std::string_view key);
  std::string key() const;

  PomKind kind() const { return kind_; }
  std::size_t num_outcomes() const;
  std::size_t dimension() const;
  bool is_disk() const { return kind_ != PomKind::Coin; }

  // Affine Born-rule map; throws UsageError on a dimension mismatch.
  ProbabilityVector probabilities(const ReconstructionPoint& pt) const;

  // Closed segment / closed unit disk, with kBoundaryTolerance slack.
  bool contains(const ReconstructionPoint& pt) const;

  // Delta and step constraints on the probabilities (equalities within 1e-9).
  bool is_permissible(const ProbabilityVector& p) const;

  // Stationary point of sum_k n_k log p_k when it lies inside the
  // reconstruction space; empty when it does not or a denominator vanishes.
  // Throws UsageError for N = 0 or a count-length mismatch.
  std::optional<ReconstructionPoint> coordinates_from_frequencies(const Counts& counts) const;

  // Point of the closed space where outcome k has probability zero.
  ReconstructionPoint vanishing_point(std::size_t k) const;

  // Point on the boundary at the given angle (coin: angle 0 -> u=+1, pi -> u=-1).
  ReconstructionPoint boundary_point(double angle) const;

  void check_counts(const Counts& counts) const;
  void check_point(const ReconstructionPoint& pt) const;

  bool operator==(const Pom&) const = default;

 private:
  PomKind kind_;
};

}  // namespace optreg
