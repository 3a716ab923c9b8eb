#include "optreg/pom.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "optreg/errors.hpp"

namespace optreg {

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

double ReconstructionPoint::radius() const {
  return dim == 1 ? std::abs(coords[0]) : std::hypot(coords[0], coords[1]);
}

ProbabilityVector::ProbabilityVector(std::span<const double> values) {
  if (values.size() > p.size()) throw UsageError("probability vector longer than 4 outcomes");
  size = values.size();
  std::copy(values.begin(), values.end(), p.begin());
}

double ProbabilityVector::sum() const {
  return std::accumulate(p.begin(), p.begin() + static_cast<long>(size), 0.0);
}

double ProbabilityVector::square_norm() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < size; ++k) acc += p[k] * p[k];
  return acc;
}

bool ProbabilityVector::is_normalized(double tol) const {
  for (std::size_t k = 0; k < size; ++k)
    if (p[k] < -tol) return false;
  return std::abs(sum() - 1.0) <= tol;
}

long Counts::total() const { return std::accumulate(n.begin(), n.end(), 0L); }

Pom Pom::from_key(std::string_view key) {
  if (key == "coin") return Pom(PomKind::Coin);
  if (key == "crosshair4") return Pom(PomKind::CrossHair4);
  if (key == "trine3") return Pom(PomKind::Trine3);
  throw UsageError("unknown pom key '" + std::string(key) + "' (expected coin, crosshair4 or trine3)");
}

std::string Pom::key() const {
  switch (kind_) {
    case PomKind::Coin: return "coin";
    case PomKind::CrossHair4: return "crosshair4";
    case PomKind::Trine3: return "trine3";
  }
  return {};
}

std::size_t Pom::num_outcomes() const {
  switch (kind_) {
    case PomKind::Coin: return 2;
    case PomKind::CrossHair4: return 4;
    case PomKind::Trine3: return 3;
  }
  return 0;
}

std::size_t Pom::dimension() const { return kind_ == PomKind::Coin ? 1 : 2; }

void Pom::check_counts(const Counts& counts) const {
  if (counts.size() != num_outcomes())
    throw UsageError("counts for " + key() + " need " + std::to_string(num_outcomes()) +
                     " entries, got " + std::to_string(counts.size()));
  for (long v : counts.n)
    if (v < 0) throw UsageError("counts must be nonnegative");
}

void Pom::check_point(const ReconstructionPoint& pt) const {
  if (pt.dim != dimension())
    throw UsageError("point for " + key() + " needs " + std::to_string(dimension()) +
                     " coordinates, got " + std::to_string(pt.dim));
}

ProbabilityVector Pom::probabilities(const ReconstructionPoint& pt) const {
  check_point(pt);
  ProbabilityVector out;
  out.size = num_outcomes();
  const double x = pt.x();
  const double y = pt.y();
  switch (kind_) {
    case PomKind::Coin:
      out[0] = 0.5 * (1.0 + x);
      out[1] = 0.5 * (1.0 - x);
      break;
    case PomKind::CrossHair4:
      out[0] = 0.25 * (1.0 + x);
      out[1] = 0.25 * (1.0 - x);
      out[2] = 0.25 * (1.0 + y);
      out[3] = 0.25 * (1.0 - y);
      break;
    case PomKind::Trine3:
      out[0] = (1.0 + x) / 3.0;
      out[1] = (2.0 - x + kSqrt3 * y) / 6.0;
      out[2] = (2.0 - x - kSqrt3 * y) / 6.0;
      break;
  }
  return out;
}

bool Pom::contains(const ReconstructionPoint& pt) const {
  if (pt.dim != dimension()) return false;
  if (dimension() == 1) return std::abs(pt.x()) <= 1.0 + kBoundaryTolerance;
  return pt.x() * pt.x() + pt.y() * pt.y() <= 1.0 + kBoundaryTolerance;
}

bool Pom::is_permissible(const ProbabilityVector& p) const {
  if (p.size != num_outcomes()) throw UsageError("probability vector length does not match the pom");
  const double tol = kEqualityTolerance;
  for (std::size_t k = 0; k < p.size; ++k)
    if (p[k] < -tol) return false;
  switch (kind_) {
    case PomKind::Coin:
      return std::abs(p.sum() - 1.0) <= tol;
    case PomKind::CrossHair4:
      return std::abs(p[0] + p[1] - 0.5) <= tol && std::abs(p[2] + p[3] - 0.5) <= tol &&
             3.0 - 8.0 * p.square_norm() >= -tol;
    case PomKind::Trine3:
      return std::abs(p.sum() - 1.0) <= tol && 1.0 - 2.0 * p.square_norm() >= -tol;
  }
  return false;
}

std::optional<ReconstructionPoint> Pom::coordinates_from_frequencies(const Counts& counts) const {
  check_counts(counts);
  const long total = counts.total();
  if (total == 0) throw UsageError("coordinates_from_frequencies needs at least one count");
  const double nn = static_cast<double>(total);
  ReconstructionPoint pt;
  switch (kind_) {
    case PomKind::Coin:
      pt = ReconstructionPoint::segment(2.0 * counts[0] / nn - 1.0);
      break;
    case PomKind::CrossHair4: {
      const long sx = counts[0] + counts[1];
      const long sy = counts[2] + counts[3];
      if (sx == 0 || sy == 0) return std::nullopt;
      pt = ReconstructionPoint::disk(static_cast<double>(counts[0] - counts[1]) / sx,
                                     static_cast<double>(counts[2] - counts[3]) / sy);
      break;
    }
    case PomKind::Trine3:
      pt = ReconstructionPoint::disk(3.0 * counts[0] / nn - 1.0,
                                     kSqrt3 * static_cast<double>(counts[1] - counts[2]) / nn);
      break;
  }
  if (!contains(pt)) return std::nullopt;
  return pt;
}

ReconstructionPoint Pom::vanishing_point(std::size_t k) const {
  if (k >= num_outcomes()) throw UsageError("outcome index out of range");
  switch (kind_) {
    case PomKind::Coin:
      return ReconstructionPoint::segment(k == 0 ? -1.0 : 1.0);
    case PomKind::CrossHair4: {
      static constexpr std::array<std::array<double, 2>, 4> pts{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
      return ReconstructionPoint::disk(pts[k][0], pts[k][1]);
    }
    case PomKind::Trine3: {
      // p1 vanishes at x=-1; p2, p3 where the trine directions rotated by pi
      // meet the circle.
      const double angle = std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / 3.0;
      if (k == 0) return ReconstructionPoint::disk(-1.0, 0.0);
      return ReconstructionPoint::disk(std::cos(angle), std::sin(angle));
    }
  }
  return {};
}

ReconstructionPoint Pom::boundary_point(double angle) const {
  if (dimension() == 1) return ReconstructionPoint::segment(std::cos(angle) >= 0.0 ? 1.0 : -1.0);
  return ReconstructionPoint::disk(std::cos(angle), std::sin(angle));
}

}  // namespace optreg
