#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rbl/error.hpp"
#include "rbl/geometry.hpp"
#include "rbl/specfun.hpp"

namespace rbl {

/// P = {alpha, z_1..z_t} with an optional distinguished point w.
struct MarkedPointSet {
  SpherePoint alpha = SpherePoint::inf();
  std::vector<Point> satellites;
  std::optional<Point> external;

  /// z_1..z_t followed by w when w is not one of them.
  std::vector<Point> finite_points() const {
    std::vector<Point> pts = satellites;
    if (external && std::find(pts.begin(), pts.end(), *external) == pts.end()) pts.push_back(*external);
    return pts;
  }
};

inline double diameter(std::span<const Point> pts) {
  require(!pts.empty(), ErrorKind::domain, "diameter needs at least one point");
  double d = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, std::abs(pts[i] - pts[j]));
  return d;
}

/// Index pair (i < j) of the closest pair; exact ties go to the lexicographically smallest pair.
inline std::pair<std::size_t, std::size_t> closest_pair(std::span<const Point> pts) {
  require(pts.size() >= 2, ErrorKind::domain, "closest pair needs at least two points");
  double best = std::numeric_limits<double>::infinity();
  std::pair<std::size_t, std::size_t> arg{0, 1};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = std::norm(pts[i] - pts[j]);
      if (d < best) best = d, arg = {i, j};
    }
  return arg;
}

inline double min_gap(std::span<const Point> pts) {
  auto [i, j] = closest_pair(pts);
  return std::abs(pts[i] - pts[j]);
}

inline void require_distinct(std::span<const Point> pts) {
  if (pts.size() < 2) return;
  const double diam = diameter(pts);
  require(min_gap(pts) > 1e-13 * diam, ErrorKind::domain, "duplicate points");
}

struct PackBound {
  double bound = 0;
  double min_gap = 0;
  bool holds = false;
};

inline PackBound pack_bound(std::span<const Point> pts) {
  require(pts.size() >= 2, ErrorKind::domain, "packing bound needs t >= 2 points");
  require_distinct(pts);
  PackBound r;
  r.bound = 2.0 / std::sqrt(static_cast<double>(pts.size())) * diameter(pts);
  r.min_gap = min_gap(pts);
  r.holds = r.min_gap < r.bound;
  return r;
}

/// Same set with alpha sent to infinity by z -> 1/(z - alpha).
inline MarkedPointSet normalize_alpha_to_infinity(const MarkedPointSet& P) {
  if (P.alpha.infinite) return P;
  const Point a = P.alpha.z;
  auto map = [&](Point z) {
    require(std::abs(z - a) > 0, ErrorKind::domain, "marked point coincides with alpha");
    return 1.0 / (z - a);
  };
  MarkedPointSet out;
  for (const auto& z : P.satellites) out.satellites.push_back(map(z));
  if (P.external) out.external = map(*P.external);
  return out;
}

/// A member of the closest pair of the finite points (alpha at infinity) other than w.
inline Point select_pair(const MarkedPointSet& P, Point w) {
  const std::vector<Point> pts = P.finite_points();
  require(pts.size() >= 3, ErrorKind::domain, "select_pair needs t >= 3");
  std::size_t widx = pts.size();
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (pts[k] == w) widx = k;
  require(widx < pts.size(), ErrorKind::domain, "w is not a marked point");
  const std::vector<Point> norm = normalize_alpha_to_infinity(P).finite_points();
  require_distinct(norm);
  auto [i, j] = closest_pair(norm);
  return pts[i == widx ? j : i];
}

inline ModulusValue static_bound(long long t) {
  require(t >= 3, ErrorKind::domain, "static bound needs t >= 3");
  return ModulusValue(std::numbers::pi / std::log(4.0 * static_cast<double>(t)));
}

/// Lower bound tau(m) * diam(Z) / 2 for the distance from Z to the complement of V.
inline double euclid_distance_bound(double diam_z, ModulusValue m) {
  require(diam_z > 0, ErrorKind::domain, "diameter must be positive");
  require(m.value() > 0, ErrorKind::domain, "modulus must be positive");
  return tau(m).value() * diam_z / 2;
}

}  // namespace rbl
