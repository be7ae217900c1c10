#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "rbl/error.hpp"

namespace rbl {

using Point = std::complex<double>;
using Polygon = std::vector<Point>;

/// A point of the Riemann sphere.
struct SpherePoint {
  Point z{};
  bool infinite = false;

  static SpherePoint at(Point p) { return {p, false}; }
  static SpherePoint inf() { return {Point{}, true}; }
};

struct Box {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(Point p) const {
    return p.real() >= xmin && p.real() <= xmax && p.imag() >= ymin && p.imag() <= ymax;
  }
};

inline Box bounding_box(std::span<const Point> pts) {
  require(!pts.empty(), ErrorKind::domain, "bounding box of an empty set");
  Box b{pts[0].real(), pts[0].imag(), pts[0].real(), pts[0].imag()};
  for (const auto& p : pts) {
    b.xmin = std::min(b.xmin, p.real());
    b.xmax = std::max(b.xmax, p.real());
    b.ymin = std::min(b.ymin, p.imag());
    b.ymax = std::max(b.ymax, p.imag());
  }
  return b;
}

inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline double signed_area(std::span<const Point> poly) {
  double s = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * s;
}

inline void make_counterclockwise(Polygon& poly) {
  if (signed_area(poly) < 0) std::reverse(poly.begin(), poly.end());
}

/// Even-odd rule; points exactly on an edge may go either way.
inline bool point_in_polygon(Point p, std::span<const Point> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i], b = poly[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

inline double distance_to_segment(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0) return std::abs(p - a);
  double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline double distance_to_polyline(Point p, std::span<const Point> poly, bool closed = true) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  const std::size_t m = closed ? n : n - 1;
  for (std::size_t i = 0; i < m; ++i) best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
  return best;
}

inline double perimeter(std::span<const Point> poly) {
  double s = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += std::abs(poly[(i + 1) % poly.size()] - poly[i]);
  return s;
}

/// Split every edge so no piece is longer than max_len.
inline Polygon densify(std::span<const Point> poly, double max_len) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i], b = poly[(i + 1) % n];
    int k = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_len)));
    for (int j = 0; j < k; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / k));
  }
  return out;
}

inline Polygon circle_polygon(Point center, double radius, int n) {
  Polygon out(n);
  for (int k = 0; k < n; ++k) out[k] = center + std::polar(radius, 2 * std::numbers::pi * k / n);
  return out;
}

inline Polygon rectangle_polygon(const Box& b) {
  return {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
}

/// z -> (a z + b) / (c z + d) acting on the Riemann sphere.
struct Mobius {
  Point a{1}, b{0}, c{0}, d{1};

  static Mobius identity() { return {}; }

  /// Sends z1 -> 0, z2 -> 1, z3 -> infinity.
  static Mobius from_frame(SpherePoint z1, SpherePoint z2, SpherePoint z3) {
    auto same = [](const SpherePoint& u, const SpherePoint& v) {
      if (u.infinite || v.infinite) return u.infinite && v.infinite;
      return std::abs(u.z - v.z) <= 1e-14 * (1 + std::abs(u.z) + std::abs(v.z));
    };
    require(!same(z1, z2) && !same(z2, z3) && !same(z1, z3), ErrorKind::domain, "degenerate Mobius frame");
    // M(z) = (z - z1)(z2 - z3) / ((z - z3)(z2 - z1)) with the usual limits at infinity.
    if (z3.infinite) return normalize({Point{1}, -z1.z, Point{0}, z2.z - z1.z});
    if (z1.infinite) return normalize({Point{0}, z2.z - z3.z, Point{1}, -z3.z});
    if (z2.infinite) return normalize({Point{1}, -z1.z, Point{1}, -z3.z});
    const Point k = z2.z - z3.z, l = z2.z - z1.z;
    return normalize({k, -z1.z * k, l, -z3.z * l});
  }

  static Mobius normalize(Mobius m) {
    Point det = m.a * m.d - m.b * m.c;
    require(std::abs(det) > 0, ErrorKind::domain, "singular Mobius map");
    Point s = std::sqrt(det);
    return {m.a / s, m.b / s, m.c / s, m.d / s};
  }

  bool is_affine() const { return c == Point{0}; }

  SpherePoint apply(SpherePoint p) const {
    if (p.infinite) {
      if (c == Point{0}) return SpherePoint::inf();
      return SpherePoint::at(a / c);
    }
    const Point den = c * p.z + d;
    if (den == Point{0}) return SpherePoint::inf();
    return SpherePoint::at((a * p.z + b) / den);
  }

  Point apply_finite(Point z) const {
    SpherePoint w = apply(SpherePoint::at(z));
    require(!w.infinite, ErrorKind::domain, "Mobius image at infinity");
    return w.z;
  }

  /// The point sent to infinity.
  SpherePoint pole() const {
    if (c == Point{0}) return SpherePoint::inf();
    return SpherePoint::at(-d / c);
  }

  Point derivative(Point z) const {
    Point den = c * z + d;
    return (a * d - b * c) / (den * den);
  }
};

}  // namespace rbl
