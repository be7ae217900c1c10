#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rbl/error.hpp"
#include "rbl/geometry.hpp"
#include "rbl/modulus.hpp"

namespace rbl {

/// Reduced fraction p/q in (0,1).
class RotationNumber {
 public:
  RotationNumber(int p, int q) : p_(p), q_(q) {
    require(q >= 2 && p >= 1 && p < q, ErrorKind::domain, "rotation number needs 0 < p < q, q >= 2");
    require(std::gcd(p, q) == 1, ErrorKind::domain, "rotation number must be reduced");
  }
  int p() const { return p_; }
  int q() const { return q_; }
  double value() const { return static_cast<double>(p_) / q_; }
  std::string str() const { return std::to_string(p_) + "/" + std::to_string(q_); }

 private:
  int p_, q_;
};

struct Disk {
  Point center;
  double radius = 0;
  bool contains(Point z) const { return std::abs(z - center) < radius; }
};

inline Point quad(Point c, Point z) { return z * z + c; }

inline Point iterate(Point c, Point z, int n) {
  for (int k = 0; k < n; ++k) z = z * z + c;
  return z;
}

/// f_c^n(z) and its z-derivative.
inline std::pair<Point, Point> iterate_with_derivative(Point c, Point z, int n) {
  Point d{1};
  for (int k = 0; k < n; ++k) {
    d *= 2.0 * z;
    z = z * z + c;
  }
  return {z, d};
}

/// Root of the p/q limb on the main cardioid: c = lambda/2 - lambda^2/4.
inline Point cardioid_root(RotationNumber rot) {
  const Point lambda = std::polar(1.0, 2 * std::numbers::pi * rot.value());
  return lambda / 2.0 - lambda * lambda / 4.0;
}

struct AlphaPoint {
  Point alpha;
  Point multiplier;
};

/// Fixed point (1 - sqrt(1-4c))/2 continued from the limb root along the straight
/// path to c, without the repelling check.
inline AlphaPoint alpha_fixed_point_unchecked(Point c, RotationNumber rot) {
  const Point c0 = cardioid_root(rot);
  Point z = std::polar(1.0, 2 * std::numbers::pi * rot.value()) / 2.0;
  const int steps = 256;
  for (int k = 1; k <= steps; ++k) {
    const Point ck = c0 + (c - c0) * (static_cast<double>(k) / steps);
    const Point s = std::sqrt(1.0 - 4.0 * ck);
    if (k < steps)
      require(std::abs(s) > 1e-12, ErrorKind::precondition, "fixed points collide along the continuation path");
    const Point r1 = (1.0 - s) / 2.0, r2 = (1.0 + s) / 2.0;
    z = std::abs(r1 - z) <= std::abs(r2 - z) ? r1 : r2;
  }
  return {z, 2.0 * z};
}

inline AlphaPoint alpha_fixed_point(Point c, RotationNumber rot) {
  AlphaPoint a = alpha_fixed_point_unchecked(c, rot);
  require(std::abs(a.multiplier) > 1 + 1e-12, ErrorKind::precondition,
          "alpha fixed point is not repelling (|f'(alpha)| = " + std::to_string(std::abs(a.multiplier)) + ")");
  return a;
}

inline std::vector<Point> critical_cycle(Point c, int q) {
  std::vector<Point> a(q);
  Point z{0};
  for (int j = 0; j < q; ++j) {
    a[j] = z;
    z = z * z + c;
  }
  return a;
}

/// Combinatorial rotation number of a cycle around alpha, as p' with p'/q; -1 when
/// the cyclic order is not a rotation.
inline int cycle_rotation(const std::vector<Point>& cycle, Point alpha) {
  const int q = static_cast<int>(cycle.size());
  std::vector<int> order(q), rank(q);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return std::arg(cycle[i] - alpha) < std::arg(cycle[j] - alpha); });
  for (int k = 0; k < q; ++k) rank[order[k]] = k;
  const int step = ((rank[1 % q] - rank[0]) % q + q) % q;
  for (int j = 0; j < q; ++j)
    if (((rank[(j + 1) % q] - rank[j]) % q + q) % q != step) return -1;
  return step;
}

/// Center of the p/q satellite hyperbolic component: Newton on f_c^q(0) = 0,
/// seeded outside the cardioid next to the limb root.
inline Point satellite_center(RotationNumber rot) {
  const int q = rot.q();
  const Point lambda = std::polar(1.0, 2 * std::numbers::pi * rot.value());
  const Point c0 = cardioid_root(rot);
  const Point tangent = Point(0, std::numbers::pi) * lambda * (1.0 - lambda);
  const Point normal = Point(0, -1) * tangent / std::abs(tangent);
  const double delta = std::sin(std::numbers::pi * rot.value()) / (q * q);
  bool wrong_period = false;
  for (double k : {1.0, 0.75, 1.5, 0.5, 2.0, 3.0}) {
    Point c = c0 + k * delta * normal;
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      Point z{0}, dz{0};
      for (int j = 0; j < q; ++j) {
        dz = 2.0 * z * dz + 1.0;
        z = z * z + c;
      }
      if (std::abs(dz) == 0 || !std::isfinite(std::abs(z))) break;
      const Point step = z / dz;
      c -= step;
      if (std::abs(c) > 4) break;
      if (std::abs(step) < 1e-15 * (1 + std::abs(c))) {
        ok = true;
        break;
      }
    }
    if (!ok || std::abs(iterate(c, 0, q)) > 1e-12) continue;
    bool exact = true;
    for (int m = 1; m < q; ++m)
      if (std::abs(iterate(c, 0, m)) < 1e-6) exact = false;
    if (!exact) {
      wrong_period = true;
      continue;
    }
    try {
      const AlphaPoint a = alpha_fixed_point(c, rot);
      if (cycle_rotation(critical_cycle(c, q), a.alpha) == rot.p()) return c;
    } catch (const Error&) {
    }
    wrong_period = true;
  }
  if (wrong_period) fail(ErrorKind::period, "Newton reached a center of another period or rotation for " + rot.str());
  fail(ErrorKind::convergence, "Newton iteration for the satellite center did not converge for " + rot.str());
}

namespace detail {

/// Uniform hash grid over the plane used to thin sample sets.
class CellSet {
 public:
  explicit CellSet(double cell) : cell_(cell) {}
  /// Number of times the cell of z has been hit, including this one.
  int insert(Point z) { return ++seen_[key_of(z)]; }

 private:
  std::uint64_t key_of(Point z) const {
    const auto ix = static_cast<std::int64_t>(std::floor(z.real() / cell_));
    const auto iy = static_cast<std::int64_t>(std::floor(z.imag() / cell_));
    return (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(iy);
  }
  double cell_;
  std::unordered_map<std::uint64_t, int> seen_;
};

}  // namespace detail

struct JuliaSampling {
  std::vector<Point> points;
  /// Hit-grid cell; every returned point lies in its own cell.
  double cell = 0;
  /// Index of the nearest recorded ancestor under f^q (-1 for alpha or when dropped).
  std::vector<int> parent;
};

/// Preimage of z under f^q along the branch that follows the critical cycle,
/// landing next to a_0; the second root is the negative.
inline Point cycle_inverse(Point c, const std::vector<Point>& cycle, Point z) {
  const int q = static_cast<int>(cycle.size());
  Point w = z;
  for (int j = q - 1; j >= 1; --j) {
    const Point s = std::sqrt(w - c);
    w = std::abs(s - cycle[j]) <= std::abs(-s - cycle[j]) ? s : -s;
  }
  return std::sqrt(w - c);
}

/// Samples of the small Julia set J*_0 by the modified inverse iteration of f^q
/// restricted to V. A hit-grid cell is expanded at most `visits` times and
/// contributes one sample; repeated visits let chains creep into the cusps at
/// alpha and -alpha, where f^q is only weakly expanding.
inline JuliaSampling sample_small_julia_cells(Point c, RotationNumber rot, const Disk& V, double cell,
                                              int visits = 16, std::size_t max_points = 4000000) {
  require(cell > 0, ErrorKind::domain, "sampling cell must be positive");
  require(visits >= 1, ErrorKind::domain, "visits per cell must be positive");
  const int q = rot.q();
  const std::vector<Point> cycle = critical_cycle(c, q);
  const Point alpha = alpha_fixed_point(c, rot).alpha;
  struct Node {
    Point z;
    int parent;
    int sample;
  };
  std::vector<Node> nodes{{alpha, -1, 0}};
  detail::CellSet seen(cell);
  seen.insert(alpha);
  JuliaSampling out;
  out.cell = cell;
  out.points.push_back(alpha);
  out.parent.push_back(-1);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    const Point u = cycle_inverse(c, cycle, nodes[k].z);
    for (Point p : {u, -u}) {
      if (!V.contains(p)) continue;
      const int n = seen.insert(p);
      if (n > visits) continue;
      require(nodes.size() < max_points, ErrorKind::sampling, "sample budget exceeded");
      int sample = -1;
      if (n == 1) {
        sample = static_cast<int>(out.points.size());
        out.points.push_back(p);
        int par = k;
        while (par >= 0 && nodes[par].sample < 0) par = nodes[par].parent;
        out.parent.push_back(par >= 0 ? nodes[par].sample : -1);
      }
      nodes.push_back({p, k, sample});
      stack.push_back(static_cast<int>(nodes.size()) - 1);
    }
  }
  // Verification: a sample and its 50 ancestors stay in V, each mapped by f^q onto the next.
  std::size_t good = 0;
  const double tol = 1e-9 * (1 + V.radius);
  std::vector<char> keep(nodes.size(), 0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].sample < 0) continue;
    bool ok = std::abs(iterate(c, nodes[k].z, 2 * q)) < 4;
    int cur = static_cast<int>(k);
    for (int step = 0; ok && step < 50 && cur >= 0; ++step) {
      const int par = nodes[cur].parent;
      const Point target = par >= 0 ? nodes[par].z : alpha;
      ok = std::abs(iterate(c, nodes[cur].z, q) - target) < tol && V.contains(nodes[cur].z);
      cur = par;
    }
    keep[nodes[k].sample] = ok;
    good += ok;
  }
  require(2 * good >= out.points.size(), ErrorKind::sampling, "fewer than half of the samples verify");
  JuliaSampling filtered;
  filtered.cell = cell;
  std::vector<int> remap(out.points.size(), -1);
  for (std::size_t k = 0; k < out.points.size(); ++k)
    if (keep[k]) {
      remap[k] = static_cast<int>(filtered.points.size());
      filtered.points.push_back(out.points[k]);
      filtered.parent.push_back(out.parent[k] >= 0 ? remap[out.parent[k]] : -1);
    }
  return filtered;
}

/// At least n_samples points of J*_0; the hit grid is refined until there are enough.
inline std::vector<Point> sample_small_julia(Point c, RotationNumber rot, const Disk& V, std::size_t n_samples) {
  require(n_samples >= 1, ErrorKind::domain, "need at least one sample");
  double cell = 2 * V.radius / (4 * std::sqrt(static_cast<double>(n_samples)));
  for (int k = 0; k < 16; ++k, cell /= 2) {
    JuliaSampling s = sample_small_julia_cells(c, rot, V, cell);
    if (s.points.size() >= n_samples) return std::move(s.points);
  }
  fail(ErrorKind::sampling, "could not reach the requested number of samples");
}

/// Critical points of f^q: all z with f^j(z) = 0 for some 0 <= j < q, by level j.
inline std::vector<std::vector<Point>> critical_points(Point c, int q) {
  std::vector<std::vector<Point>> levels{{Point{0}}};
  for (int j = 1; j < q; ++j) {
    std::vector<Point> next;
    for (const auto& w : levels.back()) {
      const Point s = std::sqrt(w - c);
      next.push_back(s);
      next.push_back(-s);
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

/// f^q : U -> V together with the data the modulus estimates need.
struct PLRestriction {
  Point c;
  RotationNumber rot{1, 2};
  int d_star = 0;
  Point alpha;
  Point alpha_multiplier;
  Polygon V;
  std::optional<Disk> V_disk;
  Polygon U;
  /// The half of the U boundary covering the V boundary once under f^q.
  Polygon U_half;
  std::vector<Point> K_samples;
  double sample_cell = 0;
  double nesting_gap = 0;
  int s = 1;
  int r_base = 1;
  std::string v_policy;
};

namespace detail {

struct Lifter {
  Point c;
  int q;
  double scale;
  int max_depth = 48;

  /// Moves z with f^q(z) = g0 to the lift of g1 along the segment; appends every
  /// accepted intermediate point.
  void step(Point& z, Point g0, Point g1, Polygon& out, int depth = 0) const {
    auto [F, dF] = iterate_with_derivative(c, z, q);
    bool ok = std::abs(dF) > 0;
    Point pred{}, w{};
    if (ok) {
      pred = z + (g1 - F) / dF;
      w = pred;
      ok = false;
      for (int it = 0; it < 12; ++it) {
        auto [Fw, dFw] = iterate_with_derivative(c, w, q);
        if (std::abs(dFw) == 0) break;
        const Point dw = (Fw - g1) / dFw;
        w -= dw;
        if (std::abs(Fw - g1) < 1e-13 * (1 + std::abs(g1)) && std::abs(dw) < 1e-12 * scale) {
          ok = true;
          break;
        }
      }
      ok = ok && std::abs(w - pred) <= 0.25 * std::abs(pred - z) + 1e-13 * scale &&
           std::abs(w - z) < 0.05 * scale;
    }
    if (ok) {
      z = w;
      out.push_back(z);
      return;
    }
    require(depth < max_depth, ErrorKind::tracing, "boundary lift failed to resolve a branch");
    const Point mid = 0.5 * (g0 + g1);
    step(z, g0, mid, out, depth + 1);
    step(z, mid, g1, out, depth + 1);
  }
};

/// Winding number of a closed polyline around p.
inline int winding_number(const Polygon& poly, Point p) {
  double total = 0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    total += std::arg((poly[(i + 1) % poly.size()] - p) / (poly[i] - p));
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

}  // namespace detail

/// Component U of f^{-q}(V) containing 0, traced by lifting the boundary of V.
/// V must be a Jordan polygon containing 0 and K*_0.
inline PLRestriction pullback_restriction(Point c, RotationNumber rot, const Polygon& V_in,
                                          std::vector<Point> K_samples = {}, double sample_cell = 0) {
  const int q = rot.q();
  require(V_in.size() >= 3, ErrorKind::domain, "V needs at least three vertices");
  Polygon Vp = V_in;
  make_counterclockwise(Vp);
  require(point_in_polygon(0, Vp), ErrorKind::not_nested, "V does not contain the critical point");
  const AlphaPoint ap = alpha_fixed_point(c, rot);
  const Box vb = bounding_box(Vp);
  const double diam = std::hypot(vb.width(), vb.height());
  const Polygon V = densify(Vp, 1e-3 * diam);

  // Exit point of the ray from 0 under f^q.
  const Point dir = std::polar(1.0, 0.1234567);
  auto inside = [&](double t) { return point_in_polygon(iterate(c, t * dir, q), V); };
  double t_in = 0, t_out = 0;
  const double dt = 1e-4 * diam;
  for (double t = dt;; t += dt) {
    require(t < 10 * diam + 10, ErrorKind::tracing, "no exit point on the search ray");
    if (!inside(t)) {
      t_out = t;
      t_in = t - dt;
      break;
    }
  }
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (t_in + t_out);
    (inside(m) ? t_in : t_out) = m;
  }
  Point z0 = t_in * dir;
  const Point g_start = iterate(c, z0, q);
  std::size_t edge = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < V.size(); ++i) {
    const double d = distance_to_segment(g_start, V[i], V[(i + 1) % V.size()]);
    if (d < best) best = d, edge = i;
  }
  Polygon gamma{g_start};
  for (std::size_t k = 1; k <= V.size(); ++k) gamma.push_back(V[(edge + k) % V.size()]);
  gamma.push_back(g_start);

  detail::Lifter lift{c, q, diam};
  Polygon U{z0};
  Polygon half;
  Point z = z0;
  const int max_laps = std::min(64, (1 << std::min(q, 6)) + 1);
  int laps = 0;
  for (int lap = 1; lap <= max_laps; ++lap) {
    for (std::size_t k = 1; k < gamma.size(); ++k) lift.step(z, gamma[k - 1], gamma[k], U);
    if (lap == 1) half = U;
    if (std::abs(z - z0) < 1e-7 * diam) {
      laps = lap;
      break;
    }
  }
  require(laps > 0, ErrorKind::tracing, "boundary lift did not close");
  U.pop_back();
  half.pop_back();

  PLRestriction r;
  r.c = c;
  r.rot = rot;
  r.s = rot.q();
  r.alpha = ap.alpha;
  r.alpha_multiplier = ap.multiplier;
  r.V = Vp;
  r.U = U;
  r.U_half = half;
  r.d_star = laps;
  int crit_inside = 0;
  for (const auto& level : critical_points(c, q))
    for (const auto& w : level) crit_inside += point_in_polygon(w, U);
  require(crit_inside + 1 == laps, ErrorKind::degree,
          "boundary laps (" + std::to_string(laps) + ") disagree with critical points inside U (" +
              std::to_string(crit_inside) + ")");
  require(laps == 2, ErrorKind::degree, "f^q : U -> V has degree " + std::to_string(laps) + ", expected 2");
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& u : U) {
    require(point_in_polygon(u, Vp), ErrorKind::not_nested, "U is not contained in V");
    gap = std::min(gap, distance_to_polyline(u, Vp));
  }
  require(gap > 1e-9 * diam, ErrorKind::not_nested, "U touches the boundary of V");
  r.nesting_gap = gap;
  if (K_samples.empty()) {
    const Box ub = bounding_box(U);
    const Point ctr{0.5 * (ub.xmin + ub.xmax), 0.5 * (ub.ymin + ub.ymax)};
    const Disk cover{ctr, 0.5 * std::hypot(ub.width(), ub.height()) * 1.001};
    sample_cell = 2 * cover.radius / 400;
    K_samples = sample_small_julia_cells(c, rot, cover, sample_cell).points;
  }
  r.K_samples = std::move(K_samples);
  r.sample_cell = sample_cell;
  return r;
}

inline PLRestriction pullback_restriction(Point c, RotationNumber rot, const Disk& V,
                                          std::vector<Point> K_samples = {}, double sample_cell = 0) {
  PLRestriction r = pullback_restriction(c, rot, circle_polygon(V.center, V.radius, 1024), std::move(K_samples),
                                         sample_cell);
  r.V_disk = V;
  return r;
}

namespace detail {

/// Boundary of the delta-neighbourhood of a point set (holes filled), traced through
/// the component whose pixels are closest to `seed`.
inline Polygon offset_contour(const std::vector<Point>& pts, double delta, Point seed) {
  const Box b = bounding_box(pts);
  const double g = delta / 8;
  const double x0 = b.xmin - 2 * delta, y0 = b.ymin - 2 * delta;
  const int nx = static_cast<int>(std::ceil((b.width() + 4 * delta) / g)) + 1;
  const int ny = static_cast<int>(std::ceil((b.height() + 4 * delta) / g)) + 1;
  auto center = [&](int i, int j) { return Point(x0 + i * g, y0 + j * g); };
  std::vector<double> dist(static_cast<std::size_t>(nx) * ny, std::numeric_limits<double>::infinity());
  const int reach = static_cast<int>(std::ceil(delta / g)) + 1;
  for (const auto& p : pts) {
    const int ci = static_cast<int>(std::lround((p.real() - x0) / g));
    const int cj = static_cast<int>(std::lround((p.imag() - y0) / g));
    for (int j = std::max(0, cj - reach); j <= std::min(ny - 1, cj + reach); ++j)
      for (int i = std::max(0, ci - reach); i <= std::min(nx - 1, ci + reach); ++i) {
        double& d = dist[static_cast<std::size_t>(j) * nx + i];
        d = std::min(d, std::abs(center(i, j) - p));
      }
  }
  // Outside: 4-connected flood from the frame through nodes at distance >= delta.
  std::vector<std::uint8_t> outside(dist.size(), 0);
  std::vector<std::size_t> stack;
  for (int i = 0; i < nx; ++i) stack.push_back(i), stack.push_back(static_cast<std::size_t>(ny - 1) * nx + i);
  for (int j = 0; j < ny; ++j) stack.push_back(static_cast<std::size_t>(j) * nx), stack.push_back(static_cast<std::size_t>(j) * nx + nx - 1);
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    if (outside[k] || dist[k] < delta) continue;
    outside[k] = 1;
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    if (i > 0) stack.push_back(k - 1);
    if (i + 1 < nx) stack.push_back(k + 1);
    if (j > 0) stack.push_back(k - nx);
    if (j + 1 < ny) stack.push_back(k + nx);
  }
  auto in = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < nx && j < ny && !outside[static_cast<std::size_t>(j) * nx + i];
  };
  // Start on the crack east of the seed pixel.
  int si = std::clamp(static_cast<int>(std::lround((seed.real() - x0) / g)), 0, nx - 1);
  const int sj = std::clamp(static_cast<int>(std::lround((seed.imag() - y0) / g)), 0, ny - 1);
  require(in(si, sj), ErrorKind::structure, "offset neighbourhood misses the seed point");
  while (in(si + 1, sj)) ++si;
  // A directed crack: pixel (i,j) inside on the left, direction d in {E,N,W,S}.
  static constexpr int DX[4] = {1, 0, -1, 0}, DY[4] = {0, 1, 0, -1};
  auto vertex = [&](int i, int j, int d) {
    // Outside neighbour is to the right of the travel direction.
    const int oi = i + DY[d], oj = j - DX[d];
    const double din = dist[static_cast<std::size_t>(j) * nx + i];
    const double dout = in(oi, oj) ? din : dist[static_cast<std::size_t>(oj) * nx + oi];
    const double t = std::isfinite(dout) && dout > din ? std::clamp((delta - din) / (dout - din), 0.0, 1.0) : 0.5;
    return center(i, j) + t * (center(oi, oj) - center(i, j));
  };
  Polygon out;
  const int start_i = si, start_j = sj, start_d = 1;  // outside to the east, travel north
  int i = si, j = sj, d = start_d;
  const std::size_t limit = 8 * dist.size();
  do {
    out.push_back(vertex(i, j, d));
    // Pixels ahead-left and ahead-right of the crack end.
    const int li = i + DX[d], lj = j + DY[d];            // FL: ahead of the inside pixel
    const int ri = li + DY[d], rj = lj - DX[d];          // FR: ahead of the outside pixel
    if (in(ri, rj)) {
      i = ri, j = rj, d = (d + 3) % 4;  // turn right
    } else if (in(li, lj)) {
      i = li, j = lj;  // straight
    } else {
      d = (d + 1) % 4;  // turn left around the same pixel
    }
    require(out.size() < limit, ErrorKind::structure, "contour tracing did not close");
  } while (!(i == start_i && j == start_j && d == start_d));
  return out;
}

}  // namespace detail

struct RestrictionOptions {
  /// Samples used to build V; the PDE cloud is resampled by the caller as needed.
  double coarse_cells = 400;
  int disk_attempts = 40;
};

/// Centre, p/q, V, U and K*_0 for the satellite of rotation number p/q. V is first
/// taken round around the centroid of K*_0, grown by factors 1.05 from the cloud
/// radius; the largest radius before the pullback degree jumps is kept. When no round V works, V is the boundary of a neighbourhood of K*_0 whose
/// width is half the distance from K*_0 to the rest of the critical cycle.
inline PLRestriction build_pl_restriction(RotationNumber rot, const RestrictionOptions& opt = {}) {
  const Point c = satellite_center(rot);
  const int q = rot.q();
  const std::vector<Point> cycle = critical_cycle(c, q);
  const Point alpha = alpha_fixed_point(c, rot).alpha;
  // K*_0 lies within |alpha| of the centre 0 up to a constant; a generous disk bounds it.
  const Disk search{0, 2.5 * std::abs(alpha) + 0.05};
  const double cell = 2 * search.radius / opt.coarse_cells;
  JuliaSampling ks = sample_small_julia_cells(c, rot, search, cell);
  const std::vector<Point>& K = ks.points;
  Point centroid{0};
  for (const auto& p : K) centroid += p;
  centroid /= static_cast<double>(K.size());
  double rad = 0;
  for (const auto& p : K) rad = std::max(rad, std::abs(p - centroid));
  double sep = std::numeric_limits<double>::infinity();
  for (int j = 1; j < q; ++j)
    for (const auto& p : K) sep = std::min(sep, std::abs(p - cycle[j]));
  std::optional<PLRestriction> best;
  for (int k = 1; k <= opt.disk_attempts; ++k) {
    const Disk V{centroid, rad * std::pow(1.05, k)};
    if (!V.contains(0)) continue;
    try {
      best = pullback_restriction(c, rot, V, K, cell);
      best->v_policy = "disk";
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::degree) break;
      if (e.kind() != ErrorKind::not_nested && e.kind() != ErrorKind::tracing) throw;
      if (best) break;
    }
  }
  if (best) return *best;
  const double delta = 0.5 * sep;
  const Polygon V = detail::offset_contour(K, delta, 0);
  PLRestriction r = pullback_restriction(c, rot, V, K, cell);
  r.v_policy = "offset";
  return r;
}

/// Critical point of f^q outside every small Julia set of the cycle. Such points are
/// exactly the critical points other than the cycle points a_0..a_{q-1}; candidates are
/// also kept at distance > eps from the samples of every K*_i.
inline Point external_critical_point(const PLRestriction& r, double eps) {
  const int q = r.rot.q();
  const std::vector<Point> cycle = critical_cycle(r.c, q);
  std::vector<Point> clouds;
  for (int i = 0; i < q; ++i)
    for (const auto& z : r.K_samples) clouds.push_back(iterate(r.c, z, i));
  const double scale = 1 + std::abs(r.alpha);
  for (const auto& level : critical_points(r.c, q))
    for (const auto& w : level) {
      bool on_cycle = false;
      for (const auto& a : cycle) on_cycle = on_cycle || std::abs(w - a) < 1e-9 * scale;
      if (on_cycle) continue;
      bool near = false;
      for (const auto& z : clouds)
        if (std::abs(z - w) <= eps) {
          near = true;
          break;
        }
      if (!near) return w;
    }
  fail(ErrorKind::search, "every critical point of f^q lies in a small Julia set");
}

/// Samples of K*_0 dense enough for a cloud fattened by eps_fat to be connected.
inline std::vector<Point> resample_small_julia(const PLRestriction& r, double eps_fat) {
  require(eps_fat > 0, ErrorKind::domain, "point clouds require eps_fat > 0");
  const Box ub = bounding_box(r.U);
  const Point ctr{0.5 * (ub.xmin + ub.xmax), 0.5 * (ub.ymin + ub.ymax)};
  const Disk cover{ctr, 0.5 * std::hypot(ub.width(), ub.height()) * 1.001};
  return sample_small_julia_cells(r.c, r.rot, cover, eps_fat / 2).points;
}

/// U minus the fattened samples of K*_0; the estimate is lower-biased.
inline AnnularDomain root_annulus(const PLRestriction& r, double eps_fat) {
  require(eps_fat > 0, ErrorKind::domain, "point clouds require eps_fat > 0");
  require(!r.K_samples.empty(), ErrorKind::domain, "restriction carries no samples");
  double edge = 0;
  for (std::size_t i = 0; i < r.U.size(); ++i) edge = std::max(edge, std::abs(r.U[(i + 1) % r.U.size()] - r.U[i]));
  // Nearest boundary vertex through a hash on cells of size `cell`.
  const double cell = std::max(edge, eps_fat) * 2;
  std::unordered_multimap<std::int64_t, Point> buckets;
  auto key = [&](std::int64_t i, std::int64_t j) { return i * 1000003 + j; };
  for (const auto& u : r.U)
    buckets.emplace(key(static_cast<std::int64_t>(std::floor(u.real() / cell)),
                        static_cast<std::int64_t>(std::floor(u.imag() / cell))),
                    u);
  for (const auto& z : r.K_samples) {
    require(point_in_polygon(z, r.U), ErrorKind::degenerate_domain, "sample outside U");
    const auto i = static_cast<std::int64_t>(std::floor(z.real() / cell));
    const auto j = static_cast<std::int64_t>(std::floor(z.imag() / cell));
    for (std::int64_t dj = -1; dj <= 1; ++dj)
      for (std::int64_t di = -1; di <= 1; ++di) {
        auto [lo, hi] = buckets.equal_range(key(i + di, j + dj));
        for (auto it = lo; it != hi; ++it)
          require(std::abs(it->second - z) - edge > eps_fat, ErrorKind::degenerate_domain,
                  "fattened cloud touches the boundary of U");
      }
  }
  return {r.U, PointCloud{r.K_samples, eps_fat}};
}

/// U_i minus K*_i for i = 1..q-1, where U_i is the component of f^{-(q-i)}(U) around
/// K*_i. It is f^i of the pullback of U under f^q. Clouds are thinned to spacing
/// eps_fat / 2 after mapping.
inline std::vector<AnnularDomain> cycle_annuli(const PLRestriction& r, double eps_fat) {
  require(eps_fat > 0, ErrorKind::domain, "point clouds require eps_fat > 0");
  const int q = r.rot.q();
  const PLRestriction next = pullback_restriction(r.c, r.rot, r.U, r.K_samples, r.sample_cell);
  std::vector<AnnularDomain> out;
  for (int i = 1; i < q; ++i) {
    double expand = 1;
    for (const auto& z : r.K_samples) expand = std::max(expand, std::abs(iterate_with_derivative(r.c, z, i).second));
    const std::vector<Point> dense = resample_small_julia(r, eps_fat / expand);
    std::vector<Point> cloud;
    detail::CellSet seen(eps_fat / 2);
    for (const auto& z : dense) {
      const Point w = iterate(r.c, z, i);
      if (seen.insert(w) == 1) cloud.push_back(w);
    }
    Polygon ui;
    for (const auto& u : next.U_half) ui.push_back(iterate(r.c, u, i));
    make_counterclockwise(ui);
    out.push_back({ui, PointCloud{cloud, eps_fat}});
  }
  return out;
}

}  // namespace rbl
