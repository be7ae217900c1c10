#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rbl/detail/laplace_grid.hpp"
#include "rbl/error.hpp"
#include "rbl/geometry.hpp"
#include "rbl/specfun.hpp"

namespace rbl {

/// Obstacle given as the union of closed disks of radius `fat` around samples.
struct PointCloud {
  std::vector<Point> points;
  double fat = 0;
};

/// Doubly connected region between an obstacle and an outer polygon.
/// Polygons may be degenerate (slits); a node lying on a slit takes its value.
struct AnnularDomain {
  Polygon outer;
  std::variant<Polygon, PointCloud> inner;

  bool has_cloud() const { return std::holds_alternative<PointCloud>(inner); }
  const Polygon& inner_polygon() const { return std::get<Polygon>(inner); }
  const PointCloud& inner_cloud() const { return std::get<PointCloud>(inner); }
  Box bbox() const { return bounding_box(outer); }
};

struct Refinement {
  int grid = 0;
  double h = 0;
  double value = 0;
  double residual = 0;
  int iterations = 0;
};

struct ModulusEstimate {
  double value = 0;
  double grid_h = 0;
  double residual = 0;
  std::vector<Refinement> refinements;
  bool lower_biased = false;
  /// refine_until only: whether the requested relative change was met.
  bool converged = true;
  double last_rel_change = 0;
};

struct ModulusOptions {
  bool refine = true;
  double tolerance = 1e-10;
  int max_iterations = 4000;
  double min_fat_cells = 2.0;
};

/// Cell size the engine uses for `grid` intervals along the longer side of the outer box.
inline double grid_cell_size(const AnnularDomain& d, int grid) {
  Box b = d.bbox();
  return std::max(b.width(), b.height()) / grid;
}

namespace detail {

enum : std::uint8_t { kFree = 0, kZero = 1, kOne = 2 };

inline void validate(const AnnularDomain& d) {
  require(d.outer.size() >= 3, ErrorKind::domain, "outer polygon needs at least 3 vertices");
  require(std::abs(signed_area(d.outer)) > 0, ErrorKind::domain, "outer polygon encloses no area");
  if (d.has_cloud()) {
    const auto& c = d.inner_cloud();
    require(!c.points.empty(), ErrorKind::domain, "empty obstacle cloud");
    require(c.fat > 0, ErrorKind::domain, "point-cloud obstacles need a positive fattening radius");
  } else {
    require(d.inner_polygon().size() >= 2, ErrorKind::domain, "inner polygon needs at least 2 vertices");
  }
}

/// Rows of the frame crossed by a closed polygon, even-odd filled.
inline void scanline_fill(const GridFrame& f, const Polygon& poly, std::vector<std::uint8_t>& inside) {
  std::vector<std::vector<double>> rows(f.ny);
  const std::size_t n = poly.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Point a = poly[e], b = poly[(e + 1) % n];
    if (a.imag() == b.imag()) continue;
    const double ylo = std::min(a.imag(), b.imag()), yhi = std::max(a.imag(), b.imag());
    int j0 = std::max(0, static_cast<int>(std::ceil((ylo - f.y0) / f.h)));
    int j1 = std::min(f.ny - 1, static_cast<int>(std::floor((yhi - f.y0) / f.h)));
    for (int j = j0; j <= j1; ++j) {
      const double y = f.y0 + j * f.h;
      if ((a.imag() > y) == (b.imag() > y)) continue;
      rows[j].push_back(a.real() + (y - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag()));
    }
  }
  for (int j = 0; j < f.ny; ++j) {
    auto& xs = rows[j];
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - f.x0) / f.h)));
      int i1 = std::min(f.nx - 1, static_cast<int>(std::ceil((xs[k + 1] - f.x0) / f.h)) - 1);
      for (int i = i0; i <= i1; ++i) inside[f.index(i, j)] = 1;
    }
  }
}

inline void append_segments(const Polygon& poly, std::uint8_t value, double max_len, bool closed,
                            std::vector<Segment>& out) {
  const std::size_t n = poly.size();
  const std::size_t m = closed ? n : n - 1;
  for (std::size_t e = 0; e < m; ++e) {
    const Point a = poly[e], b = poly[(e + 1) % n];
    int k = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_len)));
    for (int s = 0; s < k; ++s)
      out.push_back({a + (b - a) * (static_cast<double>(s) / k), a + (b - a) * (static_cast<double>(s + 1) / k), value});
  }
}

inline void check_cloud_connected(const PointCloud& c) {
  const std::size_t n = c.points.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const double cell = 2 * c.fat;
  Box b = bounding_box(c.points);
  const int nx = static_cast<int>(b.width() / cell) + 1, ny = static_cast<int>(b.height() / cell) + 1;
  auto cx = [&](Point p) { return std::min(nx - 1, static_cast<int>((p.real() - b.xmin) / cell)); };
  auto cy = [&](Point p) { return std::min(ny - 1, static_cast<int>((p.imag() - b.ymin) / cell)); };
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto key = [&](std::uint32_t k) { return static_cast<long long>(cy(c.points[k])) * nx + cx(c.points[k]); };
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return key(x) < key(y); });
  std::vector<long long> keys(n);
  for (std::size_t k = 0; k < n; ++k) keys[k] = key(order[k]);
  const double lim2 = cell * cell;
  for (std::size_t k = 0; k < n; ++k) {
    const Point p = c.points[order[k]];
    const int i = cx(p), j = cy(p);
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
        const long long kk = static_cast<long long>(jj) * nx + ii;
        auto [lo, hi] = std::equal_range(keys.begin(), keys.end(), kk);
        for (auto it = lo; it != hi; ++it) {
          const std::uint32_t other = order[it - keys.begin()];
          if (std::norm(c.points[other] - p) <= lim2) parent[find(other)] = find(order[k]);
        }
      }
  }
  std::uint32_t root = find(0);
  for (std::uint32_t k = 1; k < n; ++k)
    if (find(k) != root) fail(ErrorKind::degenerate_domain, "fattened obstacle cloud is not connected");
}

struct Assembly {
  GridFrame frame;
  Level level;
  std::vector<double> w0, w1;
};

/// Rasterizes the domain: node states, cut-cell links, hole filling, gap check.
inline Assembly assemble(const AnnularDomain& d, int cells, const ModulusOptions& opt) {
  Assembly as;
  GridFrame& f = as.frame;
  f = make_frame(d.bbox(), cells);
  const std::size_t n = f.size();
  const double h = f.h;

  std::vector<std::uint8_t> state(n, kOne);
  {
    std::vector<std::uint8_t> inside(n, 0);
    scanline_fill(f, d.outer, inside);
    for (std::size_t k = 0; k < n; ++k)
      if (inside[k]) state[k] = kFree;
  }
  std::vector<Segment> segs;
  append_segments(d.outer, 1, h, true, segs);
  std::vector<Point> cloud;
  double fat = 0;
  auto mark_zero = [&](std::size_t k) {
    if (state[k] == kOne) fail(ErrorKind::degenerate_domain, "obstacle touches the outer boundary at grid scale");
    state[k] = kZero;
  };
  if (d.has_cloud()) {
    const auto& c = d.inner_cloud();
    require(c.fat >= opt.min_fat_cells * h * (1 - 1e-9), ErrorKind::domain,
            "fattening radius must be at least 2 grid cells");
    cloud = c.points;
    fat = c.fat;
    for (const auto& p : cloud) {
      int i0 = static_cast<int>(std::ceil((p.real() - fat - f.x0) / h));
      int i1 = static_cast<int>(std::floor((p.real() + fat - f.x0) / h));
      int j0 = static_cast<int>(std::ceil((p.imag() - fat - f.y0) / h));
      int j1 = static_cast<int>(std::floor((p.imag() + fat - f.y0) / h));
      require(i0 >= 0 && j0 >= 0 && i1 < f.nx && j1 < f.ny, ErrorKind::degenerate_domain,
              "obstacle leaves the outer boundary box");
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          if (std::norm(f.node(i, j) - p) <= fat * fat) mark_zero(f.index(i, j));
    }
  } else {
    const Polygon& ip = d.inner_polygon();
    if (ip.size() >= 3 && std::abs(signed_area(ip)) > 0) {
      std::vector<std::uint8_t> inside(n, 0);
      scanline_fill(f, ip, inside);
      for (std::size_t k = 0; k < n; ++k)
        if (inside[k]) mark_zero(k);
    }
    append_segments(ip, 0, h, ip.size() >= 3, segs);
  }
  // nodes lying on boundary segments take the segment's value
  for (const auto& s : segs) {
    const double tol = 1e-9 * h;
    int i0 = static_cast<int>(std::ceil((std::min(s.a.real(), s.b.real()) - tol - f.x0) / h));
    int i1 = static_cast<int>(std::floor((std::max(s.a.real(), s.b.real()) + tol - f.x0) / h));
    int j0 = static_cast<int>(std::ceil((std::min(s.a.imag(), s.b.imag()) - tol - f.y0) / h));
    int j1 = static_cast<int>(std::floor((std::max(s.a.imag(), s.b.imag()) + tol - f.y0) / h));
    for (int j = std::max(j0, 0); j <= std::min(j1, f.ny - 1); ++j)
      for (int i = std::max(i0, 0); i <= std::min(i1, f.nx - 1); ++i)
        if (distance_to_segment(f.node(i, j), s.a, s.b) <= tol) {
          const std::size_t k = f.index(i, j);
          if (s.value == 0) mark_zero(k);
          else if (state[k] == kZero) fail(ErrorKind::degenerate_domain, "obstacle touches the outer boundary");
          else state[k] = kOne;
        }
  }

  BoundaryIndex index(f, std::move(segs), std::move(cloud), fat);
  Level& L = as.level;
  L.allocate(f.nx, f.ny);
  as.w0.assign(n, 0.0);
  as.w1.assign(n, 0.0);
  constexpr double theta_min = 1e-3;
  struct Dir {
    int di, dj;
    double weight;
    std::vector<double> Level::*store;
  };
  // isotropic 9-point stencil: axis weight 2/3, diagonal weight 1/6
  const Dir dirs[4] = {{1, 0, 2.0 / 3.0, &Level::we},
                       {0, 1, 2.0 / 3.0, &Level::wn},
                       {1, 1, 1.0 / 6.0, &Level::wne},
                       {-1, 1, 1.0 / 6.0, &Level::wnw}};
  auto link = [&](std::size_t k, double w, double theta, std::uint8_t value) {
    (value ? as.w1 : as.w0)[k] += w / std::max(theta, theta_min);
  };
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const std::size_t a = f.index(i, j);
      for (const Dir& dir : dirs) {
        const int ib = i + dir.di, jb = j + dir.dj;
        if (ib < 0 || ib >= f.nx || jb >= f.ny) continue;
        const std::size_t b = f.index(ib, jb);
        const bool fa = state[a] == kFree, fb = state[b] == kFree;
        if (!fa && !fb) continue;
        double tfirst = 2, tlast = -1;
        std::uint8_t vfirst = 0, vlast = 0;
        index.edge_hits(i, j, dir.di, dir.dj, [&](Hit hit) {
          if (hit.t < tfirst) tfirst = hit.t, vfirst = hit.value;
          if (hit.t > tlast) tlast = hit.t, vlast = hit.value;
        });
        const bool hits = tlast >= 0;
        const double w = dir.weight;
        if (fa && fb) {
          if (!hits) {
            (L.*dir.store)[a] = w;
          } else {
            link(a, w, tfirst, vfirst);
            link(b, w, 1 - tlast, vlast);
          }
        } else if (fa) {
          if (hits) link(a, w, tfirst, vfirst);
          else link(a, w, 1.0, state[b] == kOne);
        } else {
          if (hits) link(b, w, 1 - tlast, vlast);
          else link(b, w, 1.0, state[a] == kOne);
        }
      }
    }
  for (std::size_t k = 0; k < n; ++k)
    if (state[k] == kFree) L.free[k] = 1;

  // free components that never see the outer boundary are enclosed by the obstacle
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t k = 0; k < n; ++k)
    if (L.free[k] && as.w1[k] > 0) reached[k] = 1, stack.push_back(k);
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    auto visit = [&](std::size_t m, double w) {
      if (w != 0 && !reached[m]) reached[m] = 1, stack.push_back(m);
    };
    const std::size_t s = k - f.nx;
    visit(k + 1, L.we[k]);
    visit(k - 1, L.we[k - 1]);
    visit(k + f.nx, L.wn[k]);
    visit(s, L.wn[s]);
    visit(k + f.nx + 1, L.wne[k]);
    visit(s - 1, L.wne[s - 1]);
    visit(k + f.nx - 1, L.wnw[k]);
    visit(s + 1, L.wnw[s + 1]);
  }
  bool sees_obstacle = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (L.free[k] && !reached[k]) {
      L.free[k] = 0;
      state[k] = kZero;
      as.w0[k] = as.w1[k] = 0;
    }
    if (L.free[k] && as.w0[k] > 0) sees_obstacle = true;
  }
  require(sees_obstacle, ErrorKind::degenerate_domain, "obstacle not inside the outer boundary");

  // grid-scale gap between the two boundary sets
  std::vector<std::uint8_t> near1(n, 0);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const std::size_t k = f.index(i, j);
      const bool one = state[k] == kOne || (L.free[k] && as.w1[k] > 0);
      if (!one) continue;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && jj >= 0 && ii < f.nx && jj < f.ny) near1[f.index(ii, jj)] = 1;
        }
    }
  for (std::size_t k = 0; k < n; ++k) {
    const bool zero = state[k] == kZero || (L.free[k] && as.w0[k] > 0);
    if (zero && near1[k]) fail(ErrorKind::degenerate_domain, "obstacle within two grid cells of the outer boundary");
  }

  for (int j = 1; j < f.ny - 1; ++j)
    for (int i = 1; i < f.nx - 1; ++i) {
      const std::size_t k = f.index(i, j);
      if (!L.free[k]) continue;
      const std::size_t s = k - f.nx;
      L.diag[k] = L.we[k] + L.we[k - 1] + L.wn[k] + L.wn[s] + L.wne[k] + L.wne[s - 1] + L.wnw[k] + L.wnw[s + 1] +
                  as.w0[k] + as.w1[k];
    }
  return as;
}

inline double dirichlet_energy(const Level& L, const std::vector<double>& w0, const std::vector<double>& w1,
                               const std::vector<double>& u) {
  double e = 0;
  for (std::size_t k = 0; k < L.size(); ++k) {
    if (!L.free[k]) continue;
    const double uk = u[k];
    if (L.we[k] != 0) e += L.we[k] * (uk - u[k + 1]) * (uk - u[k + 1]);
    if (L.wn[k] != 0) e += L.wn[k] * (uk - u[k + L.nx]) * (uk - u[k + L.nx]);
    if (L.wne[k] != 0) e += L.wne[k] * (uk - u[k + L.nx + 1]) * (uk - u[k + L.nx + 1]);
    if (L.wnw[k] != 0) e += L.wnw[k] * (uk - u[k + L.nx - 1]) * (uk - u[k + L.nx - 1]);
    e += w0[k] * uk * uk + w1[k] * (1 - uk) * (1 - uk);
  }
  return e;
}

inline Refinement solve_at(const AnnularDomain& d, int cells, const ModulusOptions& opt) {
  Assembly as = assemble(d, cells, opt);
  std::vector<double> b = as.w1;
  AggregationMultigrid mg(std::move(as.level));
  SolveResult sol = pcg(mg, b, opt.tolerance, opt.max_iterations);
  const double energy = dirichlet_energy(mg.fine(), as.w0, as.w1, sol.u);
  require(energy > 0 && std::isfinite(energy), ErrorKind::convergence, "nonpositive discrete energy");
  return {cells, as.frame.h, 1.0 / energy, sol.residual, sol.iterations};
}

}  // namespace detail

/// Conformal modulus by the harmonic-potential energy at `grid` and, unless
/// disabled, at one refinement with half the cell size. With the refinement the
/// reported value is the second-order extrapolation of the two raw values.
inline ModulusEstimate compute_modulus(const AnnularDomain& domain, int grid, const ModulusOptions& opt = {}) {
  detail::validate(domain);
  if (domain.has_cloud()) detail::check_cloud_connected(domain.inner_cloud());
  ModulusEstimate est;
  est.lower_biased = domain.has_cloud();
  est.refinements.push_back(detail::solve_at(domain, grid, opt));
  const Refinement& base = est.refinements.front();
  est.value = base.value;
  est.grid_h = base.h;
  if (opt.refine) {
    est.refinements.push_back(detail::solve_at(domain, 2 * grid, opt));
    const double v0 = est.refinements[0].value, v1 = est.refinements[1].value;
    est.last_rel_change = std::abs(v1 - v0) / v1;
    est.value = v1 + (v1 - v0) / 3;
  }
  est.residual = 0;
  for (const auto& r : est.refinements) est.residual = std::max(est.residual, r.residual);
  return est;
}

/// Doubles the resolution from `start_grid` until successive raw values differ by
/// less than `target_rel_change`; grids too coarse to resolve the gap are skipped.
inline ModulusEstimate refine_until(const AnnularDomain& domain, double target_rel_change, int max_grid,
                                    int start_grid = 256, ModulusOptions opt = {}) {
  require(target_rel_change >= 0, ErrorKind::domain, "target relative change must be nonnegative");
  require(start_grid <= max_grid, ErrorKind::domain, "start grid exceeds max grid");
  detail::validate(domain);
  if (domain.has_cloud()) detail::check_cloud_connected(domain.inner_cloud());
  ModulusEstimate est;
  est.lower_biased = domain.has_cloud();
  est.converged = false;
  for (int g = start_grid; g <= max_grid; g *= 2) {
    try {
      est.refinements.push_back(detail::solve_at(domain, g, opt));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_domain || 2 * g > max_grid) throw;
      continue;
    }
    const auto& r = est.refinements;
    est.value = r.back().value;
    est.grid_h = r.back().h;
    est.residual = std::max(est.residual, r.back().residual);
    if (r.size() >= 2) {
      est.last_rel_change = std::abs(r.back().value - r[r.size() - 2].value) / r.back().value;
      if (est.last_rel_change < target_rel_change) {
        est.converged = true;
        break;
      }
    }
  }
  require(!est.refinements.empty(), ErrorKind::degenerate_domain, "no grid up to max_grid resolves the domain");
  return est;
}

inline double round_modulus(double r, double R) {
  require(r > 0 && R > r, ErrorKind::domain, "round annulus needs 0 < r < R");
  return std::log(R / r) / (2 * std::numbers::pi);
}

inline AnnularDomain round_annulus(Point center, double r, double R, int vertices = 4096) {
  require(r > 0 && R > r, ErrorKind::domain, "round annulus needs 0 < r < R");
  return {circle_polygon(center, R, vertices), circle_polygon(center, r, vertices)};
}

/// The extremal ring C \ ([-1,0] u [eps,inf)) carried into the unit disk by
/// w = sqrt(eps - z) followed by a Cayley map; the slit [-1,0] lands on a
/// symmetric real segment, so no truncation is involved.
inline AnnularDomain teichmuller_ring(EpsilonValue eps, int vertices = 8192) {
  const double e = eps.value();
  const double a = std::pow(e * (1 + e), 0.25);
  const double w = std::sqrt(1 + e);
  const double s = (w - a) / (w + a);
  return {circle_polygon(0, 1.0, vertices), Polygon{{-s, 0}, {s, 0}}};
}

/// The same ring with the ray [eps, inf) cut at a box of half-width scale*(1+eps).
inline AnnularDomain teichmuller_ring_truncated(EpsilonValue eps, double scale) {
  const double e = eps.value();
  require(scale > 1, ErrorKind::domain, "truncation scale must exceed 1");
  const double L = scale * (1 + e);
  Polygon outer{{L, 0}, {L, L}, {-L, L}, {-L, -L}, {L, -L}, {L, 0}, {e, 0}};
  return {outer, Polygon{{-1, 0}, {0, 0}}};
}

namespace detail {

inline Polygon mobius_polyline(const Mobius& m, const Polygon& poly, bool closed) {
  const SpherePoint pole = m.pole();
  const double per = perimeter(poly);
  Polygon out;
  const std::size_t n = poly.size();
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t e = 0; e < edges; ++e) {
    const Point a = poly[e], b = poly[(e + 1) % n];
    double step = per / 2048;
    if (!pole.infinite) step = std::min(step, 0.01 * std::max(distance_to_segment(pole.z, a, b), 1e-300));
    const int k = std::clamp(static_cast<int>(std::ceil(std::abs(b - a) / step)), 1, 200000);
    for (int j = 0; j < k; ++j) out.push_back(m.apply_finite(a + (b - a) * (static_cast<double>(j) / k)));
  }
  if (!closed) out.push_back(m.apply_finite(poly.back()));
  return out;
}

}  // namespace detail

/// Image of the domain under the Mobius map sending the frame to (0, 1, infinity).
/// If the pole lies in the obstacle the two boundary components exchange roles.
inline AnnularDomain mobius_normalize(const AnnularDomain& d, SpherePoint z1, SpherePoint z2, SpherePoint z3) {
  detail::validate(d);
  const Mobius m = Mobius::from_frame(z1, z2, z3);
  if (m.is_affine()) {
    AnnularDomain out;
    for (const auto& p : d.outer) out.outer.push_back(m.apply_finite(p));
    make_counterclockwise(out.outer);
    if (d.has_cloud()) {
      PointCloud c{{}, d.inner_cloud().fat * std::abs(m.a / m.d)};
      for (const auto& p : d.inner_cloud().points) c.points.push_back(m.apply_finite(p));
      out.inner = std::move(c);
    } else {
      Polygon ip;
      for (const auto& p : d.inner_polygon()) ip.push_back(m.apply_finite(p));
      if (ip.size() >= 3) make_counterclockwise(ip);
      out.inner = std::move(ip);
    }
    return out;
  }
  require(!d.has_cloud(), ErrorKind::domain, "non-affine Mobius images of point-cloud obstacles are not supported");
  const Point pole = m.pole().z;
  const Polygon& ip = d.inner_polygon();
  const bool inner_closed = ip.size() >= 3;
  const double scale = std::max(d.bbox().width(), d.bbox().height());
  const double on_boundary = std::min(distance_to_polyline(pole, d.outer), distance_to_polyline(pole, ip, inner_closed));
  require(on_boundary > 1e-12 * scale, ErrorKind::domain, "Mobius pole lies on the domain boundary");
  const bool in_outer = point_in_polygon(pole, d.outer);
  const bool in_obstacle = inner_closed && point_in_polygon(pole, ip);
  AnnularDomain out;
  if (!in_outer) {
    out.outer = detail::mobius_polyline(m, d.outer, true);
    out.inner = detail::mobius_polyline(m, ip, inner_closed);
  } else if (in_obstacle) {
    out.outer = detail::mobius_polyline(m, ip, true);
    out.inner = detail::mobius_polyline(m, d.outer, true);
  } else {
    fail(ErrorKind::domain, "Mobius pole lies inside the annulus");
  }
  make_counterclockwise(out.outer);
  if (auto* p = std::get_if<Polygon>(&out.inner); p && p->size() >= 3) make_counterclockwise(*p);
  return out;
}

struct SuperadditivityResult {
  double whole = 0, part1 = 0, part2 = 0;
  bool holds = false;
};

/// mod(whole) >= mod(part1) + mod(part2) - tolerance*mod(whole) for the split of
/// {inner disk} < z < {|z - center| = R} by the circle |z - center| = split_radius.
inline SuperadditivityResult modulus_superadditivity_check(Point center, double R, Point inner_center, double r,
                                                           double split_radius, int grid = 512,
                                                           double tolerance = 0.01) {
  require(r > 0 && R > 0, ErrorKind::domain, "radii must be positive");
  require(std::abs(inner_center - center) + r < split_radius && split_radius < R, ErrorKind::domain,
          "split circle must separate the inner disk from the outer circle");
  const int n = 4096;
  const Polygon outer = circle_polygon(center, R, n), split = circle_polygon(center, split_radius, n),
                inner = circle_polygon(inner_center, r, n);
  SuperadditivityResult res;
  res.whole = compute_modulus({outer, inner}, grid).value;
  res.part1 = compute_modulus({split, inner}, grid).value;
  res.part2 = compute_modulus({outer, split}, grid).value;
  res.holds = res.whole >= res.part1 + res.part2 - tolerance * res.whole;
  return res;
}

}  // namespace rbl
