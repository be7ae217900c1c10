#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "rbl/error.hpp"
#include "rbl/geometry.hpp"

namespace rbl::detail {

struct GridFrame {
  double x0 = 0, y0 = 0, h = 1;
  int nx = 0, ny = 0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Point node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
};

constexpr int kGridMargin = 3;

/// Uniform frame over a box, `cells` intervals along the longer side plus a margin ring.
inline GridFrame make_frame(const Box& box, int cells) {
  require(cells >= 8, ErrorKind::domain, "grid resolution too small");
  GridFrame f;
  const double ext = std::max(box.width(), box.height());
  require(ext > 0, ErrorKind::domain, "outer boundary has empty extent");
  f.h = ext / cells;
  auto axis = [&](double lo, double w, double& origin, int& n) {
    int inner = static_cast<int>(std::ceil(w / f.h - 1e-9));
    n = inner + 1 + 2 * kGridMargin;
    origin = lo - 0.5 * (inner * f.h - w) - kGridMargin * f.h;
  };
  axis(box.xmin, box.width(), f.x0, f.nx);
  axis(box.ymin, box.height(), f.y0, f.ny);
  return f;
}

/// Boundary piece carrying a Dirichlet value (0 inner, 1 outer).
struct Segment {
  Point a, b;
  std::uint8_t value;
};

struct Hit {
  double t;
  std::uint8_t value;
};

/// Spatial index of boundary data over the cells of a frame.
class BoundaryIndex {
 public:
  BoundaryIndex(const GridFrame& f, std::vector<Segment> segs, std::vector<Point> cloud, double fat)
      : f_(f), segs_(std::move(segs)), cloud_(std::move(cloud)), fat_(fat) {
    const int cx = f_.nx, cy = f_.ny;
    seg_start_.assign(static_cast<std::size_t>(cx) * cy + 1, 0);
    auto cell_range = [&](double lo, double hi, double origin, int n, int& a, int& b) {
      a = std::clamp(static_cast<int>(std::floor((lo - origin) / f_.h)) - 1, 0, n - 1);
      b = std::clamp(static_cast<int>(std::floor((hi - origin) / f_.h)) + 1, 0, n - 1);
    };
    auto for_cells = [&](const Segment& s, auto&& fn) {
      int i0, i1, j0, j1;
      cell_range(std::min(s.a.real(), s.b.real()), std::max(s.a.real(), s.b.real()), f_.x0, cx, i0, i1);
      cell_range(std::min(s.a.imag(), s.b.imag()), std::max(s.a.imag(), s.b.imag()), f_.y0, cy, j0, j1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) fn(f_.index(i, j));
    };
    for (const auto& s : segs_) for_cells(s, [&](std::size_t c) { ++seg_start_[c + 1]; });
    std::partial_sum(seg_start_.begin(), seg_start_.end(), seg_start_.begin());
    seg_items_.resize(seg_start_.back());
    std::vector<std::size_t> fill(seg_start_.begin(), seg_start_.end() - 1);
    for (std::uint32_t k = 0; k < segs_.size(); ++k)
      for_cells(segs_[k], [&](std::size_t c) { seg_items_[fill[c]++] = k; });

    if (!cloud_.empty()) {
      ccell_ = std::max(f_.h, fat_);
      cnx_ = static_cast<int>(std::ceil((f_.nx - 1) * f_.h / ccell_)) + 1;
      cny_ = static_cast<int>(std::ceil((f_.ny - 1) * f_.h / ccell_)) + 1;
      cloud_start_.assign(static_cast<std::size_t>(cnx_) * cny_ + 1, 0);
      for (const auto& p : cloud_) ++cloud_start_[cloud_cell(p) + 1];
      std::partial_sum(cloud_start_.begin(), cloud_start_.end(), cloud_start_.begin());
      cloud_items_.resize(cloud_.size());
      std::vector<std::size_t> cf(cloud_start_.begin(), cloud_start_.end() - 1);
      for (std::uint32_t k = 0; k < cloud_.size(); ++k) cloud_items_[cf[cloud_cell(cloud_[k])]++] = k;
    }
  }

  const std::vector<Segment>& segments() const { return segs_; }
  const std::vector<Point>& cloud() const { return cloud_; }
  double fat() const { return fat_; }

  /// All boundary crossings of the grid edge from node (i,j) to (i+di,j+dj), dj in {0,1}.
  template <class Fn>
  void edge_hits(int i, int j, int di, int dj, Fn&& on_hit) const {
    const Point P = f_.node(i, j), Q = f_.node(i + di, j + dj);
    const Point r = Q - P;
    auto test_seg = [&](const Segment& s) {
      const Point sv = s.b - s.a;
      const double denom = cross(r, sv);
      const Point ap = s.a - P;
      const double scale = std::abs(r) * std::abs(sv);
      if (std::abs(denom) > 1e-12 * scale) {
        double t = cross(ap, sv) / denom;
        double u = cross(ap, r) / denom;
        constexpr double tol = 1e-12;
        if (t >= -tol && t <= 1 + tol && u >= -tol && u <= 1 + tol) on_hit(Hit{std::clamp(t, 0.0, 1.0), s.value});
      } else if (std::abs(cross(ap, r)) <= 1e-12 * std::abs(r) * (std::abs(ap) + f_.h)) {
        const double rr = std::norm(r);
        double ta = (ap * std::conj(r)).real() / rr;
        double tb = ((s.b - P) * std::conj(r)).real() / rr;
        double lo = std::max(0.0, std::min(ta, tb)), hi = std::min(1.0, std::max(ta, tb));
        if (lo <= hi) {
          on_hit(Hit{lo, s.value});
          on_hit(Hit{hi, s.value});
        }
      }
    };
    // cells touching this grid edge
    int ci0 = std::min(i, i + di), ci1 = std::max(i, i + di) - 1;
    int cj0 = j, cj1 = j + dj - 1;
    if (dj == 0) cj0 = j - 1, cj1 = j;
    if (di == 0) ci0 = i - 1, ci1 = i;
    for (int cj = cj0; cj <= cj1; ++cj)
      for (int ci = ci0; ci <= ci1; ++ci) {
        if (ci < 0 || cj < 0 || ci >= f_.nx || cj >= f_.ny) continue;
        const std::size_t c = f_.index(ci, cj);
        for (std::size_t k = seg_start_[c]; k < seg_start_[c + 1]; ++k) test_seg(segs_[seg_items_[k]]);
      }
    if (cloud_.empty()) return;
    const double r2 = fat_ * fat_;
    const double a = std::norm(r);
    visit_cloud(P, Q, [&](const Point& c) {
      const Point pc = P - c;
      const double b = 2 * (pc * std::conj(r)).real();
      const double cc = std::norm(pc) - r2;
      const double disc = b * b - 4 * a * cc;
      if (disc < 0) return;
      const double sq = std::sqrt(disc);
      const double t1 = (-b - sq) / (2 * a), t2 = (-b + sq) / (2 * a);
      if (t1 >= 0 && t1 <= 1) on_hit(Hit{t1, 0});
      if (t2 >= 0 && t2 <= 1) on_hit(Hit{t2, 0});
    });
  }

  template <class Fn>
  void visit_cloud(Point P, Point Q, Fn&& fn) const {
    const double pad = fat_;
    int i0 = cloud_coord(std::min(P.real(), Q.real()) - pad, f_.x0, cnx_);
    int i1 = cloud_coord(std::max(P.real(), Q.real()) + pad, f_.x0, cnx_);
    int j0 = cloud_coord(std::min(P.imag(), Q.imag()) - pad, f_.y0, cny_);
    int j1 = cloud_coord(std::max(P.imag(), Q.imag()) + pad, f_.y0, cny_);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const std::size_t c = static_cast<std::size_t>(j) * cnx_ + i;
        for (std::size_t k = cloud_start_[c]; k < cloud_start_[c + 1]; ++k) fn(cloud_[cloud_items_[k]]);
      }
  }

 private:
  int cloud_coord(double v, double origin, int n) const {
    return std::clamp(static_cast<int>(std::floor((v - origin) / ccell_)), 0, n - 1);
  }
  std::size_t cloud_cell(Point p) const {
    return static_cast<std::size_t>(cloud_coord(p.imag(), f_.y0, cny_)) * cnx_ + cloud_coord(p.real(), f_.x0, cnx_);
  }

  GridFrame f_;
  std::vector<Segment> segs_;
  std::vector<std::size_t> seg_start_;
  std::vector<std::uint32_t> seg_items_;
  std::vector<Point> cloud_;
  double fat_ = 0;
  double ccell_ = 1;
  int cnx_ = 0, cny_ = 0;
  std::vector<std::size_t> cloud_start_;
  std::vector<std::uint32_t> cloud_items_;
};

/// One level of the structured operator: a weighted 9-point graph Laplacian on a mask.
/// Edge weights are stored once per undirected edge at its lower endpoint:
/// we (i,j)-(i+1,j), wn (i,j)-(i,j+1), wne (i,j)-(i+1,j+1), wnw (i,j)-(i-1,j+1).
struct Level {
  int nx = 0, ny = 0;
  std::vector<std::uint8_t> free;
  std::vector<double> diag, we, wn, wne, wnw;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

  void allocate(int x, int y) {
    nx = x;
    ny = y;
    const std::size_t n = size();
    free.assign(n, 0);
    diag.assign(n, 0.0);
    we.assign(n, 0.0);
    wn.assign(n, 0.0);
    wne.assign(n, 0.0);
    wnw.assign(n, 0.0);
  }

  double offdiag(const std::size_t k, const std::vector<double>& x) const {
    const std::size_t s = k - nx;
    return we[k] * x[k + 1] + we[k - 1] * x[k - 1] + wn[k] * x[k + nx] + wn[s] * x[s] +
           wne[k] * x[k + nx + 1] + wne[s - 1] * x[s - 1] + wnw[k] * x[k + nx - 1] + wnw[s + 1] * x[s + 1];
  }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx;
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t k = row + i;
        if (free[k]) y[k] = diag[k] * x[k] - offdiag(k, x);
      }
    }
  }

  void relax(const std::size_t k, const std::vector<double>& b, std::vector<double>& x) const {
    x[k] = (b[k] + offdiag(k, x)) / diag[k];
  }

  void smooth_forward(const std::vector<double>& b, std::vector<double>& x) const {
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx;
      for (int i = 1; i < nx - 1; ++i)
        if (free[row + i]) relax(row + i, b, x);
    }
  }

  void smooth_backward(const std::vector<double>& b, std::vector<double>& x) const {
    for (int j = ny - 2; j >= 1; --j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx;
      for (int i = nx - 2; i >= 1; --i)
        if (free[row + i]) relax(row + i, b, x);
    }
  }
};

/// Aggregation multigrid (2x2 aggregates, Galerkin coarse operators) used as a
/// symmetric preconditioner for conjugate gradients.
class AggregationMultigrid {
 public:
  explicit AggregationMultigrid(Level fine, double coarse_scale = 1.6, int sweeps = 1)
      : scale_(coarse_scale), sweeps_(sweeps) {
    levels_.push_back(std::move(fine));
    while (true) {
      const Level& l = levels_.back();
      std::size_t nfree = std::count(l.free.begin(), l.free.end(), 1);
      if (nfree <= 900 || l.nx <= 6 || l.ny <= 6) break;
      levels_.push_back(coarsen(l));
    }
    factor_coarsest();
    work_.resize(levels_.size());
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      const std::size_t n = levels_[k].size();
      work_[k].b.assign(n, 0.0);
      work_[k].x.assign(n, 0.0);
      work_[k].r.assign(n, 0.0);
    }
  }

  const Level& fine() const { return levels_.front(); }
  std::size_t depth() const { return levels_.size(); }

  void precondition(const std::vector<double>& r, std::vector<double>& z) {
    work_[0].b = r;
    cycle(0);
    z = work_[0].x;
  }

 private:
  struct Work {
    std::vector<double> b, x, r;
  };

  static int cmap(int i) { return (i + 1) / 2; }

  static Level coarsen(const Level& f) {
    Level c;
    c.allocate((f.nx - 1) / 2 + 2, (f.ny - 1) / 2 + 2);
    auto add_edge = [&](std::size_t K, int ci, int cj, int i2, int j2, double w) {
      int di = cmap(i2) - ci, dj = cmap(j2) - cj;
      if (di == 0 && dj == 0) {
        c.diag[K] -= 2 * w;
        return;
      }
      // store at the lower endpoint of the undirected coarse edge
      if (dj < 0 || (dj == 0 && di < 0)) {
        K = static_cast<std::size_t>(cj + dj) * c.nx + (ci + di);
        di = -di;
        dj = -dj;
      }
      if (dj == 0) c.we[K] += w;
      else if (di == 0) c.wn[K] += w;
      else if (di == 1) c.wne[K] += w;
      else c.wnw[K] += w;
    };
    for (int j = 1; j < f.ny - 1; ++j)
      for (int i = 1; i < f.nx - 1; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * f.nx + i;
        if (!f.free[k]) continue;
        const int ci = cmap(i), cj = cmap(j);
        const std::size_t K = static_cast<std::size_t>(cj) * c.nx + ci;
        c.free[K] = 1;
        c.diag[K] += f.diag[k];
        if (f.we[k] != 0) add_edge(K, ci, cj, i + 1, j, f.we[k]);
        if (f.wn[k] != 0) add_edge(K, ci, cj, i, j + 1, f.wn[k]);
        if (f.wne[k] != 0) add_edge(K, ci, cj, i + 1, j + 1, f.wne[k]);
        if (f.wnw[k] != 0) add_edge(K, ci, cj, i - 1, j + 1, f.wnw[k]);
      }
    return c;
  }

  void factor_coarsest() {
    const Level& l = levels_.back();
    coarse_index_.assign(l.size(), -1);
    int n = 0;
    for (std::size_t k = 0; k < l.size(); ++k)
      if (l.free[k]) coarse_index_[k] = n++;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (!l.free[k]) continue;
      const int a = coarse_index_[k];
      A(a, a) = l.diag[k];
      if (l.we[k] != 0) {
        const int b = coarse_index_[k + 1];
        A(a, b) = A(b, a) = -l.we[k];
      }
      auto couple = [&](double w, std::size_t m) {
        if (w == 0) return;
        const int b = coarse_index_[m];
        A(a, b) = A(b, a) = -w;
      };
      couple(l.wn[k], k + l.nx);
      couple(l.wne[k], k + l.nx + 1);
      couple(l.wnw[k], k + l.nx - 1);
    }
    coarse_solver_.compute(A);
    require(coarse_solver_.info() == Eigen::Success, ErrorKind::convergence, "coarse operator not positive definite");
    coarse_rhs_.resize(n);
  }

  void cycle(std::size_t k) {
    const Level& l = levels_[k];
    Work& w = work_[k];
    if (k + 1 == levels_.size()) {
      for (std::size_t i = 0; i < l.size(); ++i)
        if (coarse_index_[i] >= 0) coarse_rhs_[coarse_index_[i]] = w.b[i];
      Eigen::VectorXd sol = coarse_solver_.solve(coarse_rhs_);
      for (std::size_t i = 0; i < l.size(); ++i) w.x[i] = coarse_index_[i] >= 0 ? sol[coarse_index_[i]] : 0.0;
      return;
    }
    std::fill(w.x.begin(), w.x.end(), 0.0);
    for (int s = 0; s < sweeps_; ++s) l.smooth_forward(w.b, w.x);
    l.apply(w.x, w.r);
    for (std::size_t i = 0; i < l.size(); ++i) w.r[i] = w.b[i] - w.r[i];
    const Level& c = levels_[k + 1];
    Work& cw = work_[k + 1];
    std::fill(cw.b.begin(), cw.b.end(), 0.0);
    for (int j = 1; j < l.ny - 1; ++j)
      for (int i = 1; i < l.nx - 1; ++i) {
        const std::size_t f = static_cast<std::size_t>(j) * l.nx + i;
        if (l.free[f]) cw.b[static_cast<std::size_t>(cmap(j)) * c.nx + cmap(i)] += w.r[f];
      }
    cycle(k + 1);
    for (int j = 1; j < l.ny - 1; ++j)
      for (int i = 1; i < l.nx - 1; ++i) {
        const std::size_t f = static_cast<std::size_t>(j) * l.nx + i;
        if (l.free[f]) w.x[f] += scale_ * cw.x[static_cast<std::size_t>(cmap(j)) * c.nx + cmap(i)];
      }
    for (int s = 0; s < sweeps_; ++s) l.smooth_backward(w.b, w.x);
  }

  std::vector<Level> levels_;
  std::vector<Work> work_;
  std::vector<int> coarse_index_;
  Eigen::LLT<Eigen::MatrixXd> coarse_solver_;
  Eigen::VectorXd coarse_rhs_;
  double scale_;
  int sweeps_;
};

struct SolveResult {
  std::vector<double> u;
  double residual = 0;
  int iterations = 0;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Preconditioned CG on the fine level of `mg`; tolerance on ||b - A u|| / ||b||.
inline SolveResult pcg(AggregationMultigrid& mg, const std::vector<double>& b, double tol, int max_iter) {
  const Level& A = mg.fine();
  const std::size_t n = A.size();
  SolveResult res;
  res.u.assign(n, 0.0);
  std::vector<double> r = b, z(n), p(n), q(n);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0) return res;
  mg.precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A.apply(p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      res.u[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    res.iterations = it;
    if (std::sqrt(dot(r, r)) < 0.25 * tol * bnorm) {
      A.apply(res.u, q);
      for (std::size_t i = 0; i < n; ++i) q[i] = b[i] - q[i];
      res.residual = std::sqrt(dot(q, q)) / bnorm;
      if (res.residual < tol) return res;
      r = q;
    }
    mg.precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  A.apply(res.u, q);
  for (std::size_t i = 0; i < n; ++i) q[i] = b[i] - q[i];
  res.residual = std::sqrt(dot(q, q)) / bnorm;
  if (res.residual >= tol) fail(ErrorKind::convergence, "conjugate gradients did not reach the residual target");
  return res;
}

}  // namespace rbl::detail
