#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rbl/cache.hpp"
#include "rbl/error.hpp"
#include "rbl/extremal.hpp"
#include "rbl/geometry.hpp"
#include "rbl/modulus.hpp"
#include "rbl/quad_dynamics.hpp"
#include "rbl/svg.hpp"

namespace rbl {

inline double main_bound(int s, int d_star) {
  require(s >= 2, ErrorKind::domain, "main bound needs s >= 2");
  require(d_star >= 1, ErrorKind::domain, "main bound needs d* >= 1");
  return d_star * std::numbers::pi / std::log(4.0 * (s + 1));
}

inline long long max_pl_degree(int d, bool polynomial) {
  require(d >= 2 && d <= 31, ErrorKind::domain, "degree must lie in 2..31");
  return polynomial ? 1LL << (d - 1) : 1LL << (2 * d - 2);
}

inline double pc1_bound(int s, int d_star) { return d_star * main_bound(s, d_star); }

/// alpha, one critical representative per small Julia set at alpha, and w.
struct SatelliteMarking {
  SpherePoint alpha;
  std::vector<Point> reps;
  Point w;

  MarkedPointSet as_point_set() const { return {alpha, reps, w}; }
  int s() const { return static_cast<int>(reps.size()); }
};

struct BoundReport {
  std::string case_id;
  int p = 0, q = 0;
  int s = 0;
  int d_star = 0;
  ModulusEstimate measured;
  double bound = 0;
  double margin = 0;
  bool passed = false;
  int grid = 0;
  double eps_fat = 0;
  std::string note;
  std::string error;
};

inline const char* kLowerBiasedNote =
    "measured on a constructed annulus with a fattened obstacle; the estimate is lower-biased, so a violation "
    "indicates a pipeline bug and a pass is a consistency check";

inline void finish(BoundReport& r) {
  r.margin = r.bound - r.measured.value;
  r.passed = r.error.empty() && r.measured.value < r.bound;
}

/// The widest round annulus, in the chart with alpha at infinity, whose outer side
/// holds z_k and whose inner disk holds the other finite points.
struct RoundProbe {
  Point center;
  double r = 0, R = 0;
  double modulus = 0;
};

inline RoundProbe round_probe(const std::vector<Point>& pts, std::size_t k) {
  require(k < pts.size() && pts.size() >= 2, ErrorKind::domain, "probe index out of range");
  auto ratio = [&](Point c) {
    double r = 0;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != k) r = std::max(r, std::abs(pts[j] - c));
    return std::abs(pts[k] - c) / r;
  };
  const Box b = bounding_box(pts);
  const double span = std::max(b.width(), b.height());
  Point best = 0.5 * Point(b.xmin + b.xmax, b.ymin + b.ymax);
  double bv = ratio(best);
  const int n = 48;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Point c(b.xmin - span + 3 * span * i / n, b.ymin - span + 3 * span * j / n);
      const double v = ratio(c);
      if (v > bv) bv = v, best = c;
    }
  for (double step = span / n; step > 1e-12 * span; step *= 0.5) {
    bool moved = true;
    for (int it = 0; moved && it < 64; ++it) {
      moved = false;
      for (Point d : {Point(1, 0), Point(-1, 0), Point(0, 1), Point(0, -1)}) {
        const double v = ratio(best + step * d);
        if (v > bv) bv = v, best += step * d, moved = true;
      }
    }
  }
  RoundProbe p{best, 0, 0, 0};
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (j != k) p.r = std::max(p.r, std::abs(pts[j] - best));
  p.R = std::abs(pts[k] - best);
  p.modulus = p.R > p.r ? std::log(p.R / p.r) / (2 * std::numbers::pi) : 0;
  return p;
}

/// Round-probe check of the static bound: z_k = select_pair(P, w) and the widest
/// round annulus separating {alpha, z_k} from the rest, evaluated in closed form.
inline BoundReport verify_static_round(const MarkedPointSet& P, Point w) {
  const Point zk = select_pair(P, w);
  const std::vector<Point> orig = P.finite_points();
  const std::vector<Point> norm = normalize_alpha_to_infinity(P).finite_points();
  const std::size_t k = static_cast<std::size_t>(std::find(orig.begin(), orig.end(), zk) - orig.begin());
  const RoundProbe probe = round_probe(norm, k);
  BoundReport r;
  r.case_id = "static-round";
  r.s = static_cast<int>(orig.size()) - 1;
  r.d_star = 1;
  r.bound = static_bound(static_cast<long long>(orig.size())).value();
  r.measured.value = probe.modulus;
  r.note = "closed-form modulus of the widest round probe";
  finish(r);
  return r;
}

/// Computes mod(annulus) and compares with pi/ln(4t), t = number of finite marked
/// points. The annulus must separate alpha and exactly one marked point from the others.
inline BoundReport verify_static(const SatelliteMarking& M, const AnnularDomain& annulus, int grid = 512) {
  MarkedPointSet P = M.as_point_set();
  std::vector<Point> pts = P.finite_points();
  require(pts.size() >= 3, ErrorKind::domain, "static bound needs t >= 3");
  require_distinct(pts);
  auto side = [&](Point z) {
    // 0: obstacle side, 1: outside the outer boundary, -1: inside the annulus.
    if (!point_in_polygon(z, annulus.outer)) return 1;
    if (annulus.has_cloud()) {
      for (const auto& c : annulus.inner_cloud().points)
        if (std::abs(c - z) <= annulus.inner_cloud().fat) return 0;
      return -1;
    }
    const Polygon& ip = annulus.inner_polygon();
    if (ip.size() >= 3 && point_in_polygon(z, ip)) return 0;
    return -1;
  };
  const int alpha_side = P.alpha.infinite ? 1 : side(P.alpha.z);
  require(alpha_side >= 0, ErrorKind::topology, "alpha lies in the annulus");
  int with_alpha = 0;
  for (const auto& z : pts) {
    const int sd = side(z);
    require(sd >= 0, ErrorKind::topology, "a marked point lies in the annulus");
    with_alpha += sd == alpha_side;
  }
  require(with_alpha == 1, ErrorKind::topology,
          "annulus must separate alpha and one marked point from the others (found " + std::to_string(with_alpha) +
              " with alpha)");
  BoundReport r;
  r.case_id = "static";
  r.s = M.s();
  r.d_star = 1;
  r.grid = grid;
  r.bound = static_bound(static_cast<long long>(pts.size())).value();
  r.measured = compute_modulus(annulus, grid);
  r.note = annulus.has_cloud() ? kLowerBiasedNote : "";
  finish(r);
  return r;
}

struct MainOptions {
  int grid = 1024;
  /// 0 selects twice the grid cell, grown when the sampled cloud is not connected.
  double eps_fat = 0;
  bool refine = true;
};

/// mod(U \ K*) against d*·pi/ln(4(s+1)) with s = q.
inline BoundReport verify_main(PLRestriction restriction, const MainOptions& opt = {}) {
  BoundReport r;
  r.p = restriction.rot.p();
  r.q = restriction.rot.q();
  r.case_id = "satellite " + restriction.rot.str();
  r.s = r.q;
  r.d_star = restriction.d_star;
  r.grid = opt.grid;
  r.bound = main_bound(r.s, r.d_star);
  r.note = kLowerBiasedNote;
  const AnnularDomain probe{restriction.U, PointCloud{{0}, 1}};
  const double h = grid_cell_size(probe, opt.grid);
  double fat = opt.eps_fat > 0 ? opt.eps_fat : 2 * h * (1 + 1e-9);
  ModulusOptions mo;
  mo.refine = opt.refine;
  for (int attempt = 0;; ++attempt) {
    restriction.K_samples = resample_small_julia(restriction, fat);
    restriction.sample_cell = fat / 2;
    try {
      r.measured = compute_modulus(root_annulus(restriction, fat), opt.grid, mo);
      break;
    } catch (const Error& e) {
      const bool disconnected = std::string(e.what()).find("not connected") != std::string::npos;
      if (!disconnected || opt.eps_fat > 0 || attempt >= 4) throw;
      fat *= 1.5;
    }
  }
  r.eps_fat = fat;
  finish(r);
  return r;
}

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json refs = nlohmann::json::array();
  for (const auto& x : r.measured.refinements)
    refs.push_back({{"grid", x.grid}, {"h", x.h}, {"value", x.value}, {"residual", x.residual},
                    {"iterations", x.iterations}});
  return {{"case_id", r.case_id}, {"p", r.p}, {"q", r.q}, {"s", r.s}, {"d_star", r.d_star},
          {"measured", r.measured.value}, {"grid_h", r.measured.grid_h}, {"residual", r.measured.residual},
          {"lower_biased", r.measured.lower_biased}, {"refinements", refs}, {"bound", r.bound},
          {"margin", r.margin}, {"passed", r.passed}, {"grid", r.grid}, {"eps_fat", r.eps_fat},
          {"note", r.note}, {"error", r.error}};
}

inline BoundReport bound_report_from_json(const nlohmann::json& j) {
  BoundReport r;
  r.case_id = j.at("case_id");
  r.p = j.at("p");
  r.q = j.at("q");
  r.s = j.at("s");
  r.d_star = j.at("d_star");
  r.measured.value = j.at("measured");
  r.measured.grid_h = j.at("grid_h");
  r.measured.residual = j.at("residual");
  r.measured.lower_biased = j.at("lower_biased");
  for (const auto& x : j.at("refinements"))
    r.measured.refinements.push_back({x.at("grid"), x.at("h"), x.at("value"), x.at("residual"), x.at("iterations")});
  r.bound = j.at("bound");
  r.margin = j.at("margin");
  r.passed = j.at("passed");
  r.grid = j.at("grid");
  r.eps_fat = j.at("eps_fat");
  r.note = j.at("note");
  r.error = j.at("error");
  return r;
}

struct SweepOptions {
  int num = 1;
  int den_from = 2, den_to = 8;
  MainOptions main;
  int jobs = 1;
  std::optional<Cache> cache;
};

struct SweepResult {
  std::vector<BoundReport> reports;
  std::vector<std::string> skipped;
  bool bounds_decreasing = true;
  int cache_hits = 0;
};

inline nlohmann::json sweep_cache_inputs(Point c, const RotationNumber& rot, const MainOptions& m) {
  return {{"kind", "verify_main"}, {"version", 3},    {"c_re", c.real()},   {"c_im", c.imag()},
          {"p", rot.p()},          {"q", rot.q()},    {"grid", m.grid},     {"eps_fat", m.eps_fat},
          {"refine", m.refine}};
}

/// verify_main over p/q for q in [den_from, den_to]; cases run on `jobs` threads and
/// come back sorted by q. Failures are recorded and the sweep continues.
inline SweepResult sweep_satellites(const SweepOptions& opt) {
  SweepResult res;
  std::vector<RotationNumber> rots;
  for (int q = opt.den_from; q <= opt.den_to; ++q) {
    if (opt.num <= 0 || opt.num >= q || std::gcd(opt.num, q) != 1) {
      res.skipped.push_back(std::to_string(opt.num) + "/" + std::to_string(q));
      std::cerr << "sweep: skipping " << opt.num << "/" << q << " (not a reduced fraction in (0,1))\n";
      continue;
    }
    rots.emplace_back(opt.num, q);
  }
  res.reports.resize(rots.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> hits{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < rots.size();) {
      const RotationNumber rot = rots[k];
      BoundReport r;
      r.p = rot.p();
      r.q = rot.q();
      r.s = rot.q();
      r.case_id = "satellite " + rot.str();
      r.grid = opt.main.grid;
      try {
        const Point c = satellite_center(rot);
        const std::string key = Cache::key_of(sweep_cache_inputs(c, rot, opt.main));
        std::optional<nlohmann::json> hit;
        if (opt.cache) hit = opt.cache->lookup(key);
        if (hit) {
          r = bound_report_from_json(*hit);
          ++hits;
        } else {
          r = verify_main(build_pl_restriction(rot), opt.main);
          if (opt.cache) opt.cache->store(key, to_json(r));
        }
      } catch (const Error& e) {
        r.error = e.what();
        r.bound = main_bound(r.s, 2);
        r.d_star = 2;
        finish(r);
      }
      res.reports[k] = std::move(r);
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(rots.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  res.cache_hits = hits;
  for (std::size_t k = 1; k < res.reports.size(); ++k)
    res.bounds_decreasing = res.bounds_decreasing && res.reports[k].bound < res.reports[k - 1].bound;
  return res;
}

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string sweep_csv(const std::vector<BoundReport>& reports) {
  std::string s = "p,q,s,d_star,measured,bound,margin,passed,grid\n";
  for (const auto& r : reports)
    s += std::to_string(r.p) + "," + std::to_string(r.q) + "," + std::to_string(r.s) + "," +
         std::to_string(r.d_star) + "," + fmt12(r.measured.value) + "," + fmt12(r.bound) + "," + fmt12(r.margin) +
         "," + (r.passed ? "true" : "false") + "," + std::to_string(r.grid) + "\n";
  return s;
}

inline std::vector<Series> sweep_series(const std::vector<BoundReport>& reports) {
  Series m{"measured", {}, {}}, b{"bound", {}, {}};
  for (const auto& r : reports) {
    m.x.push_back(r.q), m.y.push_back(r.measured.value);
    b.x.push_back(r.q), b.y.push_back(r.bound);
  }
  return {m, b};
}

}  // namespace rbl
