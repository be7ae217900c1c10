#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "rbl/error.hpp"
#include "rbl/specfun.hpp"

namespace rbl {

/// d*·π/ln(4(s+1)); s is real so that huge s can be probed.
inline double main_bound_real(double s, double d_star) {
  require(s >= 2 && d_star >= 1, ErrorKind::domain, "main bound needs s >= 2 and d* >= 1");
  return d_star * std::numbers::pi / std::log(4 * (s + 1));
}

inline double pc1_bound_real(double s, double d_star) { return d_star * main_bound_real(s, d_star); }

struct ModulusInterval {
  double lo = 0, hi = 0;
};

/// Range of moduli of the widest annulus homotopic to a geodesic of the given length.
inline ModulusInterval annulus_modulus_interval(double length) {
  require(length > 0 && std::isfinite(length), ErrorKind::domain, "length must be positive");
  ModulusInterval r{psi_inv(length).value(), std::numbers::pi / length};
  require(r.lo <= r.hi, ErrorKind::domain, "modulus interval is inverted");
  return r;
}

struct LengthBound {
  double s = 0;
  int d_star = 0;
  double modulus_bound = 0;
  double length_lower = 0;
};

inline LengthBound length_lower_bound(double s, int d_star) {
  const double m = pc1_bound_real(s, d_star);
  return {s, d_star, m, psi(ModulusValue(m))};
}

struct AsymptoticRow {
  double s = 0;
  int d_star = 0;
  double modulus_bound = 0;
  double length_lower = 0;
  double ratio_to_lnln = 0;
};

struct AsymptoticTable {
  std::vector<AsymptoticRow> rows;
  bool ratios_in_window = false;
  bool eventually_monotone = false;
};

/// length_lower / ln ln s along an increasing grid of s in [16, 1e12].
inline AsymptoticTable asymptotic_check(const std::vector<double>& s_grid, int d_star = 2, double lo = 1.0,
                                        double hi = 3.0) {
  AsymptoticTable t;
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    const double s = s_grid[k];
    require(s >= 16 && s <= 1e12, ErrorKind::domain, "grid entries must lie in [16, 1e12]");
    require(k == 0 || s > s_grid[k - 1], ErrorKind::domain, "grid must be increasing");
    const LengthBound b = length_lower_bound(s, d_star);
    t.rows.push_back({s, d_star, b.modulus_bound, b.length_lower, b.length_lower / std::log(std::log(s))});
  }
  t.ratios_in_window = !t.rows.empty();
  for (const auto& r : t.rows) t.ratios_in_window = t.ratios_in_window && r.ratio_to_lnln >= lo && r.ratio_to_lnln <= hi;
  // Monotone from the first entry with s >= 1e3 onwards.
  t.eventually_monotone = true;
  int dir = 0;
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    if (t.rows[k - 1].s < 1e3) continue;
    const double d = t.rows[k].ratio_to_lnln - t.rows[k - 1].ratio_to_lnln;
    const int sg = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (dir == 0) dir = sg;
    if (sg != dir) t.eventually_monotone = false;
  }
  return t;
}

}  // namespace rbl
