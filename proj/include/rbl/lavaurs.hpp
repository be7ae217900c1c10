#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rbl/error.hpp"

namespace rbl {

/// Real quadratic f_a(x) = x^2 + a at a = -7/4 with its parabolic 3-cycle, the
/// Fatou coordinates of F = f^3 at the cycle point x0 next to 0, and Lavaurs maps.
struct LavaursModel {
  double a = -1.75;
  double x0 = 0;
  /// F(x0 + h) - x0 = h + A h^2 + B h^3 + ...; jet[k] is the h^k coefficient.
  std::array<double, 9> jet{};
  double A = 0, B = 0;
  double c1 = 0, c_m1 = 0, c_m2 = 0;
  double F0 = 0;
  double X_cal = 0;
  double multiplier = 0;
  double system_residual = 0;
  std::array<double, 3> cycle{};
  /// Asymptotic Fatou coordinate w - beta ln|w| + d1/w + d2/w^2 + d3/w^3, w = -1/(A h).
  double beta = 0, d1 = 0, d2 = 0, d3 = 0;
  double plus_shift = 0;
  double W = 1e3;

  double f(double x) const { return x * x + a; }
  double F(double x) const { return f(f(f(x))); }
  double step(double h) const {
    double s = 0;
    for (int k = 8; k >= 1; --k) s = s * h + jet[k];
    return s * h;
  }
  double step_derivative(double h) const {
    double s = 0;
    for (int k = 8; k >= 1; --k) s = s * h + k * jet[k];
    return s;
  }
  double psi(double h) const {
    const double w = -1 / (A * h);
    return w - beta * std::log(std::abs(w)) + d1 / w + d2 / (w * w) + d3 / (w * w * w);
  }

  /// Attracting coordinate on (x0, 0]; phi(F(z)) = phi(z) + 1.
  double fatou_minus(double z, double W_cut = 0) const {
    const double Wc = W_cut > 0 ? W_cut : W;
    require(z > x0 && z <= 1e-15, ErrorKind::domain, "fatou_minus needs x0 < z <= 0");
    double h = z - x0;
    long n = 0;
    while (-1 / (A * h) < Wc) {
      h = step(h);
      require(h > 0, ErrorKind::domain, "orbit left the attracting petal");
      require(++n <= 100000, ErrorKind::convergence, "attracting Fatou coordinate did not converge");
    }
    return psi(h) - static_cast<double>(n);
  }

  /// Increasing inverse branch of F on the repelling side, onto [c_{-2}, x0); the
  /// preimage of h < 0 lies in [max(h, c_{-2} - x0), 0). Safeguarded Newton.
  double inverse_step(double h) const {
    double lo = std::max(h, c_m2 - x0), hi = 0;
    if (step(lo) - h >= 0) return lo;
    double g = h - A * h * h;
    if (!(g > lo && g < hi)) g = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double v = step(g) - h;
      if (v < 0)
        lo = g;
      else
        hi = g;
      double next = g - v / step_derivative(g);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - g) <= 1e-17 * std::abs(g)) return next;
      g = next;
    }
    return g;
  }

  /// Repelling coordinate on [c1, x0), normalized by fatou_plus(c_m2) = X_cal.
  double fatou_plus(double z, double W_cut = 0) const {
    const double Wc = W_cut > 0 ? W_cut : W;
    require(z < x0 && z >= c1 - 1e-12, ErrorKind::domain, "fatou_plus needs c1 <= z < x0");
    double h = z - x0;
    long n = 0;
    while (-1 / (A * h) > -Wc) {
      h = inverse_step(h);
      require(h < 0, ErrorKind::domain, "backward orbit left the repelling petal");
      require(++n <= 100000, ErrorKind::convergence, "repelling Fatou coordinate did not converge");
    }
    return psi(h) + static_cast<double>(n) + plus_shift;
  }

  double fatou_plus_inv(double v) const {
    require(v <= X_cal + 1 + 1e-9, ErrorKind::domain, "fatou_plus_inv needs w <= X + 1");
    const double u = v - plus_shift;
    const long n = static_cast<long>(std::ceil(W + u)) + 1;
    const double t = u - static_cast<double>(n);
    double w = t;
    for (int it = 0; it < 60; ++it) {
      const double val = w - beta * std::log(std::abs(w)) + d1 / w + d2 / (w * w) + d3 / (w * w * w) - t;
      const double der = 1 - beta / w - d1 / (w * w) - 2 * d2 / (w * w * w) - 3 * d3 / (w * w * w * w);
      const double dw = val / der;
      w -= dw;
      if (std::abs(dw) <= 1e-15 * std::abs(w)) break;
    }
    double h = -1 / (A * w);
    for (long k = 0; k < n; ++k) h = step(h);
    return x0 + h;
  }

  /// g_sigma = phi_+^{-1}(phi_-(x) + sigma) on I_- = [F(0), 0].
  double g(double sigma, double x) const {
    require(sigma <= 0, ErrorKind::domain, "Lavaurs phase must be nonpositive");
    require(x >= F0 - 1e-15 && x <= 1e-15, ErrorKind::domain, "g_sigma is defined on [F(0), 0]");
    return fatou_plus_inv(fatou_minus(std::min(x, 0.0)) + sigma);
  }

  /// G_sigma = f^2 o g_sigma, extended evenly.
  double G(double sigma, double x) const {
    require(std::abs(x) <= -F0 + 1e-15, ErrorKind::domain, "G_sigma is defined on [F(0), -F(0)]");
    return f(f(g(sigma, -std::abs(x))));
  }
};

namespace detail {

inline double bisect(const std::function<double(double)>& fn, double lo, double hi, double tol, const char* what) {
  double flo = fn(lo), fhi = fn(hi);
  require((flo < 0) != (fhi < 0), ErrorKind::structure, std::string("no sign change for ") + what);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double m = 0.5 * (lo + hi);
    const double fm = fn(m);
    if ((fm < 0) == (flo < 0))
      lo = m, flo = fm;
    else
      hi = m;
  }
  return 0.5 * (lo + hi);
}

/// Coefficients of p(q(h)) for polynomials in h (ascending order), truncated at degree 8.
inline std::array<double, 9> compose_square_plus(const std::array<double, 9>& p, double a) {
  std::array<double, 9> r{};
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; i + j <= 8; ++j) r[i + j] += p[i] * p[j];
  r[0] += a;
  return r;
}

}  // namespace detail

/// a = -7/4 from {f_a^3(x) = x, (f_a^3)'(x) = 1}; the cycle, the jet of F at x0, the
/// marked points and the Fatou-coordinate calibration.
inline LavaursModel build_model() {
  LavaursModel m;
  // Newton on the parabolic system in (a, x).
  double a = -1.74, x = -0.05;
  for (int it = 0; it < 100; ++it) {
    double z = x, d = 1, e = 0, dd = 0, de = 0;
    for (int k = 0; k < 3; ++k) {
      const double nz = z * z + a, nd = 2 * z * d, ne = 2 * z * e + 1;
      const double ndd = 2 * d * d + 2 * z * dd, nde = 2 * e * d + 2 * z * de;
      z = nz, d = nd, e = ne, dd = ndd, de = nde;
    }
    const double P = z - x, Q = d - 1;
    const double J11 = e, J12 = d - 1, J21 = de, J22 = dd;
    const double det = J11 * J22 - J12 * J21;
    require(std::abs(det) > 0, ErrorKind::model, "singular parabolic system");
    const double da = (P * J22 - Q * J12) / det, dx = (J11 * Q - J21 * P) / det;
    a -= da, x -= dx;
    if (std::abs(da) + std::abs(dx) < 1e-16) break;
  }
  require(std::abs(a + 1.75) < 1e-9, ErrorKind::model, "parabolic parameter is not -7/4");
  m.a = -1.75;
  // x0 on the exact parameter: F'(x) = 1 near the solved point.
  for (int it = 0; it < 60; ++it) {
    double z = x, d = 1, dd = 0;
    for (int k = 0; k < 3; ++k) {
      const double nz = z * z + m.a, nd = 2 * z * d, ndd = 2 * d * d + 2 * z * dd;
      z = nz, d = nd, dd = ndd;
    }
    const double dx = (d - 1) / dd;
    x -= dx;
    if (std::abs(dx) < 1e-17) break;
  }
  m.x0 = x;
  m.cycle = {x, m.f(x), m.f(m.f(x))};
  std::array<double, 9> p{};
  p[0] = m.x0, p[1] = 1;
  for (int k = 0; k < 3; ++k) p = detail::compose_square_plus(p, m.a);
  m.multiplier = p[1];
  m.system_residual = std::max(std::abs(p[0] - m.x0), std::abs(p[1] - 1));
  require(m.system_residual < 1e-9, ErrorKind::model, "parabolic cycle residual too large");
  m.jet = p;
  m.jet[0] = 0;
  m.jet[1] = 1;
  m.A = m.jet[2], m.B = m.jet[3];
  require(m.A < 0, ErrorKind::model, "expected A < 0");
  const double a2 = m.jet[2], a3 = m.jet[3], a4 = m.jet[4], a5 = m.jet[5], a6 = m.jet[6];
  const double a22 = a2 * a2;
  m.beta = (a22 - a3) / a22;
  m.d1 = (a22 * a22 - a22 * a3 + 2 * a2 * a4 - 2 * a3 * a3) / (2 * a22 * a22);
  m.d2 = (4 * a22 * a22 * a22 - 7 * a22 * a22 * a3 + 6 * a22 * a2 * a4 - 3 * a22 * a3 * a3 - 6 * a22 * a5 +
          12 * a2 * a3 * a4 - 6 * a3 * a3 * a3) /
         (12 * a22 * a22 * a22);
  m.d3 = (13 * a22 * a22 * a22 * a22 - 32 * a22 * a22 * a22 * a3 + 24 * a22 * a22 * a2 * a4 +
          a22 * a22 * a3 * a3 - 18 * a22 * a22 * a5 + 18 * a22 * a2 * a3 * a4 + 12 * a22 * a2 * a6 -
          6 * a22 * a3 * a3 * a3 - 24 * a22 * a3 * a5 - 12 * a22 * a4 * a4 + 36 * a2 * a3 * a3 * a4 -
          12 * a3 * a3 * a3 * a3) /
         (36 * a22 * a22 * a22 * a22);
  m.c1 = m.a;
  m.c_m1 = -std::sqrt(-m.a);
  m.c_m2 = -std::sqrt(m.c_m1 - m.a);
  m.F0 = m.F(0);
  require(m.c1 < m.c_m1 && m.c_m1 < m.c_m2 && m.c_m2 < m.x0 && m.x0 < m.F0 && m.F0 < 0, ErrorKind::model,
          "marked points out of order");
  m.X_cal = m.fatou_minus(0);
  m.plus_shift = 0;
  m.plus_shift = m.X_cal - m.fatou_plus(m.c_m2);
  return m;
}

/// q_sigma in I_- with g_sigma(q_sigma) = c_{-1}, so G_sigma(q_sigma) = c_1.
inline double q_sigma(const LavaursModel& m, double sigma) {
  const double at_end = m.g(sigma, m.F0) - m.c_m1;
  if (at_end >= 0 && at_end < 1e-9) return m.F0;
  return detail::bisect([&](double x) { return m.g(sigma, x) - m.c_m1; }, m.F0, 0, 1e-15, "q_sigma");
}

/// Fixed point of G_sigma in (q_sigma, 0).
inline double beta_sigma(const LavaursModel& m, double sigma) {
  const double q = q_sigma(m, sigma);
  return detail::bisect([&](double x) { return m.G(sigma, x) - x; }, q, -1e-300, 1e-16, "beta_sigma");
}

inline double lavaurs_g(const LavaursModel& m, double sigma, double x) { return m.g(sigma, x); }

/// G_sigma on its domain [q_sigma, -q_sigma].
inline double big_G(const LavaursModel& m, double sigma, double x) {
  const double q = q_sigma(m, sigma);
  require(std::abs(x) <= -q * (1 + 1e-12), ErrorKind::domain, "G_sigma is defined on [q_sigma, -q_sigma]");
  return m.G(sigma, x);
}

inline double G_derivative(const LavaursModel& m, double sigma, double x) {
  const double h = 1e-6 * std::max(std::abs(x), 1e-6);
  return (m.G(sigma, x + h) - m.G(sigma, x - h)) / (2 * h);
}

struct SigmaParams {
  double sigma0 = 0;
  double sigma_ch = 0;
  double beta_ch = 0;
  double q_ch = 0;
  double beta_derivative_ch = 0;
};

/// sigma_0 with g(F(0)) = c_{-1}; sigma_Ch with G(0) = -beta_sigma, equivalently
/// G^2(0) = beta_sigma by evenness.
inline SigmaParams find_sigma_params(const LavaursModel& m) {
  SigmaParams s;
  s.sigma0 = detail::bisect([&](double sg) { return m.g(sg, m.F0) - m.c_m1; }, -1, 0, 1e-13, "sigma_0");
  s.sigma_ch = detail::bisect([&](double sg) { return m.G(sg, 0) + beta_sigma(m, sg); }, s.sigma0, -1e-9, 1e-13,
                              "sigma_Ch");
  s.beta_ch = beta_sigma(m, s.sigma_ch);
  s.q_ch = q_sigma(m, s.sigma_ch);
  s.beta_derivative_ch = G_derivative(m, s.sigma_ch, s.beta_ch);
  require(std::abs(s.beta_derivative_ch) > 1, ErrorKind::structure, "beta_sigma is not repelling at sigma_Ch");
  return s;
}

/// Fixed points and 2-cycles of G_sigma on [q_sigma, -q_sigma] located on a grid; each must be repelling.
inline bool no_attracting_cycles(const LavaursModel& m, double sigma, int samples = 2000) {
  const double q = q_sigma(m, sigma);
  auto check = [&](const std::function<double(double)>& fn, int period) {
    double prev_x = q, prev = fn(q);
    for (int k = 1; k <= samples; ++k) {
      const double x = q + (-2 * q) * k / samples;
      const double v = fn(x);
      if (std::isfinite(prev) && std::isfinite(v) && (prev < 0) != (v < 0)) {
        const double r = detail::bisect(fn, prev_x, x, 1e-15, "cycle");
        double d = 1, y = r;
        for (int j = 0; j < period; ++j) {
          d *= G_derivative(m, sigma, y);
          y = m.G(sigma, y);
        }
        if (std::abs(d) <= 1) return false;
      }
      prev_x = x, prev = v;
    }
    return true;
  };
  auto fix = [&](double x) { return m.G(sigma, x) - x; };
  auto two = [&](double x) {
    const double y = m.G(sigma, x);
    if (std::abs(y) > -q) return std::numeric_limits<double>::quiet_NaN();
    return m.G(sigma, y) - x;
  };
  return check(fix, 1) && check(two, 2);
}

struct ApproxResult {
  double a = 0;
  int q = 0;
  int N = 0;
  double deviation = 0;
  double beta = 0;
  double beta_multiplier = 0;
  double diam_L = 0;
  double diam_L_star = 0;
};

namespace detail {

inline double orbit(double a, double x, int n) {
  for (int k = 0; k < n; ++k) x = x * x + a;
  return x;
}

/// Running bound on the rounding error of orbit(a, x, n).
inline double orbit_rounding(double a, double x, int n) {
  const double u = std::numeric_limits<double>::epsilon();
  double e = 0;
  for (int k = 0; k < n; ++k) e = 2 * std::abs(x) * e + e * e + u * (x * x + std::abs(a)), x = x * x + a;
  return e;
}

/// Image of [lo, hi] under x^2 + a.
inline std::pair<double, double> square_image(double lo, double hi, double a) {
  const double l2 = lo * lo, h2 = hi * hi;
  if (lo <= 0 && hi >= 0) return {a, std::max(l2, h2) + a};
  return {std::min(l2, h2) + a, std::max(l2, h2) + a};
}

}  // namespace detail

/// Deviation sup |f_a^{3N}(x) - g_sigma(x)| over `grid` points of I_-.
inline double approximation_deviation(const std::vector<double>& xs,
                                      const std::vector<double>& target, double a, int N) {
  double dev = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) dev = std::max(dev, std::abs(detail::orbit(a, xs[k], 3 * N) - target[k]));
  return dev;
}

/// a_N in (-7/4, -7/4 + 1e-2) minimizing the deviation of f^{3N} from g_{sigma*} on
/// I_-, moved to the nearby root of f^{3N+2}(0) = G_{sigma*}(0); then the periodic
/// interval L_N = [beta_N, -beta_N] of period q_N = 3N + 2.
inline ApproxResult approximate_parameter(const LavaursModel& m, const SigmaParams& sp, double sigma_star, int N,
                                          double max_deviation = 0.05) {
  require(N >= 10, ErrorKind::domain, "N must be at least 10");
  require(sigma_star > sp.sigma_ch && sigma_star < 0, ErrorKind::domain, "sigma* must lie in (sigma_Ch, 0)");
  require(no_attracting_cycles(m, sigma_star), ErrorKind::structure, "G_sigma* has a non-repelling cycle");
  const int grid = 50;
  std::vector<double> xs(grid), target(grid);
  for (int k = 0; k < grid; ++k) {
    xs[k] = m.F0 + (0 - m.F0) * k / (grid - 1);
    target[k] = m.g(sigma_star, xs[k]);
  }
  auto dev = [&](double eps) { return approximation_deviation(xs, target, m.a + eps, N); };
  // Scan uniform in 1/sqrt(eps), the scale of the phase, then refine the best minima.
  const int scan = 40000;
  const double u_lo = 1 / std::sqrt(1e-2), u_hi = 1 / std::sqrt(1e-7);
  std::vector<std::pair<double, double>> cand;
  std::vector<double> us(scan), ds(scan);
  for (int k = 0; k < scan; ++k) {
    us[k] = u_lo + (u_hi - u_lo) * k / (scan - 1);
    ds[k] = dev(1 / (us[k] * us[k]));
  }
  for (int k = 1; k + 1 < scan; ++k)
    if (ds[k] <= ds[k - 1] && ds[k] <= ds[k + 1]) cand.push_back({ds[k], us[k]});
  std::sort(cand.begin(), cand.end());
  if (cand.size() > 8) cand.resize(8);
  require(!cand.empty(), ErrorKind::approximation, "no local minimum of the deviation");
  const double du = (u_hi - u_lo) / (scan - 1);
  double best_u = cand.front().second, best_d = cand.front().first;
  for (const auto& [d0, u0] : cand) {
    double lo = u0 - du, hi = u0 + du;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = dev(1 / (x1 * x1)), f2 = dev(1 / (x2 * x2));
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2)
        hi = x2, x2 = x1, f2 = f1, x1 = hi - gr * (hi - lo), f1 = dev(1 / (x1 * x1));
      else
        lo = x1, x1 = x2, f1 = f2, x2 = lo + gr * (hi - lo), f2 = dev(1 / (x2 * x2));
    }
    const double u = 0.5 * (lo + hi), d = dev(1 / (u * u));
    if (d < best_d) best_d = d, best_u = u;
  }
  ApproxResult r;
  r.N = N;
  r.q = 3 * N + 2;
  r.deviation = best_d;
  require(best_d <= max_deviation, ErrorKind::approximation,
          "minimum deviation " + std::to_string(best_d) + " exceeds " + std::to_string(max_deviation) + " at N = " +
              std::to_string(N));
  // The window of period q next to the minimizer: its center f^q(0) = 0 and its
  // Chebyshev end f^{2q}(0) = beta_N; a_N sits at the relative phase of sigma* in (sigma_Ch, 0).
  auto a_of = [&](double u) { return m.a + 1 / (u * u); };
  auto crit = [&](double u) { return detail::orbit(a_of(u), 0, r.q); };
  double u_c = std::numeric_limits<double>::quiet_NaN();
  {
    const int probes = 16000;
    double prev_u = best_u - 8 * du, prev = crit(prev_u);
    for (int k = 1; k <= probes; ++k) {
      const double u = best_u - 8 * du + 16 * du * k / probes;
      const double v = crit(u);
      if ((prev < 0) != (v < 0) && std::abs(prev) + std::abs(v) < 0.5) {
        const double root = detail::bisect(crit, prev_u, u, 1e-15 * u, "window center");
        if (!std::isfinite(u_c) || std::abs(root - best_u) < std::abs(u_c - best_u)) u_c = root;
      }
      prev_u = u, prev = v;
    }
  }
  require(std::isfinite(u_c), ErrorKind::structure, "no window of period q near the minimizer");
  const double beta_star = beta_sigma(m, sigma_star);
  auto fixed_point = [&](double a, double guess) {
    double x = guess;
    for (int it = 0; it < 60; ++it) {
      double z = x, d = 1;
      for (int k = 0; k < r.q; ++k) d *= 2 * z, z = z * z + a;
      const double dx = (z - x) / (d - 1);
      x -= dx;
      if (std::abs(dx) < 1e-17) break;
    }
    return x;
  };
  // beta_N at the center by a bracketed scan, then tracked by Newton.
  auto fix_c = [&](double y) { return detail::orbit(a_of(u_c), y, r.q) - y; };
  double beta_c = std::numeric_limits<double>::quiet_NaN();
  {
    const int probes = 20000;
    const double lo_x = beta_star - 0.05, hi_x = -1e-15;
    double prev_x = lo_x, prev = fix_c(lo_x);
    for (int k = 1; k <= probes; ++k) {
      const double y = lo_x + (hi_x - lo_x) * k / probes;
      const double v = fix_c(y);
      if ((prev < 0) != (v < 0)) {
        const double root = detail::bisect(fix_c, prev_x, y, 1e-17, "boundary fixed point");
        if (!std::isfinite(beta_c) || std::abs(root - beta_star) < std::abs(beta_c - beta_star)) beta_c = root;
      }
      prev_x = y, prev = v;
    }
  }
  require(std::isfinite(beta_c), ErrorKind::structure, "no boundary fixed point of f^q near beta*");
  const double side = crit(u_c + 1e-9 * du) > 0 ? 1.0 : -1.0;
  // beta_N continued from the center along the parameter path.
  auto beta_at = [&](double u) {
    double x = beta_c;
    const int steps = 32;
    for (int k = 1; k <= steps; ++k) x = fixed_point(a_of(u_c + (u - u_c) * k / steps), x);
    return x;
  };
  auto cheb = [&](double u) { return detail::orbit(a_of(u), 0, 2 * r.q) - beta_at(u); };
  double u_in = u_c, u_out = u_c, step = 1e-9 * du;
  for (;;) {
    const double u = u_c + side * step;
    require(step < 2 * du, ErrorKind::structure, "no Chebyshev end of the window");
    if (cheb(u) < 0) {
      u_out = u;
      break;
    }
    u_in = u, step *= 1.25;
  }
  for (int it = 0; it < 200 && std::abs(u_out - u_in) > 1e-15 * u_c; ++it) {
    const double mid = 0.5 * (u_in + u_out);
    if (cheb(mid) < 0)
      u_out = mid;
    else
      u_in = mid;
  }
  const double u_ch = 0.5 * (u_in + u_out);
  const double u_n = u_c + sigma_star / sp.sigma_ch * (u_ch - u_c);
  r.a = a_of(u_n);
  r.deviation = std::min(best_d, approximation_deviation(xs, target, r.a, N));
  const double x = beta_at(u_n);
  const double round_off = detail::orbit_rounding(r.a, x, r.q);
  require(x < 0 && std::abs(detail::orbit(r.a, x, r.q) - x) < 4 * round_off + 1e-15, ErrorKind::structure,
          "no boundary fixed point of f^q near beta*");
  double deriv = 1;
  {
    double z = x;
    for (int k = 0; k < r.q; ++k) deriv *= 2 * z, z = z * z + r.a;
  }
  require(std::abs(deriv) > 1, ErrorKind::structure, "boundary fixed point of f^q is not repelling");
  // L_N = [x, -x]: f^j(L_N) misses 0 for 0 < j < q and f^q(L_N) lies in L_N.
  double lo = x, hi = -x;
  for (int j = 1; j < r.q; ++j) {
    std::tie(lo, hi) = detail::square_image(lo, hi, r.a);
    require(!(lo <= 0 && hi >= 0), ErrorKind::structure, "periodic interval returns to 0 too early");
  }
  std::tie(lo, hi) = detail::square_image(lo, hi, r.a);
  const double slack = 4 * round_off + 1e-15;
  require(lo >= x - slack && hi <= -x + slack, ErrorKind::structure, "f^q does not map L_N into itself");
  r.beta = x;
  r.beta_multiplier = deriv;
  r.diam_L = -2 * x;
  r.diam_L_star = -2 * beta_star;
  return r;
}

/// sigma* = sigma_Ch + 0.1 |sigma_Ch|.
inline double default_sigma_star(const SigmaParams& sp) { return sp.sigma_ch + 0.1 * std::abs(sp.sigma_ch); }

struct ApproxOutcome {
  int N = 0;
  std::optional<ApproxResult> result;
  std::string error;
};

/// approximate_parameter for each N, run concurrently; failures are kept per N.
inline std::vector<ApproxOutcome> approximate_sequence(const LavaursModel& m, const SigmaParams& sp, double sigma_star,
                                                       const std::vector<int>& Ns, double max_deviation = 0.05) {
  std::vector<std::future<ApproxOutcome>> jobs;
  for (int N : Ns)
    jobs.push_back(std::async(std::launch::async, [&, N] {
      ApproxOutcome o;
      o.N = N;
      try {
        o.result = approximate_parameter(m, sp, sigma_star, N, max_deviation);
      } catch (const Error& e) {
        o.error = e.what();
      }
      return o;
    }));
  std::vector<ApproxOutcome> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline nlohmann::json to_json(const LavaursModel& m, int samples = 21) {
  nlohmann::json minus = nlohmann::json::array(), plus = nlohmann::json::array();
  for (int k = 0; k < samples; ++k) {
    const double x = m.F0 + (0 - m.F0) * k / (samples - 1);
    minus.push_back({x, m.fatou_minus(x)});
    const double y = m.c1 + (m.c_m2 - m.c1) * k / (samples - 1);
    plus.push_back({y, m.fatou_plus(y)});
  }
  return {{"a", m.a},         {"x0", m.x0},       {"A", m.A},       {"B", m.B},
          {"c1", m.c1},       {"c_m1", m.c_m1},   {"c_m2", m.c_m2}, {"F0", m.F0},
          {"X_cal", m.X_cal}, {"multiplier", m.multiplier},         {"cycle", m.cycle},
          {"jet", m.jet},     {"fatou_minus", minus},               {"fatou_plus", plus}};
}

inline nlohmann::json to_json(const SigmaParams& s) {
  return {{"sigma0", s.sigma0},
          {"sigma_ch", s.sigma_ch},
          {"beta_ch", s.beta_ch},
          {"q_ch", s.q_ch},
          {"beta_derivative_ch", s.beta_derivative_ch}};
}

inline nlohmann::json to_json(const ApproxResult& r) {
  return {{"N", r.N},         {"q", r.q},         {"a", r.a},
          {"deviation", r.deviation},             {"beta", r.beta},
          {"beta_multiplier", r.beta_multiplier}, {"diam_L", r.diam_L},
          {"diam_L_star", r.diam_L_star}};
}

}  // namespace rbl
