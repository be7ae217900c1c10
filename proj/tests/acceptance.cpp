#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rbl/bounds.hpp"
#include "rbl/extremal.hpp"
#include "rbl/hyperbolic.hpp"
#include "rbl/lavaurs.hpp"
#include "rbl/modulus.hpp"
#include "rbl/specfun.hpp"

using namespace rbl;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) { return fmt12(v); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  return g;
}

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (t > limit_s) o.check(false, "time " + num(t) + " s over " + num(limit_s) + " s");
  if (!o.ok) ++failures;
  std::printf("[%s] %2d %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), t, o.detail.empty() ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
}

Outcome special_functions() {
  Outcome o;
  const double e = tau_inv(EpsilonValue(1)).value();
  o.check(std::abs(e - 0.5) <= 1e-9, "elliptic tau_inv(1) = " + num(e));
  const double p = compute_modulus(teichmuller_ring(EpsilonValue(1)), 1024).value;
  o.check(rel(p, 0.5) <= 1e-2, "PDE tau_inv(1) = " + num(p));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("PDE ") + num(p);
  return o;
}

Outcome inequality_suite() {
  Outcome o;
  int bad = 0;
  for (double m : log_grid(0.01, 10, 1000))
    if (!(tau_log_gap(ModulusValue(m)) > 0)) ++bad;
  o.check(bad == 0, std::to_string(bad) + " grid points not strict");
  return o;
}

Outcome hinge() {
  Outcome o;
  double worst = 0;
  for (int t = 3; t <= 100; ++t)
    worst = std::max(worst, std::abs(tau_lower(ModulusValue(pi / std::log(4.0 * t))).value() - 8 / std::sqrt(t)));
  o.check(worst <= 1e-12, "max error " + num(worst));
  return o;
}

Outcome engine() {
  Outcome o;
  for (double lr : {pi / 2, pi, 2 * pi}) {
    const double v = compute_modulus(round_annulus(0, 1, std::exp(lr)), 1024).value;
    o.check(rel(v, lr / (2 * pi)) <= 5e-3, "round ln(R/r)=" + num(lr) + " gives " + num(v));
  }
  const auto d = round_annulus(0, 1, std::exp(pi));
  const double base = compute_modulus(d, 1024).value;
  const double scaled =
      compute_modulus(mobius_normalize(d, SpherePoint::at(0), SpherePoint::at(0.5), SpherePoint::inf()), 1024).value;
  const double inverted =
      compute_modulus(mobius_normalize(d, SpherePoint::inf(), SpherePoint::at(1), SpherePoint::at(0)), 1024).value;
  o.check(rel(scaled, base) <= 5e-3, "scaling changes modulus to " + num(scaled));
  o.check(rel(inverted, base) <= 5e-3, "inversion changes modulus to " + num(inverted));
  const auto a = modulus_superadditivity_check(0, std::exp(2 * pi), 0, 1, std::exp(pi), 1024);
  o.check(a.holds, "concentric superadditivity");
  const auto b = modulus_superadditivity_check(0, 10, {1.5, 0.5}, 0.5, 4, 1024);
  o.check(b.holds, "off-center superadditivity");
  return o;
}

Outcome packing() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> td(2, 50);
  std::uniform_real_distribution<double> u(-1, 1);
  int bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Point> pts(td(rng));
    for (auto& z : pts) z = {u(rng), u(rng)};
    if (!(min_gap(pts) < 2 / std::sqrt(static_cast<double>(pts.size())) * diameter(pts))) ++bad;
  }
  o.check(bad == 0, std::to_string(bad) + " sets violate the packing bound");
  return o;
}

Outcome main_bound_cases() {
  Outcome o;
  for (int q = 2; q <= 5; ++q) {
    const auto t0 = std::chrono::steady_clock::now();
    const BoundReport r = verify_main(build_pl_restriction(RotationNumber(1, q)));
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(r.passed && r.margin > 0, "q=" + std::to_string(q) + " measured " + num(r.measured.value) + " bound " +
                                          num(r.bound) + (r.error.empty() ? "" : " " + r.error));
    o.check(t <= 900, "q=" + std::to_string(q) + " took " + num(t) + " s");
    if (q == 2) o.check(std::abs(r.bound - 2.5285) < 1e-4, "q=2 bound " + num(r.bound));
    if (q == 5) o.check(std::abs(r.bound - 1.9770) < 1e-4, "q=5 bound " + num(r.bound));
  }
  return o;
}

Outcome satellite_sweep() {
  Outcome o;
  SweepOptions opt;
  opt.den_from = 2;
  opt.den_to = 8;
  const SweepResult res = sweep_satellites(opt);
  o.check(res.reports.size() == 7, std::to_string(res.reports.size()) + " rows");
  o.check(res.bounds_decreasing, "bound column not strictly decreasing");
  for (const auto& r : res.reports)
    o.check(r.passed, "q=" + std::to_string(r.q) + " measured " + num(r.measured.value) + " bound " + num(r.bound));
  return o;
}

Outcome hyperbolic_dictionary() {
  Outcome o;
  double worst = 0;
  for (double x : log_grid(0.01, 100, 1000)) worst = std::max(worst, std::abs(psi(psi_inv(x)) - x) / std::max(1.0, x));
  o.check(worst <= 1e-9, "psi round trip error " + num(worst));
  const auto t = asymptotic_check({1e3, 1e6, 1e9, 1e12}, 2);
  std::string ratios;
  for (const auto& r : t.rows) ratios += (ratios.empty() ? "" : " ") + num(r.ratio_to_lnln);
  o.check(t.ratios_in_window, "ratios " + ratios + " outside [1, 3]");
  return o;
}

Outcome lavaurs_construction() {
  Outcome o;
  const LavaursModel m = build_model();
  o.check(m.a == -1.75 && std::abs(m.multiplier - 1) <= 1e-9, "multiplier " + num(m.multiplier));
  double res_minus = 0, res_plus = 0;
  for (int k = 1; k <= 100; ++k) {
    const double z = m.x0 + (0 - m.x0) * k / 100.0;
    res_minus = std::max(res_minus, std::abs(m.fatou_minus(m.F(z)) - m.fatou_minus(z) - 1));
    const double y = m.c_m2 + (m.x0 - 1e-3 - m.c_m2) * (k - 1) / 99.0;
    res_plus = std::max(res_plus, std::abs(m.fatou_plus(m.F(y)) - m.fatou_plus(y) - 1));
  }
  o.check(res_minus < 1e-6 && res_plus < 1e-6, "Fatou residuals " + num(res_minus) + " " + num(res_plus));
  const SigmaParams sp = find_sigma_params(m);
  o.check(sp.sigma0 < sp.sigma_ch && sp.sigma_ch < 0, "sigma ordering");
  o.check(std::abs(lavaurs_g(m, sp.sigma0, m.F0) - m.c_m1) <= 1e-9, "sigma_0 residual");
  o.check(std::abs(big_G(m, sp.sigma_ch, big_G(m, sp.sigma_ch, 0)) - sp.beta_ch) <= 1e-7, "sigma_Ch residual");
  double prev_G0 = INFINITY;
  for (int k = 0; k < 20; ++k) {
    const double s = sp.sigma0 * (1 - k / 19.0);
    const double q = q_sigma(m, s);
    double prev = -INFINITY;
    bool inc = true, even = true;
    for (int j = 0; j <= 100; ++j) {
      const double x = q * (1 - j / 100.0);
      const double v = big_G(m, s, x);
      inc = inc && v > prev;
      even = even && std::abs(v - big_G(m, s, -x)) < 1e-10;
      prev = v;
    }
    o.check(inc && even, "(a) at sigma " + num(s));
    o.check(std::abs(big_G(m, s, q) - m.c1) < 1e-6 && m.c1 < q && q < 0, "(b) at sigma " + num(s));
    const double G0 = big_G(m, s, 0);
    o.check(G0 < prev_G0, "(d) at sigma " + num(s));
    prev_G0 = G0;
  }
  const double qs0 = q_sigma(m, sp.sigma0);
  o.check(std::abs(big_G(m, 0, 0)) < 1e-6, "(c) G_0(0)");
  o.check(std::abs(big_G(m, sp.sigma0, 0) + m.c_m2) < 1e-5 && -m.c_m2 > -m.F0 && -m.F0 >= -qs0 && -qs0 > 0,
          "(c) chain at sigma_0");
  return o;
}

Outcome lavaurs_necessity() {
  Outcome o;
  const LavaursModel m = build_model();
  const SigmaParams sp = find_sigma_params(m);
  const auto out = approximate_sequence(m, sp, default_sigma_star(sp), {10, 20, 40});
  double prev_a = INFINITY;
  for (const auto& x : out) {
    if (!x.result) {
      o.check(false, "N=" + std::to_string(x.N) + " " + x.error);
      continue;
    }
    const auto& r = *x.result;
    o.check(r.q == 3 * r.N + 2, "q_N");
    o.check(r.a > -1.75 && r.a < prev_a, "N=" + std::to_string(r.N) + " a_N " + num(r.a) + " not decreasing");
    o.check(r.diam_L >= 0.5 * r.diam_L_star, "N=" + std::to_string(r.N) + " diam " + num(r.diam_L));
    prev_a = r.a;
  }
  return o;
}

}  // namespace

int main() {
  criterion(1, "special-function calibration", 60, special_functions);
  criterion(2, "tau inequality suite", 1, inequality_suite);
  criterion(3, "static hinge", 1, hinge);
  criterion(4, "engine exactness", 300, engine);
  criterion(5, "packing", 10, packing);
  criterion(6, "main bound end-to-end", 3600, main_bound_cases);
  criterion(7, "satellite sweep", 7200, satellite_sweep);
  criterion(8, "hyperbolic dictionary", 1, hyperbolic_dictionary);
  criterion(9, "Lavaurs construction", 600, lavaurs_construction);
  criterion(10, "Lavaurs necessity", 1800, lavaurs_necessity);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
