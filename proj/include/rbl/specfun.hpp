#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "rbl/error.hpp"

namespace rbl {

/// Conformal modulus, normalized so that r < |z| < R has modulus ln(R/r)/(2 pi).
class ModulusValue {
 public:
  explicit ModulusValue(double v) : v_(v) {
    require(std::isfinite(v) && v >= 0, ErrorKind::domain, "modulus must be finite and nonnegative");
  }
  double value() const { return v_; }
  operator double() const { return v_; }

 private:
  double v_;
};

/// Euclidean distance scale of the extremal problem.
class EpsilonValue {
 public:
  explicit EpsilonValue(double v) : v_(v) {
    require(v > 0 && !std::isnan(v), ErrorKind::domain, "epsilon must be positive");
  }
  double value() const { return v_; }
  operator double() const { return v_; }

 private:
  double v_;
};

namespace detail {

inline double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    double an = 0.5 * (a + b);
    double bn = std::sqrt(a * b);
    if (std::abs(an - bn) <= 4 * std::numeric_limits<double>::epsilon() * an) return 0.5 * (an + bn);
    a = an;
    b = bn;
  }
  return 0.5 * (a + b);
}

/// mu from the pair (r, sqrt(1-r^2)) supplied separately to avoid cancellation.
inline double mu_from_pair(double r, double rp) { return 0.5 * std::numbers::pi * agm(1.0, rp) / agm(1.0, r); }

/// Bisection on a monotone function of log(x); returns x with f(x) = target.
inline double invert_log_monotone(const std::function<double(double)>& f, double target, double log_lo,
                                  double log_hi, bool increasing, double rel_tol) {
  auto below = [&](double lx) {
    double v = f(std::exp(lx));
    return increasing ? v < target : v > target;
  };
  int guard = 0;
  while (!below(log_lo)) {
    log_lo -= 2 * (1 + std::abs(log_lo));
    if (++guard > 60 || log_lo < -700) fail(ErrorKind::convergence, "bracket exhausted (lower end)");
  }
  guard = 0;
  while (below(log_hi)) {
    log_hi += 2 * (1 + std::abs(log_hi));
    if (++guard > 60 || log_hi > 700) fail(ErrorKind::convergence, "bracket exhausted (upper end)");
  }
  for (int i = 0; i < 400 && log_hi - log_lo > 0.25 * rel_tol; ++i) {
    double mid = 0.5 * (log_lo + log_hi);
    (below(mid) ? log_lo : log_hi) = mid;
  }
  return std::exp(0.5 * (log_lo + log_hi));
}

}  // namespace detail

/// Complete elliptic integral of the first kind, modulus k in [0,1).
inline double elliptic_k(double k) {
  require(k >= 0 && k < 1, ErrorKind::domain, "elliptic_k needs 0 <= k < 1");
  return 0.5 * std::numbers::pi / detail::agm(1.0, std::sqrt((1 - k) * (1 + k)));
}

inline double grotzsch_mu(double r) {
  require(r > 0 && r < 1, ErrorKind::domain, "grotzsch_mu needs 0 < r < 1");
  return detail::mu_from_pair(r, std::sqrt((1 - r) * (1 + r)));
}

inline ModulusValue tau_inv(EpsilonValue eps) {
  const double e = eps.value();
  const double r = 1 / std::sqrt(1 + e);
  const double rp = std::sqrt(e / (1 + e));
  return ModulusValue(detail::mu_from_pair(r, rp) / std::numbers::pi);
}

inline EpsilonValue tau_lower(ModulusValue m) {
  require(m.value() > 0, ErrorKind::domain, "tau_lower needs m > 0");
  return EpsilonValue(16 * std::exp(-std::numbers::pi / (2 * m.value())));
}

/// ln(tau(m) / tau_lower(m)), resolved even where the two agree to all double digits.
/// Uses tau(m) = 16 q ((1 + sum q^{n(n+1)}) / theta4(q))^4 with q = exp(-pi/(2m)).
inline double tau_log_gap(ModulusValue m) {
  require(m.value() > 0, ErrorKind::domain, "tau_log_gap needs m > 0");
  const double q = std::exp(-std::numbers::pi / (2 * m.value()));
  double s2 = 0, s4 = 0;
  for (int n = 1; n < 200; ++n) {
    double t2 = std::pow(q, n * (n + 1.0));
    double t4 = std::pow(q, static_cast<double>(n) * n);
    s2 += t2;
    s4 += (n % 2 ? -2.0 : 2.0) * t4;
    if (t4 < 1e-300 || t4 < 1e-18 * std::abs(s4)) break;
  }
  return 4 * (std::log1p(s2) - std::log1p(s4));
}

/// tau_inv^{-1}; on q <= 1/2 the theta quotient 16 q exp(log gap), otherwise bisection.
inline EpsilonValue tau(ModulusValue m) {
  require(m.value() > 0, ErrorKind::domain, "tau needs m > 0");
  const double q = std::exp(-std::numbers::pi / (2 * m.value()));
  if (q <= 0.5) return EpsilonValue(tau_lower(m).value() * std::exp(tau_log_gap(m)));
  const double lower = std::log(16.0) - std::numbers::pi / (2 * m.value());
  auto f = [](double e) { return tau_inv(EpsilonValue(e)).value(); };
  return EpsilonValue(detail::invert_log_monotone(f, m.value(), lower - 1, lower + 4, true, 1e-12));
}

inline ModulusValue psi_inv(double x) {
  require(x > 0 && std::isfinite(x), ErrorKind::domain, "psi_inv needs x > 0");
  return ModulusValue(2 * std::asin(std::exp(-0.5 * x)) / x);
}

inline double psi(ModulusValue m) {
  require(m.value() > 0, ErrorKind::domain, "psi needs m > 0");
  auto f = [](double x) { return psi_inv(x).value(); };
  double guess = std::log(m.value() > 1 ? 1 / m.value() : 1.0);
  return detail::invert_log_monotone(f, m.value(), guess - 2, guess + 2, false, 1e-12);
}

}  // namespace rbl
