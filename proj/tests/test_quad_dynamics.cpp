#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rbl/io.hpp"
#include "rbl/modulus.hpp"
#include "rbl/quad_dynamics.hpp"

using namespace rbl;
constexpr double pi = std::numbers::pi;

namespace {

/// Period-q centers closest to the p/q cardioid root, from the roots of the
/// Gleason polynomial f_c^q(0) solved independently.
Point reference_center(int q) {
  switch (q) {
    case 2: return {-1, 0};
    case 3: return {-0.12256116687665351, 0.7448617666197441};
    case 4: return {0.282271390766914, 0.5300606175785253};
    case 5: return {0.3795135880159236, 0.3349323055974975};
    case 6: return {0.38900684056977125, 0.21585065087081864};
    case 7: return {0.37600868184674247, 0.1447493713216254};
    default: return {0.3590310628394622, 0.10093487686484837};
  }
}

const PLRestriction& basilica() {
  static const PLRestriction r = build_pl_restriction(RotationNumber(1, 2));
  return r;
}

}  // namespace

TEST(RotationNumber, Validation) {
  EXPECT_NO_THROW(RotationNumber(1, 2));
  EXPECT_THROW(RotationNumber(2, 4), Error);
  EXPECT_THROW(RotationNumber(0, 3), Error);
  EXPECT_THROW(RotationNumber(3, 3), Error);
  EXPECT_THROW(RotationNumber(1, 1), Error);
}

TEST(CardioidRoot, Values) {
  EXPECT_LT(std::abs(cardioid_root(RotationNumber(1, 2)) - Point(-0.75, 0)), 1e-15);
  EXPECT_LT(std::abs(cardioid_root(RotationNumber(1, 3)) - Point(-0.125, 0.649519)), 1e-6);
}

TEST(CardioidRoot, AlphaMultiplierIsLambda) {
  for (int q = 2; q <= 9; ++q)
    for (int p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const RotationNumber rot(p, q);
      const Point lambda = std::polar(1.0, 2 * pi * rot.value());
      const auto a = alpha_fixed_point_unchecked(cardioid_root(rot), rot);
      EXPECT_LT(std::abs(a.multiplier - lambda), 1e-10) << rot.str();
    }
}

TEST(SatelliteCenter, MatchesGleasonRoots) {
  for (int q = 2; q <= 8; ++q) {
    const Point c = satellite_center(RotationNumber(1, q));
    EXPECT_LT(std::abs(c - reference_center(q)), 1e-10) << q;
    EXPECT_LT(std::abs(iterate(c, 0, q)), 1e-12);
    for (int m = 1; m < q; ++m) EXPECT_GT(std::abs(iterate(c, 0, m)), 1e-6);
    EXPECT_GT(std::abs(alpha_fixed_point(c, RotationNumber(1, q)).multiplier), 1);
  }
}

TEST(SatelliteCenter, RotationIsCombinatoriallyCorrect) {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 3}, {2, 5}, {3, 7}, {1, 4}}) {
    const RotationNumber rot(p, q);
    const Point c = satellite_center(rot);
    const Point a = alpha_fixed_point(c, rot).alpha;
    const int step = cycle_rotation(critical_cycle(c, q), a);
    EXPECT_EQ(step, p) << rot.str();
  }
}

TEST(AlphaFixedPoint, Examples) {
  EXPECT_THROW(alpha_fixed_point(0, RotationNumber(1, 2)), Error);
  const auto b = alpha_fixed_point_unchecked({-0.75, 0}, RotationNumber(1, 2));
  EXPECT_LT(std::abs(b.alpha - Point(-0.5, 0)), 1e-12);
  EXPECT_LT(std::abs(b.multiplier - Point(-1, 0)), 1e-12);
  EXPECT_THROW(alpha_fixed_point({-0.75, 0}, RotationNumber(1, 2)), Error);
  const auto a = alpha_fixed_point({-1, 0}, RotationNumber(1, 2));
  EXPECT_NEAR(a.alpha.real(), (1 - std::sqrt(5.0)) / 2, 1e-14);
  EXPECT_NEAR(a.multiplier.real(), 1 - std::sqrt(5.0), 1e-14);
}

TEST(SampleSmallJulia, BasilicaGeometry) {
  const Point c{-1, 0};
  const RotationNumber rot(1, 2);
  const auto pts = sample_small_julia(c, rot, Disk{0, 0.9}, 5000);
  ASSERT_GE(pts.size(), 5000u);
  const double alpha = (1 - std::sqrt(5.0)) / 2;
  double da = 1, dm = 1;
  bool has_alpha = false;
  for (const auto& z : pts) {
    EXPECT_TRUE(z.real() >= -1.7 && z.real() <= 0.7 && std::abs(z.imag()) <= 1.1);
    EXPECT_LT(std::abs(iterate(c, z, 4)), 4);
    da = std::min(da, std::abs(z - alpha));
    dm = std::min(dm, std::abs(z + alpha));
    has_alpha = has_alpha || std::abs(z - alpha) < 1e-14;
  }
  EXPECT_LT(da, 1e-2);
  EXPECT_LT(dm, 1e-2);
  EXPECT_TRUE(has_alpha);
}

TEST(SampleSmallJulia, OrbitsStayInV) {
  const RotationNumber rot(1, 3);
  const Point c = satellite_center(rot);
  const Point a = alpha_fixed_point(c, rot).alpha;
  const Disk V{0, 2.5 * std::abs(a)};
  const auto pts = sample_small_julia(c, rot, V, 3000);
  for (std::size_t k = 0; k < pts.size(); k += 7) {
    Point z = pts[k];
    for (int it = 0; it < 50; ++it) {
      ASSERT_LT(std::abs(z), 4);
      z = iterate(c, z, 3);
    }
    EXPECT_LT(std::abs(iterate(c, pts[k], 6)), 4);
  }
}

TEST(PullbackRestriction, BuiltBasilica) {
  const auto& r = basilica();
  EXPECT_EQ(r.d_star, 2);
  EXPECT_EQ(r.s, 2);
  EXPECT_EQ(r.r_base, 1);
  EXPECT_GT(r.nesting_gap, 0);
  EXPECT_TRUE(point_in_polygon(0, r.U));
  for (const auto& u : r.U) EXPECT_TRUE(point_in_polygon(u, r.V));
  EXPECT_GT(std::abs(r.alpha_multiplier), 1);
  const Box kb = bounding_box(r.K_samples);
  EXPECT_TRUE(r.alpha.real() >= kb.xmin && r.alpha.real() <= kb.xmax);
}

TEST(PullbackRestriction, DiskExample) {
  const double alpha = (1 - std::sqrt(5.0)) / 2;
  const auto r = pullback_restriction({-1, 0}, RotationNumber(1, 2), Disk{0.3 * alpha, 1.2});
  EXPECT_EQ(r.d_star, 2);
  EXPECT_GT(r.nesting_gap, 0);
}

TEST(PullbackRestriction, DiskExampleCapturesCriticalValue) {
  const Point c{-1, 0};
  const double alpha = (1 - std::sqrt(5.0)) / 2;
  const Disk V{0.3 * alpha, 1.2};
  // f^2(1) = f(0) = -1 lies in V, so U holds the critical points +-1 of f^2 as well as 0.
  EXPECT_LT(std::abs(iterate(c, 1, 2) - V.center), V.radius);
  EXPECT_LT(std::abs(iterate(c, 0, 1) - V.center), V.radius);
  for (double rad : {0.5, 0.7, 0.8}) {
    try {
      pullback_restriction(c, RotationNumber(1, 2), Disk{0.3 * alpha, rad});
      ADD_FAILURE() << rad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::not_nested) << rad;
    }
  }
  try {
    pullback_restriction(c, RotationNumber(1, 2), V);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degree);
  }
}

TEST(PullbackRestriction, HugeDiskIsDegreeError) {
  try {
    pullback_restriction({-1, 0}, RotationNumber(1, 2), Disk{0, 10});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::degree || e.kind() == ErrorKind::not_nested) << e.what();
  }
}

TEST(ExternalCriticalPoint, Basilica) {
  const auto& r = basilica();
  const Point w = external_critical_point(r, 1e-3);
  EXPECT_LT(std::abs(w - Point(1, 0)), 1e-12);
  for (int i = 0; i < 2; ++i)
    for (const auto& z : r.K_samples) EXPECT_GT(std::abs(iterate(r.c, z, i) - w), 1e-3);
  // f(w) = 0 lies in K*_0.
  EXPECT_LT(std::abs(iterate(r.c, w, 1)), 1e-12);
}

TEST(ExternalCriticalPoint, HigherPeriods) {
  for (int q : {3, 4}) {
    const auto r = build_pl_restriction(RotationNumber(1, q));
    const Point w = external_critical_point(r, 1e-3);
    EXPECT_LT(std::abs(iterate_with_derivative(r.c, w, q).second), 1e-9);
    bool hits = false;
    for (int j = 1; j <= q; ++j) hits = hits || std::abs(iterate(r.c, w, j)) < 1e-9;
    EXPECT_TRUE(hits);
  }
}

TEST(RootAnnulus, BasilicaModulus) {
  const auto& r = basilica();
  const AnnularDomain probe{r.U, PointCloud{{0}, 1}};
  const double h = grid_cell_size(probe, 256);
  const double fat = 2 * h * (1 + 1e-9);
  const auto dom = root_annulus(PLRestriction{r}, fat);
  auto with = [&](double eps) {
    PLRestriction rr = r;
    rr.K_samples = resample_small_julia(r, eps);
    return compute_modulus(root_annulus(rr, eps), 256).value;
  };
  const double m1 = with(fat);
  EXPECT_GT(m1, 0);
  EXPECT_TRUE(std::isfinite(m1));
  const double m2 = with(1.5 * fat);
  EXPECT_LE(m2, m1 * (1 + 5e-3));
  EXPECT_THROW(root_annulus(r, 0), Error);
  EXPECT_TRUE(dom.has_cloud());
}

TEST(CycleAnnuli, PullbackChainBounds) {
  const auto& r = basilica();
  const AnnularDomain probe{r.U, PointCloud{{0}, 1}};
  const double fat = 2 * grid_cell_size(probe, 256) * (1 + 1e-9);
  PLRestriction rr = r;
  rr.K_samples = resample_small_julia(r, fat);
  const double root = compute_modulus(root_annulus(rr, fat), 256).value;
  for (const auto& a : cycle_annuli(rr, fat)) {
    const double m = compute_modulus(a, 256).value;
    EXPECT_GE(m, root / r.d_star - 0.1 * root);
    EXPECT_LE(m, root + 0.1 * root);
  }
}

TEST(PLRestrictionJson, RoundTrip) {
  const auto& r = basilica();
  const auto back = restriction_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(back.c, r.c);
  EXPECT_EQ(back.rot.q(), 2);
  EXPECT_EQ(back.U, r.U);
  EXPECT_EQ(back.K_samples.size(), r.K_samples.size());
  EXPECT_EQ(back.v_policy, r.v_policy);
  EXPECT_EQ(restriction_file_name(r), "pl_c-1_0_q2.json");
}
