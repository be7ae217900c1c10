#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "rbl/bounds.hpp"

using namespace rbl;
constexpr double pi = std::numbers::pi;

TEST(MainBound, Values) {
  EXPECT_NEAR(main_bound(2, 2), 2.5285397774261, 1e-12);
  EXPECT_NEAR(main_bound(5, 2), 1.977054399513327, 1e-12);
  EXPECT_NEAR(main_bound(2, 2), 2 * pi / std::log(12.0), 1e-14);
  for (int s = 2; s < 200; ++s) EXPECT_NEAR(main_bound(s, 1), static_bound(s + 1).value(), 1e-14);
  EXPECT_THROW(main_bound(1, 2), Error);
  EXPECT_THROW(main_bound(2, 0), Error);
}

TEST(MainBound, Monotonicity) {
  for (int s = 2; s < 500; ++s) {
    EXPECT_LT(main_bound(s + 1, 2), main_bound(s, 2));
    EXPECT_LT(main_bound(s, 2), main_bound(s, 3));
    EXPECT_NEAR(pc1_bound(s, 3), 3 * main_bound(s, 3), 1e-12);
  }
}

TEST(MaxPlDegree, Values) {
  EXPECT_EQ(max_pl_degree(2, true), 2);
  EXPECT_EQ(max_pl_degree(2, false), 4);
  EXPECT_EQ(max_pl_degree(3, true), 4);
  for (int d = 2; d <= 10; ++d) EXPECT_LE(max_pl_degree(d, true), max_pl_degree(d, false));
  EXPECT_THROW(max_pl_degree(1, true), Error);
}

TEST(Pc1Bound, Value) { EXPECT_NEAR(pc1_bound(2, 2), 5.0570795548522, 1e-12); }

TEST(VerifyStatic, RoundProbesRandomized) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    MarkedPointSet P;
    while (P.satellites.size() < 5) P.satellites.emplace_back(u(rng), u(rng));
    const Point w = P.satellites[trial % 5];
    const BoundReport r = verify_static_round(P, w);
    ASSERT_TRUE(r.passed) << trial << " measured " << r.measured.value << " bound " << r.bound;
    EXPECT_NEAR(r.bound, static_bound(5).value(), 1e-15);
  }
}

TEST(VerifyStatic, SeparatingAnnulus) {
  SatelliteMarking M;
  M.alpha = SpherePoint::at({0, 0});
  M.reps = {{0.1, 0}, {3, 0}};
  M.w = {0, 3};
  const AnnularDomain a = round_annulus({0.05, 0}, 0.2, 1.5);
  const BoundReport r = verify_static(M, a, 256);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.measured.value, round_modulus(0.2, 1.5), 5e-3);
}

TEST(VerifyStatic, NonSeparatingIsTopologyError) {
  SatelliteMarking M;
  M.alpha = SpherePoint::at({0, 0});
  M.reps = {{0.1, 0}, {3, 0}};
  M.w = {0, 3};
  try {
    verify_static(M, round_annulus({0, 0}, 0.05, 1.5), 256);
    FAIL() << "expected a topology error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::topology);
  }
}

TEST(VerifyMain, BasilicaAtCoarseGrid) {
  MainOptions opt;
  opt.grid = 256;
  const BoundReport r = verify_main(build_pl_restriction(RotationNumber(1, 2)), opt);
  EXPECT_TRUE(r.passed) << r.error;
  EXPECT_GT(r.measured.value, 0);
  EXPECT_GT(r.margin, 0);
  EXPECT_NEAR(r.bound, 2.5285397774261, 1e-12);
  EXPECT_EQ(r.s, 2);
  EXPECT_EQ(r.d_star, 2);
  EXPECT_TRUE(r.measured.lower_biased);
}

TEST(BoundReportJson, RoundTrip) {
  BoundReport r;
  r.case_id = "x";
  r.p = 1, r.q = 3, r.s = 3, r.d_star = 2;
  r.measured.value = 0.04;
  r.measured.refinements.push_back({512, 0.01, 0.041, 1e-11, 30});
  r.bound = main_bound(3, 2);
  finish(r);
  const BoundReport b = bound_report_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(b.case_id, r.case_id);
  EXPECT_EQ(b.measured.value, r.measured.value);
  EXPECT_EQ(b.measured.refinements.size(), 1u);
  EXPECT_EQ(b.passed, r.passed);
  EXPECT_EQ(b.margin, r.margin);
}

TEST(Sweep, BoundRatioAndEmptyRange) {
  EXPECT_NEAR(main_bound(8, 2) / main_bound(2, 2), std::log(12.0) / std::log(36.0), 1e-14);
  EXPECT_NEAR(main_bound(8, 2) / main_bound(2, 2), 0.6934, 1e-4);
  SweepOptions opt;
  opt.den_from = 5;
  opt.den_to = 4;
  EXPECT_TRUE(sweep_satellites(opt).reports.empty());
}

TEST(Sweep, SkipsNonCoprime) {
  SweepOptions opt;
  opt.num = 2;
  opt.den_from = 4;
  opt.den_to = 4;
  const auto res = sweep_satellites(opt);
  EXPECT_TRUE(res.reports.empty());
  EXPECT_EQ(res.skipped.size(), 1u);
}

TEST(Sweep, CachedSmallSweep) {
  const auto dir = std::filesystem::temp_directory_path() / "rbl_test_sweep_cache";
  std::filesystem::remove_all(dir);
  SweepOptions opt;
  opt.den_from = 2;
  opt.den_to = 3;
  opt.main.grid = 256;
  opt.jobs = 2;
  opt.cache = Cache{dir};
  const auto first = sweep_satellites(opt);
  ASSERT_EQ(first.reports.size(), 2u);
  EXPECT_EQ(first.cache_hits, 0);
  EXPECT_TRUE(first.bounds_decreasing);
  for (const auto& r : first.reports) EXPECT_TRUE(r.passed) << r.case_id << " " << r.error;
  EXPECT_EQ(first.reports[0].q, 2);
  EXPECT_EQ(first.reports[1].q, 3);
  const auto second = sweep_satellites(opt);
  EXPECT_EQ(second.cache_hits, 2);
  EXPECT_EQ(second.reports[1].measured.value, first.reports[1].measured.value);
  opt.main.grid = 128;
  opt.den_to = 2;
  EXPECT_EQ(sweep_satellites(opt).cache_hits, 0);
  const std::string csv = sweep_csv(first.reports);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "p,q,s,d_star,measured,bound,margin,passed,grid");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  std::filesystem::remove_all(dir);
}
