#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rbl/extremal.hpp"
#include "rbl/modulus.hpp"

using namespace rbl;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<Point> random_set(std::mt19937_64& rng, int t) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < t) pts.emplace_back(u(rng), u(rng));
  return pts;
}

/// Exhaustive closest pair, written out independently of the library.
std::pair<std::size_t, std::size_t> brute_pair(const std::vector<Point>& p) {
  std::pair<std::size_t, std::size_t> best{0, 1};
  double d = std::abs(p[0] - p[1]);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (std::abs(p[i] - p[j]) < d) d = std::abs(p[i] - p[j]), best = {i, j};
  return best;
}

}  // namespace

TEST(Diameter, Square) {
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_NEAR(diameter(sq), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(min_gap(sq), 1, 1e-15);
}

TEST(Diameter, TwoPoints) {
  const std::vector<Point> p{{0, 0}, {1, 0}};
  EXPECT_EQ(diameter(p), 1);
  EXPECT_EQ(min_gap(p), 1);
}

TEST(Diameter, Collinear) {
  const std::vector<Point> p{{0, 0}, {1, 0}, {3, 0}};
  EXPECT_EQ(diameter(p), 3);
  EXPECT_EQ(min_gap(p), 1);
}

TEST(Diameter, TooFewPoints) {
  EXPECT_THROW(diameter(std::vector<Point>{}), Error);
  EXPECT_THROW(min_gap(std::vector<Point>{{0, 0}}), Error);
}

TEST(PackBound, Square) {
  const auto b = pack_bound(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_NEAR(b.bound, std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(b.holds);
}

TEST(PackBound, EquilateralTriangle) {
  const std::vector<Point> tri{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  const auto b = pack_bound(tri);
  EXPECT_NEAR(b.bound, 2 / std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(b.holds);
}

TEST(PackBound, Duplicates) { EXPECT_THROW(pack_bound(std::vector<Point>{{0, 0}, {0, 0}, {1, 0}}), Error); }

TEST(PackBound, RandomizedProperty) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> tdist(2, 50);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto pts = random_set(rng, tdist(rng));
    const auto b = pack_bound(pts);
    ASSERT_TRUE(b.holds);
    const auto [i, j] = brute_pair(pts);
    ASSERT_LT(std::abs(pts[i] - pts[j]), b.bound - 1e-12 * b.bound);
  }
}

TEST(SelectPair, Examples) {
  MarkedPointSet P;
  P.satellites = {{0, 0}, {0.1, 0}, {5, 0}};
  EXPECT_EQ(select_pair(P, {5, 0}), Point(0, 0));
  EXPECT_EQ(select_pair(P, {0, 0}), Point(0.1, 0));
}

TEST(SelectPair, NeedsThreePoints) {
  MarkedPointSet P;
  P.satellites = {{0, 0}, {1, 0}};
  EXPECT_THROW(select_pair(P, {0, 0}), Error);
}

TEST(SelectPair, TieBreakSmallestIndex) {
  MarkedPointSet P;
  P.satellites = {{0, 0}, {1, 0}, {2, 0}, {10, 0}};
  EXPECT_EQ(select_pair(P, {10, 0}), Point(0, 0));
}

TEST(SelectPair, RandomizedClosestMember) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    MarkedPointSet P;
    P.satellites = random_set(rng, 3 + trial % 20);
    const Point w = P.satellites[trial % P.satellites.size()];
    const Point z = select_pair(P, w);
    const auto [i, j] = brute_pair(P.satellites);
    EXPECT_NE(z, w);
    EXPECT_TRUE(z == P.satellites[i] || z == P.satellites[j]);
  }
}

TEST(SelectPair, SimilarityInvariance) {
  std::mt19937_64 rng(11);
  const Point rot = std::polar(3.7, 0.9), shift{-2, 5};
  for (int trial = 0; trial < 500; ++trial) {
    MarkedPointSet P, Q;
    P.satellites = random_set(rng, 3 + trial % 12);
    for (auto z : P.satellites) Q.satellites.push_back(rot * z + shift);
    const std::size_t wi = trial % P.satellites.size();
    const Point zp = select_pair(P, P.satellites[wi]);
    const Point zq = select_pair(Q, Q.satellites[wi]);
    const auto ip = std::find(P.satellites.begin(), P.satellites.end(), zp) - P.satellites.begin();
    const auto iq = std::find(Q.satellites.begin(), Q.satellites.end(), zq) - Q.satellites.begin();
    EXPECT_EQ(ip, iq);
  }
}

TEST(SelectPair, FiniteAlphaIsNormalized) {
  MarkedPointSet P;
  P.alpha = SpherePoint::at({0, 0});
  P.satellites = {{1, 0}, {2, 0}, {100, 0}};
  // Images 1, 0.5, 0.01: the closest pair is {2, 100}, not {1, 2}.
  EXPECT_EQ(select_pair(P, {2, 0}), Point(100, 0));
}

TEST(StaticBound, Values) {
  EXPECT_NEAR(static_bound(3).value(), 1.26426988871305, 1e-12);
  EXPECT_NEAR(static_bound(4).value(), 1.13309003545680, 1e-12);
  EXPECT_THROW(static_bound(2), Error);
}

TEST(StaticBound, DecreasingAndHinge) {
  double prev = static_bound(3).value();
  for (long long t = 4; t <= 1000000; t += (t < 1000 ? 1 : 997)) {
    const double b = static_bound(t).value();
    ASSERT_LT(b, prev);
    prev = b;
  }
  for (long long t = 3; t <= 1000; ++t)
    EXPECT_NEAR(tau_lower(static_bound(t)).value(), 8 / std::sqrt(static_cast<double>(t)), 1e-12);
}

TEST(EuclidBound, RoundConfiguration) {
  const double r = 0.3;
  const double b = euclid_distance_bound(2 * r, ModulusValue(1));
  EXPECT_NEAR(b, tau(ModulusValue(1)).value() * r, 1e-12);
  EXPECT_LT(b, (std::exp(2 * pi) - 1) * r);
}

TEST(EuclidBound, SmallModulus) {
  EXPECT_LT(euclid_distance_bound(1, ModulusValue(0.02)), 1e-30);
  EXPECT_THROW(euclid_distance_bound(0, ModulusValue(1)), Error);
  EXPECT_THROW(euclid_distance_bound(1, ModulusValue(0)), Error);
}

TEST(EuclidBound, RandomNestedRoundPairs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rr(0.01, 1), ratio(1.001, 1e3);
  for (int trial = 0; trial < 2000; ++trial) {
    const double r = rr(rng), R = r * ratio(rng);
    const double b = euclid_distance_bound(2 * r, ModulusValue(round_modulus(r, R)));
    EXPECT_LT(b, R - r) << r << " " << R;
  }
}
