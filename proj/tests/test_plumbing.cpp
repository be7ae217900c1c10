#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "rbl/cache.hpp"
#include "rbl/io.hpp"
#include "rbl/svg.hpp"

using namespace rbl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rbl_plumbing_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cache, KeyIsContentHash) {
  const nlohmann::json a{{"c", {-1, 0}}, {"grid", 1024}};
  const nlohmann::json b{{"grid", 1024}, {"c", {-1, 0}}};
  EXPECT_EQ(Cache::key_of(a), Cache::key_of(b));
  EXPECT_NE(Cache::key_of(a), Cache::key_of(nlohmann::json{{"c", {-1, 0}}, {"grid", 512}}));
  EXPECT_EQ(Cache::key_of(a).size(), 16u);
}

TEST(Cache, StoreLookupMiss) {
  const Cache c(scratch("cache"));
  const std::string k = Cache::key_of({{"x", 1}});
  EXPECT_FALSE(c.lookup(k));
  c.store(k, {{"value", 0.25}});
  const auto r = c.lookup(k);
  ASSERT_TRUE(r);
  EXPECT_EQ((*r)["value"], 0.25);
  EXPECT_FALSE(c.lookup(Cache::key_of({{"x", 2}})));
}

TEST(Cache, CorruptedRecordIsIgnored) {
  const Cache c(scratch("corrupt"));
  const std::string k = Cache::key_of({{"x", 3}});
  std::ofstream(c.path_of(k)) << "{not json";
  EXPECT_FALSE(c.lookup(k));
  std::ofstream(c.path_of(k), std::ios::trunc) << nlohmann::json{{"key", "other"}, {"record", 1}}.dump();
  EXPECT_FALSE(c.lookup(k));
}

TEST(Cache, FromEnv) {
  setenv("RBL_CACHE_DIR", "/tmp/rbl_env_cache", 1);
  EXPECT_EQ(Cache::from_env().dir(), fs::path("/tmp/rbl_env_cache"));
  unsetenv("RBL_CACHE_DIR");
  EXPECT_EQ(Cache::from_env().dir(), fs::path(".rbl_cache"));
}

TEST(AtomicWrite, ConcurrentWritersLeaveOneWholeFile) {
  const fs::path dir = scratch("atomic");
  const fs::path p = dir / "sub" / "out.txt";
  std::vector<std::thread> ts;
  for (int t = 0; t < 8; ++t)
    ts.emplace_back([&, t] {
      for (int k = 0; k < 20; ++k) atomic_write(p, std::string(1000, static_cast<char>('a' + t)));
    });
  for (auto& t : ts) t.join();
  const std::string s = slurp(p);
  ASSERT_EQ(s.size(), 1000u);
  EXPECT_EQ(s.find_first_not_of(s[0]), std::string::npos);
  int files = 0;
  for (const auto& e : fs::directory_iterator(p.parent_path())) ++files, (void)e;
  EXPECT_EQ(files, 1);
}

TEST(Svg, Deterministic) {
  std::vector<Series> s{{"measured", {2, 3, 4}, {0.05, 0.03, 0.02}}, {"bound", {2, 3, 4}, {2.5, 2.2, 2.0}}};
  ChartOptions o;
  o.title = "a < b & c";
  o.log_y = true;
  const std::string a = render_svg(s, o), b = render_svg(s, o);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_NE(a.find("measured"), std::string::npos);
  const fs::path p = scratch("svg") / "c.svg";
  emit_svg(s, p.string(), o);
  EXPECT_EQ(slurp(p), a);
}

TEST(Svg, EmptyOrBadInput) {
  EXPECT_THROW(render_svg({}), Error);
  EXPECT_THROW(render_svg({{"e", {}, {}}}), Error);
  EXPECT_THROW(render_svg({{"r", {1, 2}, {1}}}), Error);
  ChartOptions o;
  o.log_y = true;
  EXPECT_THROW(render_svg({{"n", {1, 2}, {1, 0}}}, o), Error);
  EXPECT_NO_THROW(render_svg({{"one", {1}, {1}}}));
}

TEST(Io, MarkedPointsArrayAndObject) {
  const auto P = marked_points_from_json(nlohmann::json::parse(R"([[0,0],[1,0],"inf",[0,2]])"));
  EXPECT_TRUE(P.alpha.infinite);
  EXPECT_EQ(P.satellites.size(), 3u);
  const auto Q = marked_points_from_json(nlohmann::json::parse(R"({"points": [[5,5],[1,0],[0,2]], "w": 1})"));
  EXPECT_FALSE(Q.alpha.infinite);
  ASSERT_TRUE(Q.external);
  EXPECT_EQ(*Q.external, Point(0, 2));
  const auto R = marked_points_from_json(to_json(Q));
  EXPECT_EQ(R.satellites, Q.satellites);
  EXPECT_EQ(R.external, Q.external);
  EXPECT_THROW(marked_points_from_json(nlohmann::json::parse(R"(["zero", [1,0]])")), Error);
  EXPECT_THROW(marked_points_from_json(nlohmann::json::parse(R"([])")), Error);
  EXPECT_THROW(marked_points_from_json(nlohmann::json::parse(R"({"points": [[0,0],[1,0]], "w": 5})")), Error);
  EXPECT_THROW(marked_points_from_json(nlohmann::json::parse(R"([[0]])")), Error);
}

TEST(Io, ReadJsonFile) {
  const fs::path dir = scratch("io");
  std::ofstream(dir / "ok.json") << R"({"a": 1})";
  std::ofstream(dir / "bad.json") << "{";
  EXPECT_EQ(read_json_file((dir / "ok.json").string())["a"], 1);
  EXPECT_THROW(read_json_file((dir / "bad.json").string()), Error);
  EXPECT_THROW(read_json_file((dir / "missing.json").string()), Error);
}

TEST(Io, ModulusCsvAppend) {
  const fs::path p = scratch("csv") / "m.csv";
  ModulusEstimate m;
  m.value = 0.5;
  m.residual = 1e-12;
  append_modulus_csv(p.string(), "round", 512, m);
  m.lower_biased = true;
  append_modulus_csv(p.string(), "cloud", 1024, m);
  const std::string s = slurp(p);
  EXPECT_EQ(s.rfind(modulus_csv_header(), 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
  EXPECT_NE(s.find("round,512,0.5,"), std::string::npos);
}

TEST(Io, AsymptoticCsv) {
  const auto t = asymptotic_check({1e3, 1e6}, 2);
  const std::string s = asymptotic_csv(t);
  EXPECT_EQ(s.substr(0, s.find('\n')), "s,d_star,modulus_bound,length_lower,ratio_to_lnln");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
