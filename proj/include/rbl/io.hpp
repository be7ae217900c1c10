#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rbl/bounds.hpp"
#include "rbl/cache.hpp"
#include "rbl/error.hpp"
#include "rbl/extremal.hpp"
#include "rbl/hyperbolic.hpp"
#include "rbl/modulus.hpp"
#include "rbl/quad_dynamics.hpp"

namespace rbl {

inline nlohmann::json points_json(const std::vector<Point>& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& z : pts) a.push_back({z.real(), z.imag()});
  return a;
}

inline Point point_from_json(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorKind::io,
          "expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Point> points_from_json(const nlohmann::json& j) {
  require(j.is_array(), ErrorKind::io, "expected an array of points");
  std::vector<Point> pts;
  for (const auto& e : j) pts.push_back(point_from_json(e));
  return pts;
}

/// Array of [re, im] pairs. The entry "inf" (or the first entry, when no "inf" is
/// present) is alpha; `w`, if given, indexes the distinguished point among the rest.
inline MarkedPointSet marked_points_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("points") : j;
  require(arr.is_array() && !arr.empty(), ErrorKind::io, "point set must be a non-empty array");
  MarkedPointSet P;
  std::size_t alpha_at = 0;
  for (std::size_t k = 0; k < arr.size(); ++k)
    if (arr[k].is_string()) {
      require(arr[k] == "inf", ErrorKind::io, "only the string \"inf\" may stand for a point");
      alpha_at = k;
    }
  P.alpha = arr[alpha_at].is_string() ? SpherePoint::inf() : SpherePoint::at(point_from_json(arr[alpha_at]));
  for (std::size_t k = 0; k < arr.size(); ++k)
    if (k != alpha_at) P.satellites.push_back(point_from_json(arr[k]));
  if (j.is_object() && j.contains("w")) {
    const auto w = j.at("w").get<std::size_t>();
    require(w < P.satellites.size(), ErrorKind::io, "w index out of range");
    P.external = P.satellites[w];
  }
  return P;
}

inline nlohmann::json to_json(const MarkedPointSet& P) {
  nlohmann::json arr = nlohmann::json::array();
  if (P.alpha.infinite)
    arr.push_back("inf");
  else
    arr.push_back({P.alpha.z.real(), P.alpha.z.imag()});
  for (const auto& z : P.satellites) arr.push_back({z.real(), z.imag()});
  if (!P.external) return arr;
  const auto it = std::find(P.satellites.begin(), P.satellites.end(), *P.external);
  if (it == P.satellites.end()) {
    arr.push_back({P.external->real(), P.external->imag()});
    return {{"points", arr}, {"w", P.satellites.size()}};
  }
  return {{"points", arr}, {"w", it - P.satellites.begin()}};
}

inline nlohmann::json to_json(const AnnularDomain& d) {
  nlohmann::json j{{"outer", points_json(d.outer)}};
  if (d.has_cloud())
    j["inner_cloud"] = {{"points", points_json(d.inner_cloud().points)}, {"fat", d.inner_cloud().fat}};
  else
    j["inner_polygon"] = points_json(d.inner_polygon());
  return j;
}

inline AnnularDomain annular_domain_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("outer"), ErrorKind::io, "annular domain needs \"outer\"");
  AnnularDomain d;
  d.outer = points_from_json(j.at("outer"));
  const bool poly = j.contains("inner_polygon"), cloud = j.contains("inner_cloud");
  require(poly != cloud, ErrorKind::io, "annular domain needs exactly one of inner_polygon, inner_cloud");
  if (poly) {
    d.inner = points_from_json(j.at("inner_polygon"));
  } else {
    const auto& c = j.at("inner_cloud");
    d.inner = PointCloud{points_from_json(c.at("points")), c.at("fat").get<double>()};
  }
  return d;
}

inline std::string restriction_file_name(const PLRestriction& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "pl_c%.12g_%.12g_q%d.json", r.c.real(), r.c.imag(), r.rot.q());
  return buf;
}

inline nlohmann::json to_json(const PLRestriction& r) {
  nlohmann::json j{{"c", {r.c.real(), r.c.imag()}},
                   {"p", r.rot.p()},
                   {"q", r.rot.q()},
                   {"d_star", r.d_star},
                   {"alpha", {r.alpha.real(), r.alpha.imag()}},
                   {"alpha_multiplier", {r.alpha_multiplier.real(), r.alpha_multiplier.imag()}},
                   {"V", points_json(r.V)},
                   {"U", points_json(r.U)},
                   {"U_half", points_json(r.U_half)},
                   {"K_samples", points_json(r.K_samples)},
                   {"sample_cell", r.sample_cell},
                   {"nesting_gap", r.nesting_gap},
                   {"s", r.s},
                   {"r_base", r.r_base},
                   {"v_policy", r.v_policy}};
  if (r.V_disk) j["V_disk"] = {{"center", {r.V_disk->center.real(), r.V_disk->center.imag()}}, {"radius", r.V_disk->radius}};
  return j;
}

inline PLRestriction restriction_from_json(const nlohmann::json& j) {
  try {
    PLRestriction r;
    r.c = point_from_json(j.at("c"));
    r.rot = RotationNumber(j.at("p").get<int>(), j.at("q").get<int>());
    r.d_star = j.at("d_star");
    r.alpha = point_from_json(j.at("alpha"));
    r.alpha_multiplier = point_from_json(j.at("alpha_multiplier"));
    r.V = points_from_json(j.at("V"));
    r.U = points_from_json(j.at("U"));
    r.U_half = points_from_json(j.at("U_half"));
    r.K_samples = points_from_json(j.at("K_samples"));
    r.sample_cell = j.at("sample_cell");
    r.nesting_gap = j.at("nesting_gap");
    r.s = j.at("s");
    r.r_base = j.at("r_base");
    r.v_policy = j.at("v_policy");
    if (j.contains("V_disk")) r.V_disk = Disk{point_from_json(j["V_disk"].at("center")), j["V_disk"].at("radius")};
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, std::string("bad restriction record: ") + e.what());
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, path + ": " + e.what());
  }
}

inline std::string modulus_csv_header() { return "domain_id,grid,modulus,residual,lower_biased\n"; }

inline std::string modulus_csv_row(const std::string& id, int grid, const ModulusEstimate& m) {
  return id + "," + std::to_string(grid) + "," + fmt12(m.value) + "," + fmt12(m.residual) + "," +
         (m.lower_biased ? "true" : "false") + "\n";
}

/// Appends one row, writing the header when the file is new.
inline void append_modulus_csv(const std::string& path, const std::string& id, int grid, const ModulusEstimate& m) {
  std::string text;
  {
    std::ifstream in(path);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
  }
  if (text.empty()) text = modulus_csv_header();
  atomic_write(path, text + modulus_csv_row(id, grid, m));
}

inline std::string asymptotic_csv(const AsymptoticTable& t) {
  std::string s = "s,d_star,modulus_bound,length_lower,ratio_to_lnln\n";
  for (const auto& r : t.rows)
    s += fmt12(r.s) + "," + std::to_string(r.d_star) + "," + fmt12(r.modulus_bound) + "," + fmt12(r.length_lower) +
         "," + fmt12(r.ratio_to_lnln) + "\n";
  return s;
}

}  // namespace rbl
