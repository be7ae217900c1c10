#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "rbl/bounds.hpp"
#include "rbl/error.hpp"
#include "rbl/lavaurs.hpp"

namespace rbl {

/// One row of the contrast table. Satellite rows carry (measured modulus, bound);
/// Lavaurs rows carry (diam L_N, threshold * diam L_*).
struct ContrastRow {
  std::string family;
  int index = 0;
  int q = 0;
  double value = 0;
  double reference = 0;
  bool holds = false;
};

struct ContrastReport {
  std::vector<ContrastRow> rows;
  bool satellite_bound_decreasing = false;
  bool satellite_dominated = false;
  bool lavaurs_bounded_below = false;
  double threshold = 0.5;
};

inline ContrastReport contrast_report(const std::vector<BoundReport>& sweep,
                                                const std::vector<ApproxResult>& lavaurs, double threshold = 0.5) {
  require(!sweep.empty(), ErrorKind::report, "contrast report needs satellite sweep rows");
  require(!lavaurs.empty(), ErrorKind::report, "contrast report needs Lavaurs rows");
  ContrastReport rep;
  rep.threshold = threshold;
  rep.satellite_bound_decreasing = true;
  rep.satellite_dominated = true;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const BoundReport& r = sweep[k];
    rep.rows.push_back({"satellite", r.p, r.q, r.measured.value, r.bound, r.passed});
    rep.satellite_dominated = rep.satellite_dominated && r.passed;
    if (k > 0) rep.satellite_bound_decreasing = rep.satellite_bound_decreasing && r.bound < sweep[k - 1].bound;
  }
  rep.lavaurs_bounded_below = true;
  for (const auto& a : lavaurs) {
    const double ref = threshold * a.diam_L_star;
    rep.rows.push_back({"lavaurs", a.N, a.q, a.diam_L, ref, a.diam_L >= ref});
    rep.lavaurs_bounded_below = rep.lavaurs_bounded_below && a.diam_L >= ref;
  }
  return rep;
}

inline std::string contrast_csv(const ContrastReport& rep) {
  std::string s = "family,index,q,value,reference,holds\n";
  for (const auto& r : rep.rows)
    s += r.family + "," + std::to_string(r.index) + "," + std::to_string(r.q) + "," + fmt12(r.value) + "," +
         fmt12(r.reference) + "," + (r.holds ? "true" : "false") + "\n";
  return s;
}

inline std::vector<ContrastRow> contrast_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == "family,index,q,value,reference,holds",
          ErrorKind::report, "bad contrast header");
  std::vector<ContrastRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    require(f.size() == 6, ErrorKind::report, "bad contrast row: " + line);
    require(f[5] == "true" || f[5] == "false", ErrorKind::report, "bad holds flag: " + f[5]);
    try {
      rows.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3]), std::stod(f[4]), f[5] == "true"});
    } catch (const std::exception&) {
      fail(ErrorKind::report, "bad number in contrast row: " + line);
    }
  }
  return rows;
}

/// Side-by-side text table.
inline std::string contrast_table(const ContrastReport& rep) {
  char buf[160];
  std::string s;
  std::snprintf(buf, sizeof buf, "%-10s %6s %5s %16s %16s %6s\n", "family", "index", "q", "value", "reference",
                "holds");
  s += buf;
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%-10s %6d %5d %16.12g %16.12g %6s\n", r.family.c_str(), r.index, r.q, r.value,
                  r.reference, r.holds ? "yes" : "no");
    s += buf;
  }
  s += "satellite bound decreasing: " + std::string(rep.satellite_bound_decreasing ? "yes" : "no") + "\n";
  s += "satellite moduli below bound: " + std::string(rep.satellite_dominated ? "yes" : "no") + "\n";
  s += "Lavaurs diam(L_N) >= " + fmt12(rep.threshold) + " diam(L_*): " +
       std::string(rep.lavaurs_bounded_below ? "yes" : "no") + "\n";
  return s;
}

}  // namespace rbl
