#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rbl/bounds.hpp"
#include "rbl/cache.hpp"
#include "rbl/hyperbolic.hpp"
#include "rbl/io.hpp"
#include "rbl/lavaurs.hpp"
#include "rbl/report.hpp"
#include "rbl/specfun.hpp"

using namespace rbl;

namespace {

constexpr const char* kVersion = "0.1.0";

void print_kv(const std::string& key, double v) { std::cout << key << " " << fmt12(v) << "\n"; }

struct Global {
  std::string record;
  unsigned long long seed = 1;
  std::vector<std::string> outputs;
};

int run_specfun(const std::string& fn, double arg) {
  double v = 0;
  if (fn == "mu")
    v = grotzsch_mu(arg);
  else if (fn == "elliptic-k")
    v = elliptic_k(arg);
  else if (fn == "tau-inv")
    v = tau_inv(EpsilonValue(arg)).value();
  else if (fn == "tau")
    v = tau(ModulusValue(arg)).value();
  else if (fn == "tau-lower")
    v = tau_lower(ModulusValue(arg)).value();
  else if (fn == "psi")
    v = psi(ModulusValue(arg));
  else if (fn == "psi-inv")
    v = psi_inv(arg).value();
  else
    throw CLI::ValidationError("--fn", "unknown function " + fn);
  std::cout << fmt12(v) << "\n";
  return 0;
}

void write_text(Global& g, const std::string& path, const std::string& text) {
  atomic_write(path, text);
  g.outputs.push_back(path);
}

void print_report(const BoundReport& r) {
  std::cout << (r.case_id.empty() ? "case" : r.case_id) << " s=" << r.s << " d*=" << r.d_star
            << " measured=" << fmt12(r.measured.value) << " bound=" << fmt12(r.bound)
            << " margin=" << fmt12(r.margin) << " passed=" << (r.passed ? "true" : "false") << "\n";
  if (!r.error.empty()) std::cout << "error: " << r.error << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalization bounds: moduli, satellite sweeps and the Lavaurs example"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value file; flags on the command line take precedence");
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "seed for randomized checks");
  app.add_option("--record", g.record, "write a JSON run record to this path");

  std::string fn = "tau-inv";
  double arg = 1;
  auto* sf = app.add_subcommand("specfun", "evaluate a special function");
  sf->add_option("--fn", fn, "mu, elliptic-k, tau-inv, tau, tau-lower, psi, psi-inv")->required();
  sf->add_option("--arg", arg, "argument")->required();

  std::string domain_path, csv_path;
  std::vector<double> round_rR;
  double teich = 0;
  int grid = 1024;
  auto* mo = app.add_subcommand("modulus", "modulus of an annular domain");
  auto* mo_src = mo->add_option_group("source");
  mo_src->add_option("--domain", domain_path, "annular domain JSON");
  mo_src->add_option("--round", round_rR, "r R of a concentric round annulus")->expected(2);
  mo_src->add_option("--teichmuller", teich, "epsilon of a Teichmuller ring");
  mo_src->require_option(1);
  mo->add_option("--grid", grid, "grid intervals");
  mo->add_option("--csv", csv_path, "append the estimate to a CSV file");

  std::string points_path;
  int w_index = -1, random_sets = 0, random_size = 5;
  auto* vs = app.add_subcommand("verify-static", "round-annulus probes of the static bound");
  auto* vs_src = vs->add_option_group("source");
  vs_src->add_option("--points", points_path, "marked point set JSON");
  vs_src->add_option("--random", random_sets, "number of random point sets");
  vs_src->require_option(1);
  vs->add_option("--w", w_index, "index of w among the finite points (default: all)");
  vs->add_option("--size", random_size, "points per random set")->check(CLI::Range(3, 1000));

  int p = 1, q = 2;
  std::string out_dir;
  double eps_fat = 0;
  auto* sat = app.add_subcommand("satellite", "build the PL restriction at a satellite center and verify the bound");
  sat->add_option("--p", p, "rotation numerator");
  sat->add_option("--q", q, "rotation denominator")->required();
  sat->add_option("--grid", grid, "grid intervals");
  sat->add_option("--eps-fat", eps_fat, "obstacle fattening; 0 picks two cells");
  sat->add_option("--out", out_dir, "directory for the restriction and report JSON");

  int num = 1, den_from = 2, den_to = 8, jobs = 1;
  std::string sweep_out, sweep_svg;
  bool no_cache = false;
  auto* sw = app.add_subcommand("sweep", "verify the bound at satellite centers num/q");
  sw->add_option("--num", num, "numerator");
  sw->add_option("--den-from", den_from, "first denominator");
  sw->add_option("--den-to", den_to, "last denominator");
  sw->add_option("--grid", grid, "grid intervals");
  sw->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sw->add_option("--out", sweep_out, "CSV output");
  sw->add_option("--svg", sweep_svg, "SVG chart output");
  sw->add_flag("--no-cache", no_cache, "ignore RBL_CACHE_DIR");

  double s_val = 5;
  int dstar = 2;
  std::vector<double> s_grid;
  std::string hyp_out;
  auto* hy = app.add_subcommand("hyperbolic", "geodesic length bound");
  hy->add_option("--s", s_val, "number of small Julia sets");
  hy->add_option("--dstar", dstar, "degree d*")->check(CLI::PositiveNumber);
  hy->add_option("--asymptotic", s_grid, "increasing s grid for the ln ln s table");
  hy->add_option("--out", hyp_out, "CSV output for the asymptotic table");

  std::vector<int> Ns;
  double sigma_star = 0, max_dev = 0.05;
  std::string lav_out;
  auto* lv = app.add_subcommand("lavaurs", "parabolic model, Lavaurs phases and approximating parameters");
  lv->add_option("--N", Ns, "N values for approximating parameters");
  lv->add_option("--sigma-star", sigma_star, "Lavaurs phase; default just above sigma_Ch");
  lv->add_option("--max-deviation", max_dev, "approximation threshold");
  lv->add_option("--out", lav_out, "JSON output");

  std::string rep_out;
  double threshold = 0.5;
  std::vector<int> rep_Ns{40, 80};
  auto* rp = app.add_subcommand("report", "satellite sweep next to the Lavaurs sequence");
  rp->add_option("--num", num, "numerator");
  rp->add_option("--den-from", den_from, "first denominator");
  rp->add_option("--den-to", den_to, "last denominator");
  rp->add_option("--grid", grid, "grid intervals");
  rp->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  rp->add_option("--N", rep_Ns, "Lavaurs N values");
  rp->add_option("--threshold", threshold, "diam(L_N) / diam(L_*) threshold");
  rp->add_option("--out", rep_out, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_name() == "RequiredError" || e.get_name() == "ExtrasError") std::cerr << app.help();
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int status = 0;
  try {
    if (*sf) {
      status = run_specfun(fn, arg);
    } else if (*mo) {
      AnnularDomain d;
      std::string id;
      if (!domain_path.empty())
        d = annular_domain_from_json(read_json_file(domain_path)), id = domain_path;
      else if (!round_rR.empty())
        d = round_annulus(0, round_rR[0], round_rR[1]), id = "round";
      else
        d = teichmuller_ring(EpsilonValue(teich)), id = "teichmuller";
      const auto est = compute_modulus(d, grid);
      print_kv("modulus", est.value);
      print_kv("residual", est.residual);
      std::cout << "lower_biased " << (est.lower_biased ? "true" : "false") << "\n";
      if (!round_rR.empty()) print_kv("exact", round_modulus(round_rR[0], round_rR[1]));
      if (teich > 0) print_kv("exact", tau_inv(EpsilonValue(teich)).value());
      if (!csv_path.empty()) append_modulus_csv(csv_path, id, grid, est), g.outputs.push_back(csv_path);
    } else if (*vs) {
      std::vector<MarkedPointSet> sets;
      if (!points_path.empty()) {
        sets.push_back(marked_points_from_json(read_json_file(points_path)));
      } else {
        std::mt19937_64 rng(g.seed);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int k = 0; k < random_sets; ++k) {
          MarkedPointSet P;
          while (static_cast<int>(P.satellites.size()) < random_size) P.satellites.emplace_back(u(rng), u(rng));
          sets.push_back(P);
        }
      }
      bool all = true;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        const auto pts = sets[k].finite_points();
        require(w_index < static_cast<int>(pts.size()), ErrorKind::domain, "--w out of range");
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (w_index >= 0 && static_cast<int>(i) != w_index) continue;
          BoundReport r = verify_static_round(sets[k], pts[i]);
          r.case_id = "set" + std::to_string(k) + "_w" + std::to_string(i);
          all = all && r.passed;
          if (!points_path.empty()) print_report(r);
        }
      }
      std::cout << "sets " << sets.size() << " all_passed " << (all ? "true" : "false") << "\n";
      status = all ? 0 : 1;
    } else if (*sat) {
      const RotationNumber rot(p, q);
      const PLRestriction r = build_pl_restriction(rot);
      MainOptions opt;
      opt.grid = grid;
      opt.eps_fat = eps_fat;
      const BoundReport rep = verify_main(r, opt);
      std::cout << "c " << fmt12(r.c.real()) << " " << fmt12(r.c.imag()) << "\n";
      print_report(rep);
      if (!out_dir.empty()) {
        write_text(g, out_dir + "/" + restriction_file_name(r), to_json(r).dump(1));
        write_text(g, out_dir + "/report_" + std::to_string(p) + "_" + std::to_string(q) + ".json",
                   to_json(rep).dump(1));
      }
      status = rep.passed ? 0 : 1;
    } else if (*sw) {
      SweepOptions opt;
      opt.num = num, opt.den_from = den_from, opt.den_to = den_to, opt.jobs = jobs;
      opt.main.grid = grid;
      if (!no_cache) opt.cache = Cache::from_env();
      const SweepResult res = sweep_satellites(opt);
      for (const auto& s : res.skipped) std::cout << "skipped " << s << "\n";
      for (const auto& r : res.reports) print_report(r);
      std::cout << "cache_hits " << res.cache_hits << "\n";
      std::cout << "bounds_decreasing " << (res.bounds_decreasing ? "true" : "false") << "\n";
      if (!sweep_out.empty()) write_text(g, sweep_out, sweep_csv(res.reports));
      if (!sweep_svg.empty() && !res.reports.empty()) {
        ChartOptions co;
        co.title = "measured modulus and bound";
        co.x_label = "q";
        co.y_label = "modulus";
        co.log_y = true;
        emit_svg(sweep_series(res.reports), sweep_svg, co);
        g.outputs.push_back(sweep_svg);
      }
      bool ok = res.bounds_decreasing;
      for (const auto& r : res.reports) ok = ok && r.passed;
      status = ok ? 0 : 1;
    } else if (*hy) {
      if (s_grid.empty()) {
        const LengthBound b = length_lower_bound(s_val, dstar);
        print_kv("modulus_bound", b.modulus_bound);
        print_kv("length_lower", b.length_lower);
        const auto iv = annulus_modulus_interval(b.length_lower);
        print_kv("interval_lo", iv.lo);
        print_kv("interval_hi", iv.hi);
      } else {
        const AsymptoticTable t = asymptotic_check(s_grid, dstar);
        const std::string csv = asymptotic_csv(t);
        std::cout << csv;
        std::cout << "ratios_in_window " << (t.ratios_in_window ? "true" : "false") << "\n";
        std::cout << "eventually_monotone " << (t.eventually_monotone ? "true" : "false") << "\n";
        if (!hyp_out.empty()) write_text(g, hyp_out, csv);
      }
    } else if (*lv) {
      const LavaursModel m = build_model();
      const SigmaParams sp = find_sigma_params(m);
      const double ss = sigma_star != 0 ? sigma_star : default_sigma_star(sp);
      print_kv("a", m.a);
      print_kv("x0", m.x0);
      print_kv("A", m.A);
      print_kv("B", m.B);
      print_kv("sigma0", sp.sigma0);
      print_kv("sigma_ch", sp.sigma_ch);
      print_kv("sigma_star", ss);
      nlohmann::json j{{"model", to_json(m)}, {"sigma", to_json(sp)}, {"sigma_star", ss}};
      nlohmann::json seq = nlohmann::json::array();
      for (const auto& o : approximate_sequence(m, sp, ss, Ns, max_dev)) {
        if (o.result) {
          const auto& r = *o.result;
          std::cout << "N " << r.N << " q " << r.q << " a " << fmt12(r.a) << " deviation " << fmt12(r.deviation)
                    << " diam_L " << fmt12(r.diam_L) << " diam_L_star " << fmt12(r.diam_L_star) << "\n";
          seq.push_back(to_json(r));
        } else {
          std::cout << "N " << o.N << " error " << o.error << "\n";
          seq.push_back({{"N", o.N}, {"error", o.error}});
          status = 1;
        }
      }
      j["approximations"] = seq;
      if (!lav_out.empty()) write_text(g, lav_out, j.dump(1));
    } else if (*rp) {
      SweepOptions opt;
      opt.num = num, opt.den_from = den_from, opt.den_to = den_to, opt.jobs = jobs;
      opt.main.grid = grid;
      opt.cache = Cache::from_env();
      const SweepResult res = sweep_satellites(opt);
      const LavaursModel m = build_model();
      const SigmaParams sp = find_sigma_params(m);
      std::vector<ApproxResult> lav;
      for (const auto& o : approximate_sequence(m, sp, default_sigma_star(sp), rep_Ns)) {
        if (o.result)
          lav.push_back(*o.result);
        else
          std::cerr << "N " << o.N << ": " << o.error << "\n";
      }
      const ContrastReport rep = contrast_report(res.reports, lav, threshold);
      std::cout << contrast_table(rep);
      if (!rep_out.empty()) write_text(g, rep_out, contrast_csv(rep));
      status = rep.satellite_bound_decreasing && rep.satellite_dominated && rep.lavaurs_bounded_below ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    status = 1;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = 1;
  }

  if (!g.record.empty()) {
    std::ostringstream cmd;
    for (int k = 0; k < argc; ++k) cmd << (k ? " " : "") << argv[k];
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto* sub : app.get_subcommands())
      for (const auto* opt : sub->get_options())
        if (opt->count() > 0) inputs[opt->get_name()] = opt->as<std::string>();
    inputs["seed"] = g.seed;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const nlohmann::json rec{{"command", cmd.str()},     {"input_hash", Cache::key_of(inputs)},
                             {"outputs", g.outputs},     {"wall_time_s", wall},
                             {"version", kVersion},      {"status", status}};
    atomic_write(g.record, rec.dump(1));
  }
  return status;
}
