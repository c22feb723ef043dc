#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"

// Command-line front end. Every subcommand reads the same config format,
// writes one CSV, and prints a short summary. Exit codes: 0 success,
// 1 configuration or validation error, 2 numerical failure, 64 usage error.

namespace mgm {

namespace detail {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / double(n - 1);
  return v;
}

inline std::string default_out(const std::string& name) {
  const char* dir = std::getenv("MGM_OUT_DIR");
  return std::string(dir && *dir ? dir : ".") + "/" + name + ".csv";
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot open output file '" + path + "'");
  return os;
}

} // namespace detail

inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
  CLI::App app{"cavity magnonics: gradient-memory spectra, dynamics, and studies"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed_flag = 0;
  int workers_flag = 0;
  bool seed_set = false, workers_set = false;
  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--out", out_path, "output CSV path (default: $MGM_OUT_DIR or .)");
  app.add_option("--seed", seed_flag, "override the run seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--workers", workers_flag, "override the worker count")
      ->each([&](const std::string&) { workers_set = true; });

  auto* c_spectrum = app.add_subcommand("spectrum", "reflection spectrum on the probe grid");
  auto* c_field = app.add_subcommand("sweep-field", "reflection map versus bias field");
  auto* c_dyn = app.add_subcommand("dynamics", "time-domain trace for the configured drive");
  auto* c_mem = app.add_subcommand("memory", "storage-retrieval run with efficiency report");
  auto* c_sweep = app.add_subcommand("sweep", "efficiency versus one model parameter");
  auto* c_mc = app.add_subcommand("montecarlo", "efficiency under random imperfections");
  auto* c_design = app.add_subcommand("design", "derived design quantities");
  auto* c_feas = app.add_subcommand("feasibility", "parameter-hierarchy report");
  auto* c_cmp = app.add_subcommand("compare", "gradient comb versus random frequencies");
  for (auto* sc : {c_spectrum, c_field, c_dyn, c_mem, c_sweep, c_mc, c_design, c_feas, c_cmp})
    sc->fallthrough();

  std::vector<std::string> rev;
  rev.push_back("mgm");
  for (const auto& a : args) rev.push_back(a);
  std::vector<const char*> argv;
  for (const auto& a : rev) argv.push_back(a.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 64;
  }

  Config cfg;
  try {
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (seed_set) cfg.run.seed = seed_flag;
    if (workers_set) {
      if (workers_flag < 1) throw std::invalid_argument("field workers: must be at least 1");
      cfg.run.workers = workers_flag;
    }
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    auto meta = metadata_lines(cfg);
    const ExperimentParams& p = cfg.params;

    if (*c_spectrum) {
      if (out_path.empty()) out_path = detail::default_out("spectrum");
      auto grid = detail::linspace(p.omega_a + cfg.run.omega_start,
                                   p.omega_a + cfg.run.omega_stop, cfg.run.omega_points);
      SystemConfig sys = p.system();
      SpectrumTrace tr = reflection_trace(sys, grid);
      auto dips = find_dips(grid, tr.magnitude, 0.5 * p.delta_omega);
      auto os = detail::open_out(out_path);
      write_spectrum(os, tr, p.omega_a, meta);
      out << "spectrum: " << grid.size() << " points, " << dips.size() << " dips -> "
          << out_path << "\n";
    } else if (*c_field) {
      if (out_path.empty()) out_path = detail::default_out("sweep_field");
      if (!cfg.field.range_set || cfg.field.points < 1)
        throw std::invalid_argument("field start_Oe/stop_Oe/points: required for sweep-field");
      auto grid = detail::linspace(p.omega_a + cfg.run.omega_start,
                                   p.omega_a + cfg.run.omega_stop, cfg.run.omega_points);
      SweepMap map = bias_sweep_map(p.system(), cfg.resolved_field(), cfg.field.axis,
                                    detail::linspace(cfg.field.start, cfg.field.stop,
                                                     cfg.field.points),
                                    grid);
      auto os = detail::open_out(out_path);
      write_sweep_map(os, map, p.omega_a, meta);
      out << "sweep-field: " << map.x.size() << " bias points -> " << out_path << "\n";
    } else if (*c_dyn) {
      if (out_path.empty()) out_path = detail::default_out("dynamics");
      DriveSpec d = cfg.drive();
      TimeTrace tr = integrate(p.system(), d, cfg.run.t0, cfg.run.t1, cfg.run.ctrl);
      const double stored = [&] {
        double s = std::norm(tr.a.back());
        for (const auto& mm : tr.m.back()) s += std::norm(mm);
        return s;
      }();
      const double ein = tr.energy_in.back();
      const double bal = ein > 0
          ? std::abs(ein - tr.energy_out.back() - tr.energy_diss.back() - stored) / ein
          : 0.0;
      auto os = detail::open_out(out_path);
      write_time_trace(os, tr, meta);
      out << "dynamics: " << tr.t.size() << " samples, energy balance residual " << bal
          << " -> " << out_path << "\n";
    } else if (*c_mem) {
      if (out_path.empty()) out_path = detail::default_out("memory");
      DriveSpec d = cfg.drive();
      TimeTrace tr = integrate(p.system(), d, cfg.run.t0, cfg.run.t1, cfg.run.ctrl);
      EfficiencyReport rep = measure_efficiency(tr, d, p.delta_omega);
      const double trev = measure_revival_time(tr, d, p.delta_omega);
      auto m2 = meta;
      m2.push_back("zeta = " + detail::fmt17(rep.zeta));
      m2.push_back("t_revival_ns = " + detail::fmt17(ns_from_seconds(trev)));
      m2.push_back("zone_energies = " + detail::fmt17(rep.zone_energies[0]) + ", " +
                   detail::fmt17(rep.zone_energies[1]) + ", " +
                   detail::fmt17(rep.zone_energies[2]));
      auto os = detail::open_out(out_path);
      write_time_trace(os, tr, m2);
      out << "memory: zeta = " << rep.zeta << ", revival at "
          << ns_from_seconds(trev) << " ns after the pulse centre -> " << out_path << "\n";
    } else if (*c_sweep) {
      if (out_path.empty()) out_path = detail::default_out("sweep");
      auto raw = detail::linspace(cfg.run.axis_start, cfg.run.axis_stop, cfg.run.axis_points);
      if (cfg.run.axis != SweepAxis::mode_count)
        for (double& v : raw) v = omega_from_mhz(v);
      SweepResult sw = run_sweep(p, cfg.run.axis, raw, cfg.run.ctrl);
      int nok = 0;
      for (const auto& pt : sw.points) nok += pt.ok;
      auto os = detail::open_out(out_path);
      write_sweep_result(os, sw, meta);
      out << "sweep over " << sw.axis_name << ": " << nok << "/" << sw.points.size()
          << " points ok -> " << out_path << "\n";
    } else if (*c_mc) {
      if (out_path.empty()) out_path = detail::default_out("montecarlo");
      MonteCarloStats st = monte_carlo_imperfection(p, cfg.run.samples, cfg.run.spread,
                                                    cfg.run.seed, cfg.run.workers,
                                                    cfg.run.ctrl);
      auto os = detail::open_out(out_path);
      write_monte_carlo(os, st, meta);
      out << "montecarlo: " << st.samples << " samples, mean zeta = " << st.mean
          << ", std = " << st.std_dev << " -> " << out_path << "\n";
    } else if (*c_design) {
      if (out_path.empty()) out_path = detail::default_out("design");
      SystemConfig sys = p.system();
      CriticalKappa ck = critical_kappa(sys, p.delta_omega);
      ClosedFormEfficiency cf =
          efficiency_closed_form(p.g0, p.delta_omega, p.kappa_a0, p.kappa_m, p.t_p);
      CollectiveBasis basis = collective_basis(sys);
      auto os = detail::open_out(out_path);
      write_metadata(os, meta);
      os << "quantity,value\n";
      os << "period_ns," << detail::fmt17(ns_from_seconds(two_pi / p.delta_omega)) << "\n";
      os << "kappa_a1_matched_MHz," << detail::fmt17(mhz_from_omega(ck.matched)) << "\n";
      os << "kappa_a1_lossless_MHz," << detail::fmt17(mhz_from_omega(ck.lossless)) << "\n";
      os << "zeta_closed_form," << detail::fmt17(cf.zeta) << "\n";
      os << "finesse," << detail::fmt17(cf.finesse) << "\n";
      os << "cooperativity," << detail::fmt17(cf.cooperativity) << "\n";
      os << "gain," << detail::fmt17(cf.gain) << "\n";
      os << "bright_enhancement," << detail::fmt17(basis.enhancement) << "\n";
      out << "design: matched kappa_a1 = " << mhz_from_omega(ck.matched)
          << " MHz, closed-form zeta = " << cf.zeta << " -> " << out_path << "\n";
    } else if (*c_feas) {
      if (out_path.empty()) out_path = detail::default_out("feasibility");
      auto rows = feasibility_check(p.system(), p.delta_omega);
      auto os = detail::open_out(out_path);
      write_feasibility(os, rows, meta);
      for (const auto& r : rows)
        out << (r.pass ? "PASS " : r.pass_weak ? "WEAK " : "FAIL ") << r.name
            << " (ratio " << r.ratio << ")\n";
      out << "feasibility -> " << out_path << "\n";
    } else if (*c_cmp) {
      if (out_path.empty()) out_path = detail::default_out("compare");
      CompareResult cr = uniform_vs_random_compare(p, cfg.run.seed, cfg.run.ctrl);
      auto m2 = meta;
      std::string offs;
      for (double o : cr.random_offsets)
        offs += (offs.empty() ? "" : ", ") + detail::fmt17(mhz_from_omega(o));
      m2.push_back("random_offsets_MHz = " + offs);
      auto os = detail::open_out(out_path);
      write_metadata(os, m2);
      os << "zeta_uniform,zeta_random,zone2_uniform,zone2_random,ratio\n";
      os << detail::fmt17(cr.zeta_uniform) << ',' << detail::fmt17(cr.zeta_random) << ','
         << detail::fmt17(cr.zone2_uniform) << ',' << detail::fmt17(cr.zone2_random) << ','
         << detail::fmt17(cr.ratio) << "\n";
      out << "compare: zone-II ratio (comb/random) = " << cr.ratio << " -> " << out_path
          << "\n";
    }
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_dispatch(args, std::cout, std::cerr);
}

} // namespace mgm
