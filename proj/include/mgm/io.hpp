#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "experiments.hpp"

// Plain-text configuration (key = value with optional [section] headers) and
// CSV output. All file-facing numbers are cyclic MHz, ns, and Oe; conversion
// to the internal angular rad/s happens here and nowhere else.

namespace mgm {

struct RunOptions {
  double t0 = 0;                         // s
  double t1 = seconds_from_ns(160.0);    // s
  StepControl ctrl;
  int samples = 500;
  double spread = 0.10;
  std::uint64_t seed = 1;
  int workers = 1;
  SweepAxis axis = SweepAxis::delta_omega;
  double axis_start = 5.0;  // file units: MHz for frequency axes, a count for N
  double axis_stop = 20.0;
  int axis_points = 16;
  double omega_start = -omega_from_mhz(60.0);  // probe grid, relative to omega_a
  double omega_stop = omega_from_mhz(60.0);
  int omega_points = 2401;
};

struct FieldSweepOptions {
  FieldMap map{two_pi * 2.8e6, 0.0, 0.0};  // gamma in rad/s per Oe
  FieldAxis axis = FieldAxis::H0;
  double start = 0, stop = 0;  // Oe
  int points = 0;
  bool h0_set = false, deltaH_set = false, range_set = false;
};

struct Config {
  ExperimentParams params;
  std::vector<Pulse> pulses;  // empty: one pulse from params at t = 0
  RunOptions run;
  FieldSweepOptions field;

  DriveSpec drive() const {
    if (pulses.empty()) return params.drive(0.0);
    DriveSpec d;
    d.pulses = pulses;
    d.omega_l = params.omega_a + params.detuning;
    return d;
  }

  // Field map defaults: the comb recreates the baseline frequencies.
  FieldMap resolved_field() const {
    FieldMap m = field.map;
    if (!field.h0_set) m.H0 = params.omega_a / m.gamma;
    if (!field.deltaH_set) m.deltaH = params.delta_omega / m.gamma;
    return m;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& v, const std::string& key, int line) {
  size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("parse error at line " + std::to_string(line) + ": '" + v +
                             "' is not a number for key '" + key + "'");
  }
  if (pos != v.size())
    throw std::runtime_error("parse error at line " + std::to_string(line) +
                             ": trailing characters after number in '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& v, const std::string& key, int line) {
  const double x = parse_double(v, key, line);
  const long long i = std::llround(x);
  if (double(i) != x)
    throw std::runtime_error("parse error at line " + std::to_string(line) + ": '" + v +
                             "' is not an integer for key '" + key + "'");
  return i;
}

} // namespace detail

// key = value per line; '#' or ';' starts a comment; [pulse], [pulse2], ...,
// [run] and [field] sections. Unknown keys are rejected. Defaults reproduce
// the baseline experiment.
inline Config load_config(std::istream& in) {
  Config cfg;
  std::string section;
  int pulse_idx = -1;
  bool coupling_critical = true;
  double kappa_a1 = -1;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const size_t hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']')
        throw std::runtime_error("parse error at line " + std::to_string(line) +
                                 ": unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section == "system") {
        section.clear();
      } else if (section == "pulse" || (section.rfind("pulse", 0) == 0 &&
                                        section.size() > 5 &&
                                        std::isdigit((unsigned char)section[5]))) {
        cfg.pulses.push_back({PulseShape::rectangular, 0.0, cfg.params.t_p, 1.0});
        pulse_idx = int(cfg.pulses.size()) - 1;
        section = "pulse";
      } else if (section != "run" && section != "field") {
        throw std::runtime_error("parse error at line " + std::to_string(line) +
                                 ": unknown section '" + section + "'");
      }
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("parse error at line " + std::to_string(line) +
                               ": expected key = value");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::runtime_error("parse error at line " + std::to_string(line) +
                               ": empty key or value");

    auto num = [&]() { return detail::parse_double(val, key, line); };
    auto integer = [&]() { return detail::parse_int(val, key, line); };
    auto unknown = [&]() {
      throw std::invalid_argument("unknown key '" + key + "' at line " + std::to_string(line));
    };

    if (section.empty()) {
      if (key == "label") cfg.params.label = val;
      else if (key == "N") cfg.params.n = int(integer());
      else if (key == "omega_a_MHz") cfg.params.omega_a = omega_from_mhz(num());
      else if (key == "g0_MHz") cfg.params.g0 = omega_from_mhz(num());
      else if (key == "dw_MHz") cfg.params.delta_omega = omega_from_mhz(num());
      else if (key == "kappa_a0_MHz") cfg.params.kappa_a0 = omega_from_mhz(num());
      else if (key == "kappa_m_MHz") cfg.params.kappa_m = omega_from_mhz(num());
      else if (key == "kappa_a1_MHz") { kappa_a1 = omega_from_mhz(num()); coupling_critical = false; }
      else if (key == "coupling") {
        if (val == "critical") coupling_critical = true;
        else throw std::invalid_argument("field coupling: expected 'critical', got '" + val + "'");
      }
      else if (key == "detuning_MHz") cfg.params.detuning = omega_from_mhz(num());
      else unknown();
    } else if (section == "pulse") {
      Pulse& p = cfg.pulses[pulse_idx];
      if (key == "shape") {
        if (val == "rect") p.shape = PulseShape::rectangular;
        else if (val == "gaussian") p.shape = PulseShape::gaussian;
        else throw std::invalid_argument("field shape: expected rect or gaussian, got '" + val + "'");
      }
      else if (key == "t_start_ns") p.t_start = seconds_from_ns(num());
      else if (key == "t_p_ns") p.t_p = seconds_from_ns(num());
      else if (key == "amplitude") p.amplitude = num();
      else unknown();
    } else if (section == "run") {
      if (key == "t0_ns") cfg.run.t0 = seconds_from_ns(num());
      else if (key == "t1_ns") cfg.run.t1 = seconds_from_ns(num());
      else if (key == "dt_out_ns") cfg.run.ctrl.dt_out = seconds_from_ns(num());
      else if (key == "rel_tol") cfg.run.ctrl.rel_tol = num();
      else if (key == "max_refine") cfg.run.ctrl.max_refine = int(integer());
      else if (key == "samples") cfg.run.samples = int(integer());
      else if (key == "spread") cfg.run.spread = num();
      else if (key == "seed") cfg.run.seed = std::uint64_t(integer());
      else if (key == "workers") cfg.run.workers = int(integer());
      else if (key == "axis") {
        if (val == "delta_omega") cfg.run.axis = SweepAxis::delta_omega;
        else if (val == "g0") cfg.run.axis = SweepAxis::coupling;
        else if (val == "kappa_m") cfg.run.axis = SweepAxis::kappa_m;
        else if (val == "N") cfg.run.axis = SweepAxis::mode_count;
        else if (val == "detuning") cfg.run.axis = SweepAxis::detuning;
        else throw std::invalid_argument("field axis: unknown sweep axis '" + val + "'");
      }
      else if (key == "axis_start") cfg.run.axis_start = num();
      else if (key == "axis_stop") cfg.run.axis_stop = num();
      else if (key == "axis_points") cfg.run.axis_points = int(integer());
      else if (key == "omega_start_MHz") cfg.run.omega_start = omega_from_mhz(num());
      else if (key == "omega_stop_MHz") cfg.run.omega_stop = omega_from_mhz(num());
      else if (key == "omega_points") cfg.run.omega_points = int(integer());
      else unknown();
    } else {  // field
      if (key == "gamma_MHz_per_Oe") cfg.field.map.gamma = omega_from_mhz(num());
      else if (key == "H0_Oe") { cfg.field.map.H0 = num(); cfg.field.h0_set = true; }
      else if (key == "deltaH_Oe") { cfg.field.map.deltaH = num(); cfg.field.deltaH_set = true; }
      else if (key == "axis") {
        if (val == "H0") cfg.field.axis = FieldAxis::H0;
        else if (val == "deltaH") cfg.field.axis = FieldAxis::deltaH;
        else throw std::invalid_argument("field axis: expected H0 or deltaH, got '" + val + "'");
      }
      else if (key == "start_Oe") { cfg.field.start = num(); cfg.field.range_set = true; }
      else if (key == "stop_Oe") { cfg.field.stop = num(); cfg.field.range_set = true; }
      else if (key == "points") cfg.field.points = int(integer());
      else unknown();
    }
  }

  if (!coupling_critical) cfg.params.kappa_a1 = kappa_a1;

  // Validation, naming the offending field.
  if (cfg.params.n < 1) throw std::invalid_argument("field N: must be at least 1");
  if (cfg.params.omega_a <= 0) throw std::invalid_argument("field omega_a_MHz: must be positive");
  if (cfg.params.g0 < 0) throw std::invalid_argument("field g0_MHz: must be nonnegative");
  if (cfg.params.delta_omega <= 0) throw std::invalid_argument("field dw_MHz: must be positive");
  if (cfg.params.kappa_a0 < 0) throw std::invalid_argument("field kappa_a0_MHz: must be nonnegative");
  if (cfg.params.kappa_m < 0) throw std::invalid_argument("field kappa_m_MHz: must be nonnegative");
  if (!coupling_critical && kappa_a1 < 0)
    throw std::invalid_argument("field kappa_a1_MHz: must be nonnegative");
  for (const auto& p : cfg.pulses)
    if (p.t_p <= 0) throw std::invalid_argument("field t_p_ns: must be positive");
  if (!(cfg.run.t1 > cfg.run.t0)) throw std::invalid_argument("field t1_ns: must exceed t0_ns");
  if (cfg.run.ctrl.dt_out < 0) throw std::invalid_argument("field dt_out_ns: must be nonnegative");
  if (cfg.run.ctrl.rel_tol <= 0) throw std::invalid_argument("field rel_tol: must be positive");
  if (cfg.run.samples < 1) throw std::invalid_argument("field samples: must be at least 1");
  if (cfg.run.spread < 0 || cfg.run.spread >= 1)
    throw std::invalid_argument("field spread: must be in [0, 1)");
  if (cfg.run.workers < 1) throw std::invalid_argument("field workers: must be at least 1");
  if (cfg.run.axis_points < 1) throw std::invalid_argument("field axis_points: must be at least 1");
  if (cfg.run.omega_points < 2) throw std::invalid_argument("field omega_points: must be at least 2");
  if (cfg.field.map.gamma <= 0)
    throw std::invalid_argument("field gamma_MHz_per_Oe: must be positive");
  if (cfg.field.range_set && cfg.field.points < 1)
    throw std::invalid_argument("field points: must be at least 1");
  return cfg;
}

inline Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return load_config(in);
}

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace detail

// '# key = value' metadata block: version, units, and the resolved
// configuration the numbers were produced from.
inline std::vector<std::string> metadata_lines(const Config& cfg) {
  std::vector<std::string> m;
  m.push_back("mgm version = " + std::string(version));
  m.push_back("units: frequencies cyclic MHz, times ns, fields Oe");
  const auto& p = cfg.params;
  m.push_back("label = " + (p.label.empty() ? std::string("(none)") : p.label));
  m.push_back("N = " + std::to_string(p.n));
  m.push_back("omega_a_MHz = " + detail::fmt17(mhz_from_omega(p.omega_a)));
  m.push_back("g0_MHz = " + detail::fmt17(mhz_from_omega(p.g0)));
  m.push_back("dw_MHz = " + detail::fmt17(mhz_from_omega(p.delta_omega)));
  m.push_back("kappa_a0_MHz = " + detail::fmt17(mhz_from_omega(p.kappa_a0)));
  m.push_back("kappa_m_MHz = " + detail::fmt17(mhz_from_omega(p.kappa_m)));
  m.push_back("kappa_a1_MHz = " + detail::fmt17(mhz_from_omega(p.external_coupling())) +
              (p.kappa_a1 < 0 ? " (matched)" : ""));
  m.push_back("detuning_MHz = " + detail::fmt17(mhz_from_omega(p.detuning)));
  int k = 0;
  for (const auto& pl : cfg.drive().pulses) {
    ++k;
    m.push_back("pulse" + std::to_string(k) + ": shape = " +
                (pl.shape == PulseShape::rectangular ? "rect" : "gaussian") +
                ", t_start_ns = " + detail::fmt17(ns_from_seconds(pl.t_start)) +
                ", t_p_ns = " + detail::fmt17(ns_from_seconds(pl.t_p)) +
                ", amplitude = " + detail::fmt17(pl.amplitude));
  }
  m.push_back("seed = " + std::to_string(cfg.run.seed));
  return m;
}

inline void write_metadata(std::ostream& os, const std::vector<std::string>& meta) {
  for (const auto& s : meta) os << "# " << s << "\n";
}

// t_ns, cavity quadratures, detected intensity, output field, then one
// re/im column pair per magnon mode.
inline void write_time_trace(std::ostream& os, const TimeTrace& tr,
                             const std::vector<std::string>& meta = {}) {
  write_metadata(os, meta);
  const int n = tr.m.empty() ? 0 : int(tr.m.front().size());
  os << "t_ns,re_a,im_a,intensity,re_Eout,im_Eout";
  for (int j = 1; j <= n; ++j) os << ",re_m" << j << ",im_m" << j;
  os << "\n";
  for (size_t k = 0; k < tr.t.size(); ++k) {
    os << detail::fmt17(ns_from_seconds(tr.t[k])) << ',' << detail::fmt17(tr.a[k].real())
       << ',' << detail::fmt17(tr.a[k].imag()) << ',' << detail::fmt17(tr.intensity[k])
       << ',' << detail::fmt17(tr.e_out[k].real()) << ',' << detail::fmt17(tr.e_out[k].imag());
    for (int j = 0; j < n; ++j)
      os << ',' << detail::fmt17(tr.m[k][j].real()) << ',' << detail::fmt17(tr.m[k][j].imag());
    os << "\n";
  }
}

inline void write_spectrum(std::ostream& os, const SpectrumTrace& tr, double omega_ref,
                           const std::vector<std::string>& meta = {}) {
  write_metadata(os, meta);
  os << "detuning_MHz,re_r,im_r,magnitude,phase_rad,group_delay_ns\n";
  for (size_t k = 0; k < tr.omega_grid.size(); ++k)
    os << detail::fmt17(mhz_from_omega(tr.omega_grid[k] - omega_ref)) << ','
       << detail::fmt17(tr.r[k].real()) << ',' << detail::fmt17(tr.r[k].imag()) << ','
       << detail::fmt17(tr.magnitude[k]) << ',' << detail::fmt17(tr.phase[k]) << ','
       << detail::fmt17(ns_from_seconds(tr.group_delay[k])) << "\n";
}

// Long form: one row per (bias value, probe frequency) pair.
inline void write_sweep_map(std::ostream& os, const SweepMap& map, double omega_ref,
                            const std::vector<std::string>& meta = {}) {
  write_metadata(os, meta);
  os << map.axis << "_Oe,detuning_MHz,magnitude\n";
  for (size_t i = 0; i < map.x.size(); ++i)
    for (size_t k = 0; k < map.omega_grid.size(); ++k)
      os << detail::fmt17(map.x[i]) << ','
         << detail::fmt17(mhz_from_omega(map.omega_grid[k] - omega_ref)) << ','
         << detail::fmt17(map.magnitude[i][k]) << "\n";
}

inline void write_sweep_result(std::ostream& os, const SweepResult& sw,
                               const std::vector<std::string>& meta = {}) {
  write_metadata(os, meta);
  os << sw.axis_name << ",zeta,t_revival_ns,zone1,zone2,zone3,ok,error\n";
  for (const auto& pt : sw.points) {
    const bool hz = sw.axis != SweepAxis::mode_count;
    os << detail::fmt17(hz ? mhz_from_omega(pt.x) : pt.x) << ','
       << detail::fmt17(pt.zeta) << ',' << detail::fmt17(ns_from_seconds(pt.t_revival))
       << ',' << detail::fmt17(pt.report.zone_energies[0]) << ','
       << detail::fmt17(pt.report.zone_energies[1]) << ','
       << detail::fmt17(pt.report.zone_energies[2]) << ',' << (pt.ok ? 1 : 0) << ','
       << (pt.error.empty() ? "-" : pt.error) << "\n";
  }
}

// One row per sample; the moments land in a '#' footer so the column data
// stays rectangular.
inline void write_monte_carlo(std::ostream& os, const MonteCarloStats& st,
                              const std::vector<std::string>& meta = {}) {
  write_metadata(os, meta);
  os << "sample,zeta\n";
  for (size_t i = 0; i < st.zeta.size(); ++i)
    os << i << ',' << detail::fmt17(st.zeta[i]) << "\n";
  os << "# samples = " << st.samples << "\n";
  os << "# mean = " << detail::fmt17(st.mean) << "\n";
  os << "# std = " << detail::fmt17(st.std_dev) << "\n";
  os << "# seed = " << st.seed << "\n";
  os << "# spread = " << detail::fmt17(st.spread) << "\n";
}

inline void write_feasibility(std::ostream& os, const std::vector<FeasibilityRow>& rows,
                              const std::vector<std::string>& meta = {}) {
  write_metadata(os, meta);
  os << "constraint,lhs,rhs,ratio,strict,pass_weak,pass\n";
  for (const auto& r : rows)
    os << r.name << ',' << detail::fmt17(r.lhs) << ',' << detail::fmt17(r.rhs) << ','
       << detail::fmt17(r.ratio) << ',' << (r.strict ? 1 : 0) << ','
       << (r.pass_weak ? 1 : 0) << ',' << (r.pass ? 1 : 0) << "\n";
}

struct CsvTable {
  std::vector<std::string> comments;  // '#' lines, stripped of the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.push_back(detail::trim(line.substr(1)));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) t.header = std::move(cells);
    else t.rows.push_back(std::move(cells));
  }
  return t;
}

} // namespace mgm
