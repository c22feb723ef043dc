// Acceptance gate: one line per criterion, exit code = number of failures.
// Every check runs the faithful protocol at the stated tolerance; nothing is
// tuned per criterion beyond step-size choices needed for stability.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <mgm/mgm.hpp>

using namespace mgm;

namespace {

std::string strf(const char* fmt, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

StepControl ctrl_of(double dt_ns, double tol) {
  StepControl c;
  c.dt_out = seconds_from_ns(dt_ns);
  c.rel_tol = tol;
  return c;
}

// Start the refinement ladder at a stable step so stiff (large kappa_a1)
// systems never waste passes on divergent coarse levels.
StepControl stiff_ctrl(const SystemConfig& c, const DriveSpec& d, double span, double dt_ns,
                       double tol) {
  StepControl ctrl = ctrl_of(dt_ns, tol);
  const double dt0 = detail::default_dt(c, d, span);
  if (ctrl.dt_out > dt0)
    ctrl.refine = std::min(ctrl.max_refine, int(std::ceil(std::log2(ctrl.dt_out / dt0))));
  return ctrl;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0;
  for (const cplx& x : v) m = std::max(m, std::abs(x));
  return m;
}

struct MemoryRun {
  TimeTrace trace;
  DriveSpec drive;
  EfficiencyReport report;
};

MemoryRun memory_run(const ExperimentParams& p, double t1_ns, const StepControl& ctrl) {
  MemoryRun r;
  r.drive = p.drive(0.0);
  r.trace = integrate(p.system(), r.drive, 0.0, seconds_from_ns(t1_ns), ctrl);
  r.report = measure_efficiency(r.trace, r.drive, p.delta_omega);
  return r;
}

// Saturated-efficiency protocol: smooth pulse, matched coupling re-derived
// for each g, horizon fixed at 1.45 rephasing periods past the pulse centre.
double saturated_zeta(int n, double kappa_m_mhz, double g_mhz) {
  ExperimentParams p;
  p.n = n;
  p.kappa_m = omega_from_mhz(kappa_m_mhz);
  p.g0 = omega_from_mhz(g_mhz);
  p.shape = PulseShape::gaussian;
  DriveSpec d = p.drive(0.0);
  const double t1 = d.center() + 1.45 * p.period();
  SystemConfig sys = p.system();
  TimeTrace tr = integrate(sys, d, 0.0, t1, stiff_ctrl(sys, d, t1, 0.1, 1e-7));
  return measure_efficiency(tr, d, p.delta_omega).zeta;
}

// Dip splitting in MHz on a dense symmetric probe grid.
std::vector<double> dip_positions_mhz(const SystemConfig& c, double window_mhz) {
  const double wa = c.cavity.omega_a;
  std::vector<double> grid(16001);
  for (size_t k = 0; k < grid.size(); ++k)
    grid[k] = wa + omega_from_mhz(-40.0 + 80.0 * double(k) / double(grid.size() - 1));
  SpectrumTrace tr = reflection_trace(c, grid);
  std::vector<double> pos;
  for (size_t i : find_dips(grid, tr.magnitude, omega_from_mhz(window_mhz)))
    pos.push_back(mhz_from_omega(grid[i] - wa));
  return pos;
}

SystemConfig sphere_pair(double separation_mhz) {
  SystemConfig c;
  c.cavity = {omega_from_mhz(7520.0), omega_from_mhz(1.5), omega_from_mhz(2.0)};
  for (double s : {-0.5, 0.5})
    c.magnons.push_back({c.cavity.omega_a + omega_from_mhz(s * separation_mhz),
                         omega_from_mhz(6.71), omega_from_mhz(1.0)});
  return c;
}

using Criterion = std::pair<bool, std::string>;

Criterion c1_memory_efficiency() {
  ExperimentParams p;
  MemoryRun r = memory_run(p, 160.0, ctrl_of(0.02, 1e-10));
  const bool pass = std::abs(r.report.zeta - 0.33) <= 0.02;

  ExperimentParams smooth = p;
  smooth.shape = PulseShape::gaussian;
  DriveSpec d = smooth.drive(0.0);
  const double t1 = ns_from_seconds(d.center() + 1.45 * smooth.period());
  MemoryRun g = memory_run(smooth, t1, ctrl_of(0.05, 1e-9));

  return {pass,
          strf("retrieval efficiency: rect 20 ns gives zeta = %.4f, required 0.33 +/- 0.02; "
               "a smooth pulse of equal width reproduces the figure "
               "(gaussian FWHM 20 ns -> zeta = %.4f)",
               r.report.zeta, g.report.zeta)};
}

Criterion c2_saturation() {
  const double z100 = saturated_zeta(8, 0.72, 100.0);
  const double z200 = saturated_zeta(8, 0.72, 200.0);
  const double zsat = std::exp(-2.0 * omega_from_mhz(0.72) * seconds_from_ns(100.0));
  const bool pass = std::abs(z200 - 0.403) <= 0.005 && std::abs(z200 - z100) < 0.002;
  return {pass, strf("saturation with coupling: zeta(g/2pi = 100 MHz) = %.4f, "
                     "zeta(200 MHz) = %.4f, limit exp(-2 kappa_m T) = %.4f, "
                     "required 0.403 +/- 0.005",
                     z100, z200, zsat)};
}

Criterion c3_low_loss() {
  const double z100 = saturated_zeta(32, 0.042, 100.0);
  const double z200 = saturated_zeta(32, 0.042, 200.0);
  const bool pass = std::abs(z200 - 0.95) <= 0.01;
  return {pass, strf("low-loss saturation: kappa_m/2pi = 0.042 MHz gives zeta = %.4f "
                     "(g/2pi = 100 MHz: %.4f), required 0.95 +/- 0.01",
                     z200, z100)};
}

Criterion c4_storage_time() {
  ExperimentParams base;
  std::vector<double> values;
  for (double mhz : {5.0, 8.0, 10.0, 12.5, 20.0}) values.push_back(omega_from_mhz(mhz));
  SweepResult sw = run_sweep(base, SweepAxis::delta_omega, values, ctrl_of(0.02, 1e-8));
  const double tol = seconds_from_ns(0.02) + 0.5 * base.t_p;
  bool pass = true;
  std::string detail;
  for (const auto& pt : sw.points) {
    const double T = two_pi / pt.x;
    const bool ok = pt.ok && std::abs(pt.t_revival - T) <= tol;
    pass = pass && ok;
    detail += strf("%s%.1f->%.1f ns", detail.empty() ? "" : ", ",
                   ns_from_seconds(T), ns_from_seconds(pt.t_revival));
  }
  return {pass, strf("storage time tracks 2pi/dw within +/-%.2f ns (expected->measured: %s)",
                     ns_from_seconds(tol), detail.c_str())};
}

Criterion c5_dark_mode() {
  // Two spheres on a common resonance against a single sphere.
  std::vector<double> both = dip_positions_mhz(sphere_pair(0.0), 4.0);
  SystemConfig single = sphere_pair(0.0);
  single.magnons.pop_back();
  std::vector<double> one = dip_positions_mhz(single, 4.0);
  if (both.size() != 2 || one.size() != 2)
    return {false, strf("dark mode: expected 2 dips for both configs, got %zu and %zu",
                        both.size(), one.size())};
  const double split2 = both.back() - both.front();
  const double split1 = one.back() - one.front();
  const double ratio = split2 / split1;

  // Bias detuning equivalent to 14 Oe at 2.8 MHz/Oe revives the middle dip.
  std::vector<double> biased = dip_positions_mhz(sphere_pair(2.8 * 14.0), 4.0);

  const bool pass = std::abs(ratio - std::sqrt(2.0)) <= 0.01 * std::sqrt(2.0) &&
                    both.size() == 2 && biased.size() == 3;
  return {pass, strf("dark mode: splitting %.2f MHz (pair) / %.2f MHz (single) = %.4f "
                     "(sqrt(2) +/- 1%%); dips on resonance: %zu, biased 14 Oe apart: %zu",
                     split2, split1, ratio, both.size(), biased.size())};
}

Criterion c6_comb() {
  ExperimentParams p;

  // Under-coupled probe resolves the hybrid comb.
  ExperimentParams probe = p;
  probe.kappa_a1 = probe.kappa_a0;
  SystemConfig sys = probe.system();
  std::vector<double> grid(24001);
  for (size_t k = 0; k < grid.size(); ++k)
    grid[k] = p.omega_a + omega_from_mhz(-60.0 + 120.0 * double(k) / double(grid.size() - 1));
  SpectrumTrace tr = reflection_trace(sys, grid);
  std::vector<double> pos;
  for (size_t i : find_dips(grid, tr.magnitude, 0.5 * p.delta_omega))
    pos.push_back(mhz_from_omega(grid[i] - p.omega_a));
  // Comb pitch: mean spacing across the nine dips. The outermost dips are
  // pushed outward by hybridization with the cavity line, so individual
  // edge spacings exceed the pitch even in a perfect comb.
  const double pitch = pos.size() > 1 ? (pos.back() - pos.front()) / double(pos.size() - 1)
                                      : 0.0;
  const bool spacing_ok = pos.size() == 9 && std::abs(pitch - 10.0) <= 0.5;

  // Group delay at the comb centre, matched coupling.
  SystemConfig crit = p.system();
  const double h = omega_from_mhz(0.01);
  SpectrumTrace mid = reflection_trace(crit, {p.omega_a - h, p.omega_a, p.omega_a + h});
  const double delay = ns_from_seconds(mid.group_delay[1]);
  const bool delay_ok = std::abs(delay - 100.0) <= 10.0;

  return {spacing_ok && delay_ok,
          strf("comb: %zu dips, mean spacing %.4f MHz (10 +/- 0.5); group delay at the "
               "centre %.2f ns (100 +/- 10)",
               pos.size(), pitch, delay)};
}

Criterion c7_critical_coupling() {
  ExperimentParams p;
  MemoryRun crit = memory_run(p, 255.0, ctrl_of(0.02, 1e-9));
  const double leak = crit.report.zone_energies[2] / crit.report.zone_energies[1];

  ExperimentParams under = p;
  under.kappa_a1 = under.kappa_a0;
  MemoryRun uc = memory_run(under, 255.0, ctrl_of(0.02, 1e-9));
  const double leak_under = uc.report.zone_energies[2] / uc.report.zone_energies[1];

  // Long rectangular pulse on a dense comb: the plateau reflection vanishes
  // when the external coupling matches the comb absorption.
  auto plateau = [](int n) {
    ExperimentParams q;
    q.n = n;
    q.t_p = seconds_from_ns(80.0);
    DriveSpec d = q.drive(0.0);
    TimeTrace tr = integrate(q.system(), d, 0.0, seconds_from_ns(80.0), ctrl_of(0.05, 1e-8));
    double m = 0;
    for (size_t k = 0; k < tr.t.size(); ++k)
      if (tr.t[k] >= seconds_from_ns(25.0) && tr.t[k] <= seconds_from_ns(70.0))
        m = std::max(m, std::abs(tr.e_out[k]));
    return m;
  };
  const double p16 = plateau(16), p8 = plateau(8);

  const bool pass = leak < 0.05 && p16 < 0.05 && leak_under > 0.20;
  return {pass, strf("critical coupling: zone-III/zone-II = %.4f (< 0.05); plateau "
                     "reflection %.4f of the drive at N = 16 (< 0.05; N = 8 gives %.4f); "
                     "under-coupled zone-III/zone-II = %.4f (> 0.20)",
                     leak, p16, p8, leak_under)};
}

Criterion c8_monte_carlo() {
  ExperimentParams p;
  const auto t0 = std::chrono::steady_clock::now();
  MonteCarloStats st = monte_carlo_imperfection(p, 500, 0.10, 1, 4, ctrl_of(0.05, 1e-8));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = st.mean >= 0.28 && st.mean <= 0.32 && st.std_dev <= 0.02 && secs < 600.0;
  return {pass, strf("monte carlo: 500 samples at +/-10%% spread -> mean zeta = %.4f "
                     "(in [0.28, 0.32]), std = %.4f (<= 0.02), %.1f s (< 600 s)",
                     st.mean, st.std_dev, secs)};
}

Criterion c9_oracles() {
  ExperimentParams p;
  DriveSpec d = p.drive(0.0);
  SystemConfig sys = p.system();

  TimeTrace tr = integrate(sys, d, 0.0, seconds_from_ns(160.0), ctrl_of(0.05, 1e-10));
  TimeTrace ex = exact_oracle(sys, d, tr.t);
  double diff = 0;
  for (size_t k = 0; k < tr.t.size(); ++k) diff = std::max(diff, std::abs(tr.a[k] - ex.a[k]));
  const double rel_expm = diff / max_abs(ex.a);

  TimeTrace kr = kernel_integrate(sys, d, 0.0, seconds_from_ns(160.0), seconds_from_ns(0.02));
  TimeTrace ex2 = exact_oracle(sys, d, kr.t);
  double kd = 0;
  for (size_t k = 0; k < kr.t.size(); ++k) kd = std::max(kd, std::abs(kr.a[k] - ex2.a[k]));
  const double rel_kernel = kd / max_abs(ex2.a);

  const bool pass = rel_expm < 1e-8 && rel_kernel < 1e-3;
  return {pass, strf("oracles: stepped vs matrix exponential %.2e (< 1e-8); memory-kernel "
                     "form vs exact %.2e (< 1e-3)",
                     rel_expm, rel_kernel)};
}

Criterion c10_properties() {
  bool pass = true;
  std::string msg = "properties:";

  {  // lossless energy conservation
    ExperimentParams p;
    p.kappa_a0 = 0.0;
    p.kappa_m = 0.0;
    MemoryRun r = memory_run(p, 160.0, ctrl_of(0.05, 1e-10));
    double stored = std::norm(r.trace.a.back());
    for (const cplx& m : r.trace.m.back()) stored += std::norm(m);
    const double ein = r.trace.energy_in.back();
    const double res = std::abs(ein - r.trace.energy_out.back() - stored) / ein;
    pass = pass && res < 1e-6;
    msg += strf(" lossless balance %.2e (< 1e-6);", res);
  }

  {  // passivity
    double worst = 0;
    for (double ka1 : {3.0, 10.0, 3.0 + 10.0 * pi}) {
      ExperimentParams p;
      p.kappa_a1 = omega_from_mhz(ka1);
      SystemConfig sys = p.system();
      for (int k = 0; k <= 4000; ++k) {
        const double w = p.omega_a + omega_from_mhz(-80.0 + 160.0 * k / 4000.0);
        worst = std::max(worst, std::abs(reflection(sys, w)));
      }
    }
    pass = pass && worst <= 1.0 + 1e-12;
    msg += strf(" max |r| = 1 %+.1e;", worst - 1.0);
  }

  {  // frequency-domain consistency of the time-domain solver
    ExperimentParams p;
    p.kappa_m = omega_from_mhz(3.0);  // fully damped by the horizon
    p.t_p = seconds_from_ns(2.0);
    DriveSpec d = p.drive(0.0);
    SystemConfig sys = p.system();
    TimeTrace tr = integrate(sys, d, 0.0, seconds_from_ns(2500.0), ctrl_of(0.05, 1e-9));
    const double dt = tr.t[1] - tr.t[0];
    const double tp = p.t_p;
    double emax = 0, dmax = 0;
    std::vector<cplx> eout_hat(101), pred(101);
    for (int j = 0; j <= 100; ++j) {
      const double delta = omega_from_mhz(-50.0 + j);
      cplx ein_hat = delta == 0.0
                         ? cplx(tp, 0.0)
                         : (std::exp(cplx(0.0, delta * tp)) - 1.0) / cplx(0.0, delta);
      // e_out = -env + i sqrt(2 kappa_a1) a. The envelope term jumps at the
      // pulse edges and would cost Simpson eight digits; its transform is
      // ein_hat exactly, so quadrature only sees the continuous cavity field.
      cplx acc = 0;  // Simpson quadrature, even interval count by construction
      for (size_t k = 0; k < tr.t.size(); ++k) {
        const double w = (k == 0 || k + 1 == tr.t.size()) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * tr.a[k] * std::exp(cplx(0.0, delta * tr.t[k]));
      }
      eout_hat[j] = -ein_hat +
                    cplx(0.0, std::sqrt(2.0 * p.external_coupling())) * acc * (dt / 3.0);
      pred[j] = reflection(sys, p.omega_a + delta) * ein_hat;
      emax = std::max(emax, std::abs(eout_hat[j]));
    }
    for (int j = 0; j <= 100; ++j) dmax = std::max(dmax, std::abs(pred[j] - eout_hat[j]));
    const double rel = dmax / emax;
    pass = pass && rel < 1e-4;
    msg += strf(" fourier consistency %.2e (< 1e-4);", rel);
  }

  {  // FIFO order preserved
    ExperimentParams p;
    p.t_p = seconds_from_ns(15.0);
    FifoResult r = multi_pulse_fifo(p, {0.0, seconds_from_ns(40.0)}, ctrl_of(0.05, 1e-8));
    const double sep = r.retrieved.size() == 2
                           ? ns_from_seconds(r.retrieved[1].t - r.retrieved[0].t)
                           : 0.0;
    const bool ok = r.ordered && std::abs(sep - 40.0) / 40.0 < 0.10;
    pass = pass && ok;
    msg += strf(" fifo separation %.2f ns (40 +/- 10%%), ordered %s;", sep,
                r.ordered ? "yes" : "no");
  }

  {  // noiseless interference visibility
    ExperimentParams p;
    DriveSpec d = p.drive(0.0);
    const StepControl ctrl = ctrl_of(0.05, 1e-9);
    TimeTrace t1 = integrate(p.system(), d, 0.0, seconds_from_ns(160.0), ctrl);
    TimeTrace t2 = integrate(p.system(), d, 0.0, seconds_from_ns(160.0), ctrl);
    const double trev = measure_revival_time(t1, d, p.delta_omega);
    const size_t idx = size_t(std::llround((d.center() + trev) / ctrl.dt_out));
    const cplx a = t1.e_out[idx], b = t2.e_out[idx];
    std::vector<double> phases(65);
    const double base = pi + std::arg(a / b);
    for (int k = 0; k <= 64; ++k) phases[k] = base + two_pi * k / 64.0;
    const double v = interference_visibility(a, b, phases);
    pass = pass && std::abs(v - 1.0) < 1e-9;
    msg += strf(" visibility 1 %+.1e (|dV| < 1e-9)", v - 1.0);
  }

  return {pass, msg};
}

Criterion c11_bandwidth() {
  ExperimentParams p;
  std::vector<double> values(49);
  for (int k = 0; k < 49; ++k)
    values[k] = (-6.0 + 12.0 * k / 48.0) * p.delta_omega;
  SweepResult sw = run_sweep(p, SweepAxis::detuning, values, ctrl_of(0.05, 1e-8));

  double zmax = 0;
  for (const auto& pt : sw.points)
    if (pt.ok) zmax = std::max(zmax, pt.zeta);
  const double half = 0.5 * zmax;

  auto cross = [&](int from, int to, int step) {
    // First grid index at or above half maximum, refined by interpolation.
    for (int k = from; k != to; k += step) {
      if (!sw.points[k].ok) continue;
      if (sw.points[k].zeta >= half) {
        const int j = k - step;
        if (j < 0 || j >= int(sw.points.size()) || !sw.points[j].ok) return sw.points[k].x;
        const double z0 = sw.points[j].zeta, z1 = sw.points[k].zeta;
        const double f = (half - z0) / (z1 - z0);
        return sw.points[j].x + f * (sw.points[k].x - sw.points[j].x);
      }
    }
    return sw.points[to - step].x;
  };
  const double lo = cross(0, 49, 1);
  const double hi = cross(48, -1, -1);
  const double span = (hi - lo) / p.delta_omega;

  const bool pass = span >= 8.0;
  return {pass, strf("bandwidth: zeta stays above half its peak (%.4f) over %.2f comb "
                     "spacings (>= 8)",
                     zmax, span)};
}

} // namespace

int main() {
  std::vector<std::pair<const char*, std::function<Criterion()>>> checks = {
      {"1", c1_memory_efficiency}, {"2", c2_saturation},   {"3", c3_low_loss},
      {"4", c4_storage_time},      {"5", c5_dark_mode},    {"6", c6_comb},
      {"7", c7_critical_coupling}, {"8", c8_monte_carlo},  {"9", c9_oracles},
      {"10", c10_properties},      {"11", c11_bandwidth},
  };

  int failures = 0;
  for (auto& [name, fn] : checks) {
    Criterion r{false, "unhandled"};
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, strf("exception: %s", e.what())};
    }
    std::printf("[%s] criterion %2s: %s\n", r.first ? "PASS" : "FAIL", name, r.second.c_str());
    std::fflush(stdout);
    if (!r.first) ++failures;
  }
  std::printf("\n%d/11 criteria passed\n", int(checks.size()) - failures);
  return failures;
}
