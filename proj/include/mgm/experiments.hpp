#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "spectrum.hpp"

// Canned studies on the gradient memory: parameter sweeps, imperfection
// Monte Carlo, multi-pulse FIFO retrieval, and comb-versus-random
// comparisons. All of them run the time-domain integrator and score the
// first revival with measure_efficiency.

namespace mgm {

// Baseline parameter set used across the studies; matches the canonical
// eight-sphere configuration. kappa_a1 < 0 means "derive the matched value
// kappa_a0 + pi g0^2 / delta_omega".
struct ExperimentParams {
  int n = 8;
  double omega_a = omega_from_mhz(7520.0);
  double g0 = omega_from_mhz(10.0);
  double delta_omega = omega_from_mhz(10.0);
  double kappa_m = omega_from_mhz(0.72);
  double kappa_a0 = omega_from_mhz(3.0);
  double kappa_a1 = -1.0;
  PulseShape shape = PulseShape::rectangular;
  double t_p = seconds_from_ns(20.0);
  double amplitude = 1.0;
  double detuning = 0.0;  // drive carrier minus cavity resonance (rad/s)
  std::string label;

  double period() const {
    if (delta_omega <= 0) throw std::invalid_argument("degenerate gradient");
    return two_pi / delta_omega;
  }

  double external_coupling() const {
    if (kappa_a1 >= 0) return kappa_a1;
    if (delta_omega <= 0) throw std::invalid_argument("degenerate gradient");
    return kappa_a0 + pi * g0 * g0 / delta_omega;
  }

  SystemConfig system() const {
    SystemConfig c = build_gradient_system(n, omega_a, delta_omega, g0, kappa_m,
                                           kappa_a0, external_coupling());
    c.label = label;
    return c;
  }

  DriveSpec drive(double t_start = 0.0) const {
    DriveSpec d;
    d.pulses.push_back({shape, t_start, t_p, amplitude});
    d.omega_l = omega_a + detuning;
    return d;
  }
};

// Delay of the zone-II intensity peak relative to the drive-envelope centre.
inline double measure_revival_time(const TimeTrace& tr, const DriveSpec& drive,
                                   double delta_omega) {
  if (delta_omega <= 0) throw std::invalid_argument("degenerate gradient");
  const double T = two_pi / delta_omega, c = drive.center();
  const double lo = c + 0.6 * T, hi = c + 1.4 * T;
  if (tr.t.empty() || tr.t.front() > lo + 1e-12 || tr.t.back() < hi - 1e-12)
    throw std::invalid_argument("trace does not cover the retrieval zone");
  double best = -1.0, tb = c;
  for (size_t k = 0; k < tr.t.size(); ++k) {
    if (tr.t[k] < lo || tr.t[k] > hi) continue;
    if (tr.intensity[k] > best) { best = tr.intensity[k]; tb = tr.t[k]; }
  }
  if (best <= 0) throw std::runtime_error("no revival signal");
  return tb - c;
}

enum class SweepAxis { delta_omega, coupling, kappa_m, mode_count, detuning };

inline const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::delta_omega: return "delta_omega";
    case SweepAxis::coupling: return "g0";
    case SweepAxis::kappa_m: return "kappa_m";
    case SweepAxis::mode_count: return "N";
    case SweepAxis::detuning: return "detuning";
  }
  return "";
}

struct SweepPoint {
  double x = 0;
  double zeta = 0;
  double t_revival = 0;  // s
  EfficiencyReport report;
  bool ok = false;
  std::string error;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::delta_omega;
  std::string axis_name;
  std::vector<SweepPoint> points;
};

// One storage-retrieval run per axis value. The matched external coupling is
// re-derived at every point unless the baseline pins kappa_a1 explicitly.
// Failed points are marked and carried along rather than aborting the sweep.
inline SweepResult run_sweep(const ExperimentParams& base, SweepAxis axis,
                             const std::vector<double>& values,
                             const StepControl& ctrl = {}) {
  SweepResult out;
  out.axis = axis;
  out.axis_name = sweep_axis_name(axis);
  for (double v : values) {
    SweepPoint pt;
    pt.x = v;
    try {
      ExperimentParams p = base;
      switch (axis) {
        case SweepAxis::delta_omega: p.delta_omega = v; break;
        case SweepAxis::coupling: p.g0 = v; break;
        case SweepAxis::kappa_m: p.kappa_m = v; break;
        case SweepAxis::mode_count: p.n = int(std::lround(v)); break;
        case SweepAxis::detuning: p.detuning = v; break;
      }
      const DriveSpec d = p.drive(0.0);
      const double t1 = d.center() + 1.45 * p.period();
      TimeTrace tr = integrate(p.system(), d, 0.0, t1, ctrl);
      pt.report = measure_efficiency(tr, d, p.delta_omega);
      pt.zeta = pt.report.zeta;
      pt.t_revival = measure_revival_time(tr, d, p.delta_omega);
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

// Deterministic counter-based uniform variate on [0, 1): a splitmix64-style
// finalizer hashed on (seed, sample, index). Pure function of its arguments,
// so results are independent of worker count and evaluation order.
inline double counter_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t idx) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (sample + 1) +
                    0xBF58476D1CE4E5B9ull * (idx + 1);
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return double(z >> 11) * 0x1.0p-53;
}

// Gradient system with correlated coupling and frequency imperfections: the
// same relative draw xi_j enters g_j = g0 (1 + xi_j) and
// omega_j = omega_a + (j - (N-1)/2) delta_omega + delta_omega xi_j, j = 1..N.
// This centering shifts the comb centre to omega_a + delta_omega; the
// matched external coupling stays derived from the unperturbed g0.
inline SystemConfig imperfect_system(const ExperimentParams& base, std::uint64_t seed,
                                     std::uint64_t sample, double spread) {
  SystemConfig c;
  c.cavity = {base.omega_a, base.kappa_a0, base.external_coupling()};
  c.magnons.resize(base.n);
  for (int j = 1; j <= base.n; ++j) {
    const double xi = spread * (2.0 * counter_uniform(seed, sample, j) - 1.0);
    c.magnons[j - 1] = {base.omega_a + (j - 0.5 * (base.n - 1)) * base.delta_omega +
                            base.delta_omega * xi,
                        base.g0 * (1.0 + xi), base.kappa_m};
  }
  validate(c);
  return c;
}

struct MonteCarloStats {
  int samples = 0;
  double mean = 0;
  double std_dev = 0;  // sample standard deviation (ddof = 1)
  std::uint64_t seed = 0;
  double spread = 0;
  std::vector<double> zeta;  // per-sample efficiencies, sample order
};

// Retrieval efficiency under random coupling and field imperfections. The
// drive carrier sits at the shifted comb centre omega_a + delta_omega.
// Samples are distributed over `workers` threads by index, so the result is
// bitwise identical for any worker count.
inline MonteCarloStats monte_carlo_imperfection(const ExperimentParams& base, int samples,
                                                double spread, std::uint64_t seed,
                                                int workers = 1,
                                                const StepControl& ctrl = {}) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  if (spread < 0 || spread >= 1) throw std::invalid_argument("spread must be in [0, 1)");
  if (workers < 1) throw std::invalid_argument("workers must be positive");

  MonteCarloStats st;
  st.samples = samples;
  st.seed = seed;
  st.spread = spread;
  st.zeta.assign(samples, std::numeric_limits<double>::quiet_NaN());

  DriveSpec d;
  d.pulses.push_back({base.shape, 0.0, base.t_p, base.amplitude});
  d.omega_l = base.omega_a + base.delta_omega;
  const double T = base.period();
  const double t1 = d.center() + 1.5 * T;

  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= samples) return;
      try {
        TimeTrace tr = integrate(imperfect_system(base, seed, i, spread), d, 0.0, t1, ctrl);
        st.zeta[i] = measure_efficiency(tr, d, base.delta_omega).zeta;
      } catch (const std::exception&) {
        // leave NaN; the sample is excluded from the moments below
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  double sum = 0;
  int nok = 0;
  for (double z : st.zeta)
    if (std::isfinite(z)) { sum += z; ++nok; }
  if (nok == 0) throw std::runtime_error("all samples failed");
  st.mean = sum / nok;
  double ss = 0;
  for (double z : st.zeta)
    if (std::isfinite(z)) ss += (z - st.mean) * (z - st.mean);
  st.std_dev = nok > 1 ? std::sqrt(ss / (nok - 1)) : 0.0;
  return st;
}

struct FifoPeak {
  double t = 0;       // s
  double height = 0;  // smoothed intensity
};

struct FifoResult {
  std::vector<double> input_centers;  // s, ascending
  std::vector<FifoPeak> retrieved;    // ascending time
  bool ordered = false;
  TimeTrace trace;
};

// Store several pulses and check that their revivals come back in arrival
// order, one rephasing period after each envelope centre. Peaks are taken
// from the intensity smoothed over t_p/4, thresholded at 1% of the smoothed
// input maximum, separated by at least t_p/2 (highest wins).
inline FifoResult multi_pulse_fifo(const ExperimentParams& base,
                                   const std::vector<double>& starts,
                                   const StepControl& ctrl = {}) {
  if (starts.empty()) throw std::invalid_argument("no drive");
  DriveSpec d;
  d.omega_l = base.omega_a + base.detuning;
  for (double s : starts) d.pulses.push_back({base.shape, s, base.t_p, base.amplitude});

  FifoResult out;
  for (const auto& p : d.pulses) out.input_centers.push_back(detail::pulse_center(p));
  std::sort(out.input_centers.begin(), out.input_centers.end());

  const double T = base.period();
  auto [lo, hi] = d.support();
  out.trace = integrate(base.system(), d, lo, out.input_centers.back() + 1.45 * T, ctrl);
  const TimeTrace& tr = out.trace;
  const double dt = tr.t[1] - tr.t[0];

  int w = std::max(1, int(std::lround(base.t_p / 4.0 / dt)));
  if (w % 2 == 0) ++w;
  const int half = w / 2;
  const int nt = int(tr.t.size());
  std::vector<double> sm(nt);
  for (int i = 0; i < nt; ++i) {
    const int a = std::max(0, i - half), b = std::min(nt - 1, i + half);
    double s = 0;
    for (int k = a; k <= b; ++k) s += tr.intensity[k];
    sm[i] = s / (b - a + 1);
  }

  const double t_in_end = hi + 0.25 * base.t_p;
  double in_max = 0;
  for (int i = 0; i < nt; ++i)
    if (tr.t[i] <= t_in_end) in_max = std::max(in_max, sm[i]);
  const double thr = 0.01 * in_max;

  std::vector<int> cand;
  for (int i = 1; i + 1 < nt; ++i)
    if (tr.t[i] > t_in_end && sm[i] >= sm[i - 1] && sm[i] > sm[i + 1] && sm[i] > thr)
      cand.push_back(i);
  std::sort(cand.begin(), cand.end(), [&](int a, int b) { return sm[a] > sm[b]; });
  std::vector<int> kept;
  for (int i : cand) {
    bool far = true;
    for (int k : kept)
      if (std::abs(tr.t[i] - tr.t[k]) < 0.5 * base.t_p) { far = false; break; }
    if (far) kept.push_back(i);
    if (kept.size() == d.pulses.size()) break;
  }
  std::sort(kept.begin(), kept.end());
  for (int i : kept) out.retrieved.push_back({tr.t[i], sm[i]});

  double min_sep = T;
  for (size_t k = 1; k < out.input_centers.size(); ++k)
    min_sep = std::min(min_sep, out.input_centers[k] - out.input_centers[k - 1]);
  out.ordered = out.retrieved.size() == out.input_centers.size();
  for (size_t k = 0; out.ordered && k < out.retrieved.size(); ++k)
    out.ordered = std::abs(out.retrieved[k].t - (out.input_centers[k] + T)) < 0.5 * min_sep;
  return out;
}

// Couplings inherited from the standing-wave profile of the cavity field:
// g_j = g_antinode * cos(pi x_j / L) for sphere positions x_j measured from
// the cavity centre. The baseline coupling is taken as the antinode value.
inline SystemConfig cosine_coupling_profile(const SystemConfig& base, double cavity_length,
                                            const std::vector<double>& positions) {
  if (cavity_length <= 0) throw std::invalid_argument("cavity length must be positive");
  if (int(positions.size()) != base.size())
    throw std::invalid_argument("mode count mismatch");
  SystemConfig c = base;
  for (size_t j = 0; j < positions.size(); ++j) {
    if (std::abs(positions[j]) > 0.5 * cavity_length)
      throw std::invalid_argument("sphere outside cavity");
    c.magnons[j].g = base.magnons[j].g * std::cos(pi * positions[j] / cavity_length);
  }
  validate(c);
  return c;
}

struct CompareResult {
  double zeta_uniform = 0, zeta_random = 0;
  double zone2_uniform = 0, zone2_random = 0;
  double ratio = 0;  // uniform / random zone-II energy
  std::uint64_t seed = 0;
  std::vector<double> random_offsets;  // rad/s, relative to omega_a, ascending
};

// Rephasing needs the even comb: the same pulse is stored in the gradient
// system and in one with frequencies drawn uniformly over the same span,
// everything else identical (including the matched coupling of the comb).
inline CompareResult uniform_vs_random_compare(const ExperimentParams& base,
                                               std::uint64_t seed,
                                               const StepControl& ctrl = {}) {
  CompareResult out;
  out.seed = seed;
  const double span = 0.5 * (base.n - 1) * base.delta_omega;
  for (int j = 1; j <= base.n; ++j)
    out.random_offsets.push_back(span * (2.0 * counter_uniform(seed, 0, j) - 1.0));
  std::sort(out.random_offsets.begin(), out.random_offsets.end());

  SystemConfig random_sys = base.system();
  for (int j = 0; j < base.n; ++j)
    random_sys.magnons[j].omega = base.omega_a + out.random_offsets[j];

  const DriveSpec d = base.drive(0.0);
  const double t1 = d.center() + 1.45 * base.period();
  TimeTrace tru = integrate(base.system(), d, 0.0, t1, ctrl);
  TimeTrace trr = integrate(random_sys, d, 0.0, t1, ctrl);
  EfficiencyReport ru = measure_efficiency(tru, d, base.delta_omega);
  EfficiencyReport rr = measure_efficiency(trr, d, base.delta_omega);
  out.zeta_uniform = ru.zeta;
  out.zeta_random = rr.zeta;
  out.zone2_uniform = ru.zone_energies[1];
  out.zone2_random = rr.zone_energies[1];
  out.ratio = rr.zone_energies[1] > 0
                  ? ru.zone_energies[1] / rr.zone_energies[1]
                  : std::numeric_limits<double>::infinity();
  return out;
}

} // namespace mgm
