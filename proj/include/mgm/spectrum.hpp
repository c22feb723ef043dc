#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "model.hpp"

// Frequency-domain analysis: the self-energy the magnon comb induces on the
// cavity, the one-port reflection amplitude, phase/group delay, eigenmodes,
// the impedance-matching condition, and bias-field sweep maps.

namespace mgm {

// Sigma(omega) = sum_j |g_j|^2 / (omega - omega_j + i kappa_j)
inline cplx self_energy(const SystemConfig& c, double omega) {
  cplx sum = 0;
  for (const auto& m : c.magnons) {
    if (m.kappa == 0.0 && omega == m.omega)
      throw std::invalid_argument("pole on real axis");
    sum += std::norm(m.g) / cplx(omega - m.omega, m.kappa);
  }
  return sum;
}

// One-port reflection: with X = omega_a - omega + Sigma(omega),
// r = [X + i(kappa_a1 - kappa_a0)] / [-X + i(kappa_a1 + kappa_a0)].
inline cplx reflection(const SystemConfig& c, double omega) {
  const cplx X = c.cavity.omega_a - omega + self_energy(c, omega);
  const cplx i1(0.0, 1.0);
  return (X + i1 * (c.cavity.kappa_a1 - c.cavity.kappa_a0)) /
         (-X + i1 * (c.cavity.kappa_a1 + c.cavity.kappa_a0));
}

// Same quantity from the steady state of the equations of motion plus the
// input-output relation; used to cross-check the closed form.
inline cplx reflection_from_steady_state(const SystemConfig& c, double omega) {
  Generator gen = dynamics_generator(c, omega);
  Eigen::VectorXcd x = gen.M.fullPivLu().solve(-gen.v);
  return -1.0 + cplx(0.0, 1.0) * std::sqrt(2.0 * c.cavity.kappa_a1) * x[0];
}

struct SpectrumTrace {
  std::vector<double> omega_grid;   // rad/s, monotone
  std::vector<cplx> r;
  std::vector<double> magnitude;
  std::vector<double> phase;        // unwrapped (rad)
  std::vector<double> group_delay;  // d(phase)/d(omega), seconds
};

namespace detail {

inline std::vector<double> unwrap_phase(const std::vector<cplx>& r) {
  std::vector<double> phase(r.size());
  if (r.empty()) return phase;
  phase[0] = std::arg(r[0]);
  for (size_t k = 1; k < r.size(); ++k) {
    double d = std::arg(r[k]) - std::arg(r[k - 1]);
    while (d > pi) d -= two_pi;
    while (d < -pi) d += two_pi;
    if (std::abs(d) >= 0.999 * pi) throw std::invalid_argument("grid too coarse");
    phase[k] = phase[k - 1] + d;
  }
  return phase;
}

// Derivative of y on a (possibly non-uniform) grid by 3-point Lagrange
// differences; one-sided at the endpoints.
inline std::vector<double> derivative(const std::vector<double>& x,
                                      const std::vector<double>& y) {
  const size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  auto stencil = [&](size_t i0, size_t i1, size_t i2, double xq) {
    const double x0 = x[i0], x1 = x[i1], x2 = x[i2];
    const double w0 = (2 * xq - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double w1 = (2 * xq - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double w2 = (2 * xq - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return w0 * y[i0] + w1 * y[i1] + w2 * y[i2];
  };
  d[0] = stencil(0, 1, 2, x[0]);
  for (size_t k = 1; k + 1 < n; ++k) d[k] = stencil(k - 1, k, k + 1, x[k]);
  d[n - 1] = stencil(n - 3, n - 2, n - 1, x[n - 1]);
  return d;
}

} // namespace detail

inline SpectrumTrace reflection_trace(const SystemConfig& c,
                                      const std::vector<double>& omega_grid) {
  SpectrumTrace t;
  t.omega_grid = omega_grid;
  t.r.reserve(omega_grid.size());
  t.magnitude.reserve(omega_grid.size());
  for (double w : omega_grid) {
    t.r.push_back(reflection(c, w));
    t.magnitude.push_back(std::abs(t.r.back()));
  }
  t.phase = detail::unwrap_phase(t.r);
  t.group_delay = detail::derivative(omega_grid, t.phase);
  return t;
}

// Eigenvalues of i*M (frame 0): real part = hybrid resonance frequency,
// -imag part = its linewidth. Sorted by real part.
inline std::vector<cplx> eigenmodes(const SystemConfig& c) {
  Generator gen = dynamics_generator(c, 0.0);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(cplx(0.0, 1.0) * gen.M);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  return ev;
}

struct CriticalKappa {
  double matched = 0;   // kappa_a0 + pi g^2 / delta_omega
  double lossless = 0;  // pi g^2 / delta_omega
};

// External coupling that impedance-matches the cavity to the magnon comb.
inline CriticalKappa critical_kappa(const SystemConfig& c, double delta_omega) {
  if (delta_omega == 0.0) throw std::invalid_argument("degenerate gradient");
  if (c.magnons.empty()) throw std::invalid_argument("empty system");
  const double g0 = std::abs(c.magnons.front().g);
  for (const auto& m : c.magnons)
    if (std::abs(std::abs(m.g) - g0) > 1e-9 * std::max(g0, 1.0))
      throw std::invalid_argument("critical coupling requires uniform couplings");
  CriticalKappa k;
  k.lossless = pi * g0 * g0 / delta_omega;
  k.matched = c.cavity.kappa_a0 + k.lossless;
  return k;
}

struct SweepMap {
  std::string axis;                            // "H0" or "deltaH"
  std::vector<double> x;                       // Oe
  std::vector<double> omega_grid;              // rad/s
  std::vector<std::vector<double>> magnitude;  // [point][omega]
};

enum class FieldAxis { H0, deltaH };

// Reflection magnitude versus bias field: per sweep point the magnon
// frequencies are rebuilt from the field map, everything else kept.
inline SweepMap bias_sweep_map(const SystemConfig& tmpl, const FieldMap& map,
                               FieldAxis axis, const std::vector<double>& values,
                               const std::vector<double>& omega_grid) {
  SweepMap out;
  out.axis = axis == FieldAxis::H0 ? "H0" : "deltaH";
  out.x = values;
  out.omega_grid = omega_grid;
  const int n = tmpl.size();
  for (double v : values) {
    FieldMap m = map;
    (axis == FieldAxis::H0 ? m.H0 : m.deltaH) = v;
    SystemConfig c = tmpl;
    for (int j = 1; j <= n; ++j) c.magnons[j - 1].omega = field_to_frequency(m, j, n);
    out.magnitude.push_back(reflection_trace(c, omega_grid).magnitude);
  }
  return out;
}

// Strict local minima of |r| that undercut 0.95x the smaller of the two
// neighbouring-window maxima; `window` is the half-width in rad/s.
inline std::vector<size_t> find_dips(const std::vector<double>& omega_grid,
                                     const std::vector<double>& magnitude,
                                     double window) {
  std::vector<size_t> dips;
  const size_t n = omega_grid.size();
  if (n < 3) return dips;
  const double step = (omega_grid.back() - omega_grid.front()) / double(n - 1);
  const size_t w = std::max<size_t>(1, size_t(std::lround(window / step)));
  for (size_t i = 1; i + 1 < n; ++i) {
    if (!(magnitude[i] < magnitude[i - 1] && magnitude[i] <= magnitude[i + 1])) continue;
    const size_t lo = i > w ? i - w : 0, hi = std::min(n, i + w + 1);
    double left = 0, right = 0;
    for (size_t k = lo; k < i; ++k) left = std::max(left, magnitude[k]);
    for (size_t k = i + 1; k < hi; ++k) right = std::max(right, magnitude[k]);
    if (magnitude[i] < 0.95 * std::min(left, right)) dips.push_back(i);
  }
  return dips;
}

} // namespace mgm
