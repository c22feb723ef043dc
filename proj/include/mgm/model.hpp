#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "units.hpp"

// System construction and validation: one microwave cavity mode linearly
// coupled to N magnon modes, the collective bright/dark basis, feasibility
// diagnostics, and the generator of the linear equations of motion.

namespace mgm {

using cplx = std::complex<double>;

struct CavityMode {
  double omega_a = 0;   // resonance (rad/s)
  double kappa_a0 = 0;  // intrinsic amplitude damping (rad/s)
  double kappa_a1 = 0;  // external (probe) amplitude coupling (rad/s)
};

struct MagnonMode {
  double omega = 0;  // resonance (rad/s)
  cplx g = 0;        // coupling to the cavity (rad/s)
  double kappa = 0;  // amplitude damping (rad/s)
};

struct SystemConfig {
  CavityMode cavity;
  std::vector<MagnonMode> magnons;  // index order = physical sphere order
  std::string label;

  int size() const { return static_cast<int>(magnons.size()); }
};

inline void validate(const SystemConfig& c) {
  if (c.cavity.omega_a <= 0) throw std::invalid_argument("omega_a must be positive");
  if (c.cavity.kappa_a0 < 0 || c.cavity.kappa_a1 < 0)
    throw std::invalid_argument("cavity damping rates must be nonnegative");
  for (const auto& m : c.magnons)
    if (m.kappa < 0) throw std::invalid_argument("magnon damping rates must be nonnegative");
}

// Evenly spaced magnon comb centered on the cavity: omega_j = omega_a + (j-(N+1)/2)*delta.
inline SystemConfig build_gradient_system(int n, double omega_a, double delta_omega_m,
                                          double g0, double kappa_m, double kappa_a0,
                                          double kappa_a1) {
  if (n < 1) throw std::invalid_argument("empty system");
  if (kappa_m < 0 || kappa_a0 < 0 || kappa_a1 < 0 || g0 < 0)
    throw std::invalid_argument("rates must be nonnegative");
  SystemConfig c;
  c.cavity = {omega_a, kappa_a0, kappa_a1};
  c.magnons.resize(n);
  for (int j = 1; j <= n; ++j)
    c.magnons[j - 1] = {omega_a + (j - 0.5 * (n + 1)) * delta_omega_m, g0, kappa_m};
  validate(c);
  return c;
}

struct FieldMap {
  double gamma = 0;   // rad/s per Oe
  double H0 = 0;      // Oe
  double deltaH = 0;  // per-sphere gradient step (Oe)
};

// Magnon frequency of sphere j under the bias-field gradient H_j = H0 + (j-(N+1)/2)*dH.
inline double field_to_frequency(const FieldMap& map, int j, int n) {
  if (map.gamma <= 0) throw std::invalid_argument("gamma must be positive");
  if (j < 1 || j > n) throw std::invalid_argument("sphere index out of range");
  return map.gamma * (map.H0 + (j - 0.5 * (n + 1)) * map.deltaH);
}

struct PhysicalCouplingParams {
  double eta = 0;      // spatial overlap / polarization factor, 0..1
  double omega = 0;    // resonance (rad/s)
  double V_a = 0;      // cavity modal volume (m^3)
  double N_spins = 0;  // total spin count
  double s = 0;        // spin number
};

// Single-sphere coupling from material and cavity parameters,
// g = (eta/2) * gamma_e * sqrt(hbar * omega * mu0 / V_a) * sqrt(2 * N_spins * s).
inline double coupling_from_physical(const PhysicalCouplingParams& p) {
  if (p.V_a <= 0) throw std::invalid_argument("cavity volume must be positive");
  if (p.eta < 0 || p.eta > 1) throw std::invalid_argument("eta must be in [0, 1]");
  if (p.N_spins < 0) throw std::invalid_argument("N_spins must be nonnegative");
  return 0.5 * p.eta * gamma_electron_si *
         std::sqrt(hbar_si * p.omega * mu0_si / p.V_a) * std::sqrt(2.0 * p.N_spins * p.s);
}

struct CollectiveBasis {
  Eigen::MatrixXcd vectors;  // rows = collective-mode coefficients over (m_1..m_N)
  int bright_index = 0;
  double enhancement = 0;  // ||g|| / |g_1|
};

// Collective magnon basis: the bright row is g/||g|| (the superposition the cavity
// radiates into); the dark rows span its orthogonal complement. For equal couplings
// the dark rows are the discrete Fourier vectors exp(2*pi*i*(j-(N+1)/2)*n/N)/sqrt(N).
inline CollectiveBasis collective_basis(const SystemConfig& c) {
  const int n = c.size();
  if (n < 1) throw std::invalid_argument("empty system");
  Eigen::VectorXcd g(n);
  for (int j = 0; j < n; ++j) g[j] = c.magnons[j].g;
  const double norm = g.norm();
  if (norm == 0.0) throw std::invalid_argument("no bright mode");

  CollectiveBasis basis;
  basis.vectors.resize(n, n);
  basis.bright_index = 0;
  basis.vectors.row(0) = (g / norm).transpose();
  basis.enhancement =
      std::abs(g[0]) > 0 ? norm / std::abs(g[0]) : std::numeric_limits<double>::infinity();

  bool equal = true;
  for (int j = 1; j < n; ++j)
    if (std::abs(g[j] - g[0]) > 1e-12 * norm) equal = false;

  if (equal) {
    for (int dn = 1; dn < n; ++dn)
      for (int j = 1; j <= n; ++j)
        basis.vectors(dn, j - 1) =
            std::polar(1.0 / std::sqrt(double(n)), two_pi * (j - 0.5 * (n + 1)) * dn / n);
    return basis;
  }

  // General couplings: complete the bright row to a unitary with a Householder
  // reflection that maps e_1 onto the bright vector.
  Eigen::VectorXcd b = basis.vectors.row(0).transpose().conjugate();
  Eigen::VectorXcd w = b;
  cplx phase = std::abs(b[0]) > 0 ? b[0] / std::abs(b[0]) : cplx(1.0);
  w[0] += phase;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(n, n) -
                       2.0 * (w * w.adjoint()) / w.squaredNorm();
  // Columns 2..N of H are orthonormal to b (H maps e_1 to -phase*b).
  for (int dn = 1; dn < n; ++dn) basis.vectors.row(dn) = H.col(dn).adjoint();
  return basis;
}

struct FeasibilityRow {
  std::string name;
  double lhs = 0, rhs = 0, ratio = 0;
  bool strict = false;   // "much greater" constraints want ratio >= 10
  bool pass_weak = false;  // ratio >= 1
  bool pass = false;       // ratio >= 1, or >= 10 when strict
};

// Operating-regime diagnostics for a gradient memory. Conservative choices for
// non-uniform systems: slowest magnon (largest kappa), weakest coupling.
inline std::vector<FeasibilityRow> feasibility_check(const SystemConfig& c,
                                                     double delta_omega) {
  const int n = c.size();
  double kappa_m = 0, g_min = std::numeric_limits<double>::infinity();
  for (const auto& m : c.magnons) {
    kappa_m = std::max(kappa_m, m.kappa);
    g_min = std::min(g_min, std::abs(m.g));
  }
  if (n == 0) g_min = 0;

  auto row = [](std::string name, double lhs, double rhs, bool strict) {
    FeasibilityRow r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.strict = strict;
    r.ratio = rhs == 0 ? std::numeric_limits<double>::infinity() : lhs / rhs;
    r.pass_weak = r.ratio >= 1.0;
    r.pass = r.ratio >= (strict ? 10.0 : 1.0);
    return r;
  };

  const double sqn = std::sqrt(double(std::max(n, 1)));
  std::vector<FeasibilityRow> rows;
  rows.push_back(row("gradient_resolves_linewidth", delta_omega, two_pi * kappa_m, false));
  rows.push_back(row("coupling_spans_comb", g_min, sqn * delta_omega, false));
  rows.push_back(row("coupling_beats_cavity_loss", g_min, (two_pi / sqn) * c.cavity.kappa_a0, true));
  rows.push_back(row("external_overcouples_comb", c.cavity.kappa_a1, n * delta_omega, true));
  const double coop = (c.cavity.kappa_a0 > 0 && kappa_m > 0)
                          ? g_min * g_min / (c.cavity.kappa_a0 * kappa_m)
                          : std::numeric_limits<double>::infinity();
  rows.push_back(row("cooperativity", coop, 4.0 * pi * pi, true));
  return rows;
}

struct Generator {
  Eigen::MatrixXcd M;   // (N+1) x (N+1), state x = (a, m_1..m_N)
  Eigen::VectorXcd v;   // drive injection, dx/dt = M x + v E_in(t)
};

// Linear generator in the frame rotating at frame_frequency.
inline Generator dynamics_generator(const SystemConfig& c, double frame_frequency) {
  const int n = c.size();
  Generator gen;
  gen.M = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  gen.v = Eigen::VectorXcd::Zero(n + 1);
  const cplx i1(0.0, 1.0);
  gen.M(0, 0) = -i1 * (c.cavity.omega_a - frame_frequency) - c.cavity.kappa_a0 - c.cavity.kappa_a1;
  for (int j = 1; j <= n; ++j) {
    const auto& m = c.magnons[j - 1];
    gen.M(0, j) = -i1 * m.g;
    gen.M(j, 0) = -i1 * std::conj(m.g);
    gen.M(j, j) = -i1 * (m.omega - frame_frequency) - m.kappa;
  }
  gen.v[0] = -i1 * std::sqrt(2.0 * c.cavity.kappa_a1);
  return gen;
}

} // namespace mgm
