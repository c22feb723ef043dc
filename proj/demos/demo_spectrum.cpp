// Probe the comb at weak coupling: N + 1 reflection dips and the group
// delay on resonance, which approaches the rephasing period.
#include <iostream>

#include "mgm/mgm.hpp"

int main() {
  mgm::ExperimentParams p;
  p.kappa_a1 = p.kappa_a0;  // probe coupling, far below matched

  mgm::SystemConfig sys = p.system();
  std::vector<double> grid(24001);
  for (size_t k = 0; k < grid.size(); ++k)
    grid[k] = p.omega_a + mgm::omega_from_mhz(-60.0 + 120.0 * k / (grid.size() - 1));

  mgm::SpectrumTrace tr = mgm::reflection_trace(sys, grid);
  auto dips = mgm::find_dips(grid, tr.magnitude, 0.5 * p.delta_omega);

  std::cout << dips.size() << " dips (MHz relative to the cavity):";
  for (size_t i : dips)
    std::cout << ' ' << mgm::mhz_from_omega(grid[i] - p.omega_a);
  std::cout << "\n";

  // At matched coupling, the on-resonance group delay approaches the
  // rephasing period.
  mgm::ExperimentParams pc;
  mgm::SpectrumTrace trc = mgm::reflection_trace(pc.system(), grid);
  const size_t mid = grid.size() / 2;
  std::cout << "group delay on resonance (matched) = "
            << mgm::ns_from_seconds(trc.group_delay[mid]) << " ns (T = "
            << mgm::ns_from_seconds(mgm::two_pi / p.delta_omega) << " ns)\n";
  return 0;
}
