// Scans the atom drive around the blockade optimum and prints g2 at each point.

#include <cstdio>

#include "pbsim/sweep.hpp"

int main() {
  pbsim::SweepSpec spec;
  spec.name = "scan";
  spec.axis = "omega_drive";
  spec.lo = 60;
  spec.hi = 110;
  spec.points = 11;
  spec.fixed.one.n_trunc = 8;

  for (const auto& row : pbsim::run_sweep(spec)) {
    if (!row.ok()) {
      std::printf("%7.2f  failed: %s\n", row.axis_value, row.error.c_str());
      continue;
    }
    const double G = pbsim::one_cavity_coupling(spec.params_at(row.axis_value).one);
    std::printf("Omega=%7.2f  G=%.4f  <n>=%.3e  g2=%.4e  %s\n", row.axis_value, G, row.mean_phonon, row.g2,
                row.region_label.c_str());
  }

  const auto best = pbsim::find_optimum(spec, true);
  std::printf("optimum: Omega=%.3f g2=%.4e (predicted G_opt=%.4f)\n", best.axis_value, best.g2,
              pbsim::optimal_coupling(spec.fixed.one.kappa, spec.fixed.one.gamma_tri));
}
