// Demo: surface energy of the boundary field, three ways.
//   1. closed-form thermodynamic expression,
//   2. independent quadrature of the same density integrals,
//   3. extrapolation of the finite-size root-density sequence.
//
// Build via the demo_surface target, run with no arguments.

#include <cstdio>
#include <numbers>
#include <vector>

#include "opentj/extrapolate.hpp"
#include "opentj/ground_state.hpp"
#include "opentj/thermo.hpp"

int main() {
    using namespace opentj;
    const double pi = std::numbers::pi;

    std::printf("%8s  %16s  %16s  %12s\n", "zeta", "closed", "quadrature", "delta_term");
    for (double zeta : {-0.45, -0.2, 0.0, 0.05, 0.2, 0.5, 1.0, 5.0, 100.0}) {
        SurfaceEnergyResult r = surface_energy(zeta);
        std::printf("%8.2f  %16.12f  %16.12f  %12.6f\n",
                    zeta, r.value, r.quadrature_value, r.delta_term);
    }

    // finite-size sequence F_L = E_hom(L) + 2L/pi converges to the surface
    // energy; extrapolate it and compare with the closed form
    const double zeta = 0.2;
    std::vector<double> Ls, F;
    for (int L = 8; L <= 1024; L *= 2) {
        Ls.push_back(L);
        F.push_back(energy_hom(L, zeta) + 2.0 * L / pi);
    }
    BstTable t = bst_auto_omega(F, Ls);
    double closed = surface_energy_closed(zeta);
    std::printf("\nzeta = %.2f sequence, L = %g .. %g\n", zeta, Ls.front(), Ls.back());
    std::printf("  raw F_L at largest L : %16.12f\n", F.back());
    std::printf("  extrapolated (omega=%.2f): %16.12f, spread %.2e\n",
                t.omega, t.estimate, t.spread);
    std::printf("  closed form          : %16.12f\n", closed);
    std::printf("  |extrapolation error|: %.3e\n", std::abs(t.estimate - closed));
    return std::abs(t.estimate - closed) <= 1e-4 ? 0 : 1;
}
