#pragma once
// Ground state at large L from the homogeneous logarithmic Bethe equations:
// real roots for zeta >= 0, real roots plus the boundary bound root for
// -1/2 < zeta < 0 (zeta = 1/2 - xi', eta = 1).  Also the finite-size gap
// E_inh = E_hom - E_true against exact diagonalization and the power-law fit
// E_inh = gamma L^beta.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "opentj/lattice.hpp"

namespace opentj {

struct GroundStateSolution {
    int L = 0;
    double zeta = 0.0;
    std::vector<double> mu;   // positive real roots, ascending
    std::vector<int> I;       // quantum numbers, I_j = j
    bool has_bound_root = false;
    double e_hom = 0.0;
};

// counting function residual 2 pi I - 2 arctan(mu/zeta) - 4 L arctan(2 mu);
// at zeta = 0 the first arctan is taken at its principal-branch limit pi/2
inline double counting_residual(double mu, int I, int L, double zeta) {
    double t;
    if (zeta == 0.0)
        t = mu > 0 ? PI : (mu < 0 ? -PI : 0.0);
    else
        t = 2.0 * std::atan(mu / zeta);
    return 2.0 * PI * I - t - 4.0 * L * std::atan(2.0 * mu);
}

namespace detail {

// The counting function is strictly monotone in mu, so each quantum number
// has a unique root: bracket by doubling, bisect, then Newton to 1e-14.
inline double solve_counting(int I, int L, double zeta) {
    auto f = [&](double mu) { return -counting_residual(mu, I, L, zeta); };
    double lo = 1e-14, hi = 1.0;
    while (f(hi) < 0) hi *= 2.0;
    for (int k = 0; k < 200 && hi - lo > 1e-3; ++k) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    double mu = 0.5 * (lo + hi);
    for (int k = 0; k < 100; ++k) {
        double fp = (zeta != 0.0 ? 2.0 / zeta / (1.0 + (mu / zeta) * (mu / zeta)) : 0.0)
                  + 8.0 * L / (1.0 + 4.0 * mu * mu);
        double step = f(mu) / fp;
        mu -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return mu;
}

} // namespace detail

// Ground-state real roots for zeta >= 0: quantum numbers I_j = 1 .. L/2.
inline GroundStateSolution solve_real_roots(int L, double zeta) {
    if (L < 2 || L % 2 != 0) throw std::invalid_argument("solve_real_roots: L must be even");
    if (zeta < 0) throw std::invalid_argument("solve_real_roots: zeta must be >= 0");
    GroundStateSolution s;
    s.L = L;
    s.zeta = zeta;
    for (int I = 1; I <= L / 2; ++I) {
        s.mu.push_back(detail::solve_counting(I, L, zeta));
        s.I.push_back(I);
    }
    s.e_hom = 0.0;
    for (double m : s.mu) s.e_hom -= 1.0 / (m * m + 0.25);
    s.e_hom += double(L);   // 2M with M = L/2
    return s;
}

// Ground state in the bound-root region -1/2 < zeta < 0: L/2 - 1 real roots
// with I_j = 1 .. L/2-1 plus the root pinned at zeta*i, whose bare energy
// -1/(1/4 - zeta^2) enters E_hom directly.
inline GroundStateSolution solve_bound_state_roots(int L, double zeta) {
    if (L < 4 || L % 2 != 0) throw std::invalid_argument("solve_bound_state_roots: L must be even, >= 4");
    if (!(zeta > -0.5 && zeta < 0.0))
        throw std::invalid_argument("solve_bound_state_roots: need -1/2 < zeta < 0");
    GroundStateSolution s;
    s.L = L;
    s.zeta = zeta;
    s.has_bound_root = true;
    for (int I = 1; I <= L / 2 - 1; ++I) {
        s.mu.push_back(detail::solve_counting(I, L, zeta));
        s.I.push_back(I);
    }
    s.e_hom = -1.0 / (0.25 - zeta * zeta);
    for (double m : s.mu) s.e_hom -= 1.0 / (m * m + 0.25);
    s.e_hom += double(L);   // 2M, the bound root included in M = L/2
    return s;
}

inline double energy_hom(const GroundStateSolution& s) { return s.e_hom; }

// convenience: pick the region by the sign of zeta
inline double energy_hom(int L, double zeta) {
    return zeta >= 0.0 ? solve_real_roots(L, zeta).e_hom
                       : solve_bound_state_roots(L, zeta).e_hom;
}

// E_inh = E_hom - E_true with E_true from exact diagonalization of the full
// Hamiltonian.  The homogeneous equations describe the region xi < 0, xi' < 1
// at eta = 1; other inputs are rejected.
inline double inhomogeneous_gap(int L, const BoundaryParams& p, std::uint64_t seed = 12345) {
    if (p.eta != 1.0)
        throw std::invalid_argument("inhomogeneous_gap: formulas assume eta = 1");
    if (!(p.xi < 0.0 && p.xip < 1.0))
        throw std::invalid_argument("inhomogeneous_gap: need xi < 0 and xi' < 1");
    double zeta = 0.5 - p.xip;
    double ehom = energy_hom(L, zeta);
    double etrue = ground_energy(LatticeSpec{L, p}, seed);
    return ehom - etrue;
}

struct ScalingFit {
    double gamma = 0.0;   // sign carried from the data
    double beta = 0.0;
    double r2 = 0.0;
    int points_used = 0;
};

// Least squares on ln|E_inh| = beta ln L + ln|gamma|.  All gaps must share
// one sign; zero or mixed-sign data has no power-law reading and is rejected.
inline ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 3)
        throw std::invalid_argument("scaling_fit: need at least 3 points");
    int sign = 0;
    for (const auto& [L, e] : pts) {
        if (e == 0.0 || std::abs(e) < 1e-14)
            throw std::invalid_argument("scaling_fit: vanishing gap (degenerate point, "
                                        "no power law to fit)");
        int s = e > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign)
            throw std::invalid_argument("scaling_fit: mixed-sign gaps, cannot take logarithms");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = int(pts.size());
    for (const auto& [L, e] : pts) {
        double x = std::log(L), y = std::log(std::abs(e));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double q = (sy - beta * sx) / n;
    double ybar = sy / n, ssr = 0, sst = 0;
    for (const auto& [L, e] : pts) {
        double x = std::log(L), y = std::log(std::abs(e));
        double yf = beta * x + q;
        ssr += (y - yf) * (y - yf);
        sst += (y - ybar) * (y - ybar);
    }
    ScalingFit f;
    f.gamma = sign * std::exp(q);
    f.beta = beta;
    f.r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
    f.points_used = n;
    return f;
}

} // namespace opentj
