#pragma once
// Ground-state Bethe roots at sizes beyond full multi-start reach.  Strategy:
// sample the transfer eigenvalue Lambda(u) through the numerically exact
// ground vector, fit the Q-polynomial coefficients to the cleared T-Q
// identity (tq_coeff.hpp), seed the spin polynomial by size continuation from
// the previous lattice length, and polish the recovered roots with the Newton
// solver on the Bethe equations.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "opentj/ground_state.hpp"
#include "opentj/tq_spectrum.hpp"

namespace opentj {

namespace tqg {

// charge roots of the homogeneous logarithmic equations, used as the fixed
// Q-polynomial seed: v_k = i mu_k - 1/2, plus the real root |zeta| - 1/2 in
// the bound-state region
inline std::vector<cplx> homog_v_seed(int L, double zeta) {
    std::vector<cplx> v;
    if (zeta >= 0) {
        for (double m : solve_real_roots(L, zeta).mu) v.emplace_back(-0.5, m);
    } else {
        for (double m : solve_bound_state_roots(L, zeta).mu) v.emplace_back(-0.5, m);
        v.emplace_back(std::abs(zeta) - 0.5, 0.0);
    }
    return v;
}

inline std::vector<cplx> q_from_v(const std::vector<cplx>& v, double eta) {
    std::vector<cplx> e;
    for (cplx x : v) e.push_back(x * (x + eta));
    return poly_from_roots(e);
}

} // namespace tqg

struct TqGroundResult {
    bool converged = false;
    BetheRoots roots;            // canonicalized, polished
    double ed_energy = 0.0;      // exact ground energy used as the acceptance gate
    double coeff_residual = 0.0; // LM residual of the accepted fit
    double bound_distance = 0.0; // min_k min(|mu_k - i zeta|, |mu_k + i zeta|)
};

// Ground-state root configuration at lattice length L for parameters in the
// bound-root region (or any region where the homogeneous seed applies).
// prev_lams: spin roots of the already-solved length L-2 (empty at the base).
inline TqGroundResult
solve_tq_ground(const LatticeSpec& spec, double zeta,
                const std::vector<cplx>& prev_lams, std::mt19937_64& rng,
                int random_sets = 300) {
    const int L = spec.L;
    const int M = L / 2, Mb = L / 2;
    TqGroundResult out;

    auto ed = exact_spectrum(spec, 1, 12345, true);
    out.ed_energy = ed.energies.at(0);
    tqg::CoeffProblem cp = tqg::make_coeff_problem(spec, ed.ground_vector, M, Mb);

    const std::vector<cplx> q_seed = tqg::q_from_v(tqg::homog_v_seed(L, zeta), spec.params.eta);

    std::vector<std::vector<cplx>> q1_seeds;
    const size_t n_primary = tqg::lam_candidates(prev_lams, Mb).size() + 1;
    for (const auto& cand : tqg::lam_candidates(prev_lams, Mb))
        q1_seeds.push_back(tqg::q1_from_lams(cand));
    q1_seeds.push_back(tqg::solve_q1_linear(cp, q_seed));
    for (int t = 0; t < random_sets; ++t)
        q1_seeds.push_back(tqg::q1_from_lams(tqg::random_lam_set(Mb, rng)));

    for (size_t si = 0; si < q1_seeds.size(); ++si) {
        const auto& q1s = q1_seeds[si];
        std::vector<cplx> z(q_seed);
        z.insert(z.end(), q1s.begin(), q1s.end());
        double resid = 1e300;
        // generous hopping on the informed seeds, shallow on random ones
        const int hops = si < n_primary ? 12 : 2;
        auto zs = tqg::lm_solve(cp, z, &resid, 400, 1e-11, hops, 20240901 + si);
        if (!zs || resid > 1e-10) continue;

        std::vector<cplx> qc(zs->begin(), zs->begin() + M), q1c(zs->begin() + M, zs->end());
        std::vector<cplx> v;
        for (cplx e : tqg::poly_roots(qc)) {
            const double eta = spec.params.eta;
            v.push_back((-eta + std::sqrt(cplx(eta * eta + 4.0 * e))) / 2.0);
        }
        std::vector<cplx> lam;
        for (cplx w : tqg::poly_roots(q1c)) lam.push_back(std::sqrt(w));

        std::vector<cplx> zroots(v);
        zroots.insert(zroots.end(), lam.begin(), lam.end());
        auto nr = newton_solve(M, Mb, L, spec.params, zroots, 200, 1e-13);
        if (!nr) continue;
        std::vector<cplx> pv(nr->z.begin(), nr->z.begin() + M);
        std::vector<cplx> pl(nr->z.begin() + M, nr->z.end());
        canonicalize(pv, pl, spec.params.eta);
        cplx e = energy_from_roots_raw(pv, spec.params.eta);
        if (std::abs(e.imag()) > 1e-8) continue;
        if (std::abs(e.real() - out.ed_energy) > 1e-8) continue;

        out.roots.v = pv;
        out.roots.lam = pl;
        out.roots.params = spec.params;
        out.roots.L = L;
        out.roots.energy = e.real();
        out.roots.residual = nr->residual;
        out.coeff_residual = resid;
        double dist = 1e300;
        for (cplx vk : pv) {
            cplx mu = cplx(0.0, -1.0) * (vk + 0.5);
            dist = std::min({dist, std::abs(mu - cplx(0.0, zeta)), std::abs(mu + cplx(0.0, zeta))});
        }
        out.bound_distance = dist;
        out.converged = true;
        return out;
    }
    return out;
}

} // namespace opentj
