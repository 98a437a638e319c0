#pragma once
// Inhomogeneous T-Q relation for the open chain: evaluation of the transfer
// eigenvalue Lambda(u) from Bethe roots, residual measures of the nested
// Bethe-ansatz equations, a damped Newton solver on the polynomial-cleared
// equations, canonicalization/dedup of root configurations, multi-start and
// homotopy seeding, and the completeness match against exact diagonalization.
//
// Root conventions: charge roots v_k enter through
//   Q(u)   = prod_k (u - v_k)(u + v_k + eta),
// spin roots lambda_l through
//   Q1(u)  = prod_l (u - lambda_l)(u + lambda_l),
// so configurations carry the orbit symmetries v -> -v-eta and lambda -> -lambda.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "opentj/tq_coeff.hpp"

namespace opentj {

struct BetheRoots {
    std::vector<cplx> v;     // charge roots (length M)
    std::vector<cplx> lam;   // spin roots (length Mbar)
    BoundaryParams params;
    int L = 2;
    double energy = 0.0;     // from energy_from_roots
    double residual = 0.0;   // worst normalized BAE residual
};

// ---------------------------------------------------------------------------
// Q-functions and the T-Q expression (product forms, no expansion)
// ---------------------------------------------------------------------------

inline cplx q_charge(cplx u, const std::vector<cplx>& v, double eta) {
    cplx out = 1.0;
    for (cplx vk : v) out *= (u - vk) * (u + vk + eta);
    return out;
}

inline cplx q_spin(cplx u, const std::vector<cplx>& lam) {
    cplx out = 1.0;
    for (cplx l : lam) out *= (u - l) * (u + l);
    return out;
}

// Transfer eigenvalue from a root configuration (four-term inhomogeneous sum).
// Throws std::domain_error at a zero of Q or Q1 or at u = -eta/2.
inline cplx eval_lambda(cplx u, const BetheRoots& r) {
    const BoundaryParams& p = r.params;
    const double eta = p.eta;
    const int L = r.L;
    cplx qu = q_charge(u, r.v, eta);
    cplx qm = q_charge(u - eta, r.v, eta);
    cplx lu = q_spin(u, r.lam);
    if (qu == 0.0 || lu == 0.0 || u == cplx(-eta / 2.0))
        throw std::domain_error("eval_lambda: u coincides with a pole; resample");
    cplx t1 = tq::w3(u, p) * (p.xi + u) * tq::ipow(u + eta, 2 * L) * qm / qu;
    cplx t2 = -tq::ipow(u, 2 * L) * tq::abar(u, p) * qm * q_spin(u + eta, r.lam) / (qu * lu);
    cplx t3 = -tq::ipow(u, 2 * L) * tq::dbar(u, p) * q_spin(u - eta, r.lam) / lu;
    cplx t4 = 2.0 * p.h * tq::ipow(u, 2 * L + 1) * (u - eta / 2.0) * qm / lu;
    return t1 + t2 + t3 + t4;
}

// energy carried by the charge roots
inline cplx energy_from_roots_raw(const std::vector<cplx>& v, double eta) {
    cplx e = 2.0 * double(v.size());
    for (cplx vk : v) e += eta * eta / (vk * (vk + eta));
    return e;
}

// Real energy; rejects configurations whose root sum has a nonzero imaginary
// part (self-conjugacy violated).
inline double energy_from_roots(const BetheRoots& r, double imag_tol = 1e-8) {
    cplx e = energy_from_roots_raw(r.v, r.params.eta);
    if (std::abs(e.imag()) > imag_tol)
        throw std::runtime_error("energy_from_roots: unphysical configuration, Im E = " +
                                 std::to_string(e.imag()));
    return e.real();
}

// ---------------------------------------------------------------------------
// BAE residuals (polynomial-cleared pole-cancellation conditions)
// ---------------------------------------------------------------------------

namespace tq {

struct Scaled {
    cplx val;
    double scale;   // largest additive term, for relative normalization
};

// charge-root equations, one per v_j
inline void bae_g(const std::vector<cplx>& v, const std::vector<cplx>& lam,
                  int L, const BoundaryParams& p, std::vector<Scaled>& out) {
    const double eta = p.eta;
    out.clear();
    for (cplx vj : v) {
        cplx a = w3_poly(vj, p) * (p.xi + vj) * ipow(vj + eta, 2 * L) * q_spin(vj, lam);
        cplx b = ipow(vj, 2 * L) * (vj - eta / 2.0) * (vj + p.xip) * (vj + p.xi)
               * q_spin(vj + eta, lam);
        out.push_back({a - b, std::max({std::abs(a), std::abs(b), 1e-300})});
    }
}

// spin-root equations, one per lambda_l
inline void bae_h(const std::vector<cplx>& v, const std::vector<cplx>& lam,
                  int L, const BoundaryParams& p, std::vector<Scaled>& out) {
    const double eta = p.eta;
    out.clear();
    for (cplx l : lam) {
        cplx a = (l - eta / 2.0) * (l + p.xip) * (l + p.xi) * q_charge(l - eta, v, eta)
               * q_spin(l + eta, lam) * ipow(l, 2 * L);
        cplx b = (l + eta / 2.0) * (l - p.xip) * (l - p.xi) * q_charge(l, v, eta)
               * q_spin(l - eta, lam) * ipow(l, 2 * L);
        cplx c = -2.0 * p.h * (l + eta / 2.0) * ipow(l, 2 * L + 1) * (l - eta / 2.0)
               * q_charge(l, v, eta) * q_charge(l - eta, v, eta);
        out.push_back({a + b + c, std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300})});
    }
}

} // namespace tq

// Per-equation relative residuals (charge set, then spin set), each normalized
// by the largest additive term of its own equation.
inline std::pair<std::vector<cplx>, std::vector<cplx>>
bae_residuals(const BetheRoots& r) {
    std::vector<tq::Scaled> G, H;
    tq::bae_g(r.v, r.lam, r.L, r.params, G);
    tq::bae_h(r.v, r.lam, r.L, r.params, H);
    std::pair<std::vector<cplx>, std::vector<cplx>> out;
    for (const auto& g : G) out.first.push_back(g.val / g.scale);
    for (const auto& h : H) out.second.push_back(h.val / h.scale);
    return out;
}

// Worst normalized residual with a floor on the per-equation scale: equations
// whose additive terms all collapse (a bound root sitting at a zero of the
// w3 polynomial) are judged on absolute size relative to the global scale.
inline double max_rel_residual(const std::vector<cplx>& v, const std::vector<cplx>& lam,
                               int L, const BoundaryParams& p) {
    std::vector<tq::Scaled> G, H;
    tq::bae_g(v, lam, L, p, G);
    tq::bae_h(v, lam, L, p, H);
    double S = 1e-300;
    for (const auto& g : G) S = std::max(S, g.scale);
    for (const auto& h : H) S = std::max(S, h.scale);
    double worst = 0.0;
    for (const auto& g : G) worst = std::max(worst, std::abs(g.val) / std::max(g.scale, 1e-6 * S));
    for (const auto& h : H) worst = std::max(worst, std::abs(h.val) / std::max(h.scale, 1e-6 * S));
    return worst;
}

inline double max_rel_residual(const BetheRoots& r) {
    return max_rel_residual(r.v, r.lam, r.L, r.params);
}

// ---------------------------------------------------------------------------
// canonicalization, dedup, admissibility
// ---------------------------------------------------------------------------

namespace tq {

inline bool complex_less(cplx a, cplx b) {
    if (std::abs(a.real() - b.real()) > 1e-8) return a.real() < b.real();
    if (std::abs(a.imag() - b.imag()) > 1e-8) return a.imag() < b.imag();
    return false;
}

} // namespace tq

// Map each root to the canonical representative of its orbit and sort:
// v-orbit v ~ -v-eta, representative Re(v) >= -eta/2 (on the line, Im >= 0);
// lambda-orbit lambda ~ -lambda, representative Re > 0 (on the axis, Im >= 0).
inline void canonicalize(std::vector<cplx>& v, std::vector<cplx>& lam, double eta) {
    for (cplx& x : v) {
        if (std::abs(x.real() + eta / 2.0) < 1e-9) {
            if (x.imag() < 0) x = -x - eta;
        } else if (x.real() < -eta / 2.0) {
            x = -x - eta;
        }
    }
    for (cplx& x : lam) {
        if (std::abs(x.real()) < 1e-9) {
            if (x.imag() < 0) x = -x;
        } else if (x.real() < 0) {
            x = -x;
        }
    }
    std::sort(v.begin(), v.end(), tq::complex_less);
    std::sort(lam.begin(), lam.end(), tq::complex_less);
}

// Reject configurations that sit on the structural degeneracies: v at
// {0, -eta, -eta/2} (poles/fixed points of the orbit map and the T-Q
// expression), lambda at 0, any root escaped to infinity, or canonicalized
// roots closer than the dedupe resolution (coincident-pair artifacts).
inline bool admissible(const std::vector<cplx>& v, const std::vector<cplx>& lam, double eta) {
    for (cplx x : v) {
        double m = std::min({std::abs(x), std::abs(x + eta), std::abs(x + eta / 2.0)});
        if (m < 1e-8 || std::abs(x) > 1e3) return false;
    }
    for (cplx x : lam)
        if (std::abs(x) < 1e-8 || std::abs(x) > 1e3) return false;
    std::vector<cplx> cv(v), cl(lam);
    canonicalize(cv, cl, eta);
    for (size_t i = 0; i < cv.size(); ++i)
        for (size_t j = i + 1; j < cv.size(); ++j)
            if (std::abs(cv[i] - cv[j]) < 1e-4) return false;
    for (size_t i = 0; i < cl.size(); ++i)
        for (size_t j = i + 1; j < cl.size(); ++j)
            if (std::abs(cl[i] - cl[j]) < 1e-4) return false;
    return true;
}

inline bool same_configuration(const BetheRoots& a, const BetheRoots& b, double tol = 1e-6) {
    if (a.v.size() != b.v.size() || a.lam.size() != b.lam.size()) return false;
    for (size_t i = 0; i < a.v.size(); ++i)
        if (std::abs(a.v[i] - b.v[i]) > tol * (1.0 + std::abs(b.v[i]))) return false;
    for (size_t i = 0; i < a.lam.size(); ++i)
        if (std::abs(a.lam[i] - b.lam[i]) > tol * (1.0 + std::abs(b.lam[i]))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// damped Newton on the cleared equations
// ---------------------------------------------------------------------------

namespace tq {

inline void floored_F(const std::vector<cplx>& z, int M, int L, const BoundaryParams& p,
                      std::vector<cplx>& f) {
    std::vector<cplx> v(z.begin(), z.begin() + M), lam(z.begin() + M, z.end());
    std::vector<Scaled> G, H;
    bae_g(v, lam, L, p, G);
    bae_h(v, lam, L, p, H);
    double S = 1e-300;
    for (const auto& g : G) S = std::max(S, g.scale);
    for (const auto& h : H) S = std::max(S, h.scale);
    f.clear();
    for (const auto& g : G) f.push_back(g.val / std::max(g.scale, 1e-6 * S));
    for (const auto& h : H) f.push_back(h.val / std::max(h.scale, 1e-6 * S));
}

inline double maxabs(const std::vector<cplx>& f) {
    double m = 0.0;
    for (cplx x : f) m = std::max(m, std::abs(x));
    return m;
}

} // namespace tq

struct NewtonResult {
    std::vector<cplx> z;
    double residual = 0.0;
    int iters = 0;
};

// Damped Newton with forward-difference Jacobian on the floored-normalized
// cleared equations.  Returns nullopt on stagnation or non-finite steps.
inline std::optional<NewtonResult>
newton_solve(int M, int Mbar, int L, const BoundaryParams& p,
             std::vector<cplx> z, int maxit = 200, double tol = 1e-13) {
    const int n = M + Mbar;
    if (int(z.size()) != n) throw std::invalid_argument("newton_solve: bad seed length");
    if (n == 0) return NewtonResult{{}, 0.0, 0};
    std::vector<cplx> f, f2, fp;
    const double hstep = 1e-7;
    for (int it = 0; it < maxit; ++it) {
        tq::floored_F(z, M, L, p, f);
        double r = tq::maxabs(f);
        if (!std::isfinite(r)) return std::nullopt;
        if (r < tol) return NewtonResult{z, r, it};
        Mat J(n, n);
        for (int i = 0; i < n; ++i) {
            std::vector<cplx> zp(z);
            zp[i] += hstep;
            tq::floored_F(zp, M, L, p, fp);
            for (int k = 0; k < n; ++k) J(k, i) = (fp[k] - f[k]) / hstep;
        }
        CVec rhs(n);
        for (int k = 0; k < n; ++k) rhs(k) = -f[k];
        CVec dz = J.colPivHouseholderQr().solve(rhs);
        if (!dz.allFinite()) return std::nullopt;
        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<cplx> z2(z);
            for (int k = 0; k < n; ++k) z2[k] += step * dz(k);
            tq::floored_F(z2, M, L, p, f2);
            if (tq::maxabs(f2) < r) {
                z = std::move(z2);
                moved = true;
                break;
            }
            step /= 2.0;
        }
        if (!moved) return std::nullopt;
    }
    tq::floored_F(z, M, L, p, f);
    double r = tq::maxabs(f);
    if (r < tol) return NewtonResult{z, r, maxit};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// multi-start / homotopy / file-seeded solving
// ---------------------------------------------------------------------------

struct SeedOptions {
    int ntrials = 4000;                         // random multi-start budget
    std::vector<std::vector<cplx>> file_seeds;  // explicit seeds, v then lambda
    bool homotopy = false;                      // continue from the h = 0 point
    int homotopy_steps = 8;
    double tol = 1e-13;
    double energy_imag_tol = 1e-8;
};

namespace tq {

// random seed draws; mixture of line, box, and wide-box modes
inline std::vector<cplx> random_seed(int M, int Mbar, double eta, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<cplx> z;
    z.reserve(M + Mbar);
    auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };
    for (int i = 0; i < M; ++i) {
        switch (rng() % 4) {
            case 0:  z.emplace_back(-eta / 2.0, uni(-2.5, 2.5)); break;
            case 1:  z.emplace_back(uni(-2.5, 1.5), uni(-1.5, 1.5)); break;
            case 2:  z.emplace_back(uni(-2.5, 1.5), 0.0); break;
            default: z.emplace_back(uni(-4.0, 3.0), uni(-3.0, 3.0)); break;
        }
    }
    for (int i = 0; i < Mbar; ++i) {
        switch (rng() % 3) {
            case 0:  z.emplace_back(uni(0.05, 5.0), 0.0); break;
            case 1:  z.emplace_back(0.0, uni(0.05, 5.0)); break;
            default: z.emplace_back(uni(-5.0, 5.0), uni(-5.0, 5.0)); break;
        }
    }
    return z;
}

// try one seed; push accepted configuration if new
inline void try_seed(const std::vector<cplx>& z0, int M, int Mbar,
                     const LatticeSpec& spec, const SeedOptions& opt,
                     std::vector<BetheRoots>& sols) {
    auto nr = newton_solve(M, Mbar, spec.L, spec.params, z0, 200, opt.tol);
    if (!nr) return;
    std::vector<cplx> v(nr->z.begin(), nr->z.begin() + M);
    std::vector<cplx> lam(nr->z.begin() + M, nr->z.end());
    if (!admissible(v, lam, spec.params.eta)) return;
    canonicalize(v, lam, spec.params.eta);
    cplx e = energy_from_roots_raw(v, spec.params.eta);
    if (std::abs(e.imag()) > opt.energy_imag_tol) return;
    BetheRoots r;
    r.v = std::move(v);
    r.lam = std::move(lam);
    r.params = spec.params;
    r.L = spec.L;
    r.energy = e.real();
    r.residual = nr->residual;
    for (const auto& s : sols)
        if (same_configuration(s, r)) return;
    sols.push_back(std::move(r));
}

} // namespace tq

// All admissible root configurations of the (M, Mbar) sector found from the
// requested seed strategies, canonicalized, dedup'd, sorted by energy.
inline std::vector<BetheRoots>
solve_nested_bae(const LatticeSpec& spec, int M, int Mbar,
                 const SeedOptions& opt, std::mt19937_64& rng) {
    std::vector<BetheRoots> sols;
    if (M == 0 && Mbar == 0) {
        BetheRoots r;
        r.params = spec.params;
        r.L = spec.L;
        sols.push_back(r);
        return sols;
    }
    for (const auto& s : opt.file_seeds)
        if (int(s.size()) == M + Mbar)
            tq::try_seed(s, M, Mbar, spec, opt, sols);
    if (opt.homotopy && !spec.params.raw) {
        // start from the degenerate parallel/anti-parallel point (h = 0) and
        // walk the right-boundary angles to their targets
        const BoundaryParams& p = spec.params;
        double th0 = (p.eps == +1) ? p.theta : PI - p.theta;
        double ph0 = (p.eps == +1) ? p.phi : p.phi + PI;
        LatticeSpec start{spec.L, make_params(p.eta, p.xi, p.theta, p.phi,
                                              p.xip, th0, ph0, p.eps)};
        SeedOptions sopt = opt;
        sopt.homotopy = false;
        auto base = solve_nested_bae(start, M, Mbar, sopt, rng);
        for (const auto& b : base) {
            std::vector<cplx> z(b.v);
            z.insert(z.end(), b.lam.begin(), b.lam.end());
            bool alive = true;
            for (int s = 1; s <= opt.homotopy_steps && alive; ++s) {
                double f = double(s) / opt.homotopy_steps;
                LatticeSpec mid{spec.L, make_params(p.eta, p.xi, p.theta, p.phi, p.xip,
                                                    th0 + f * (p.thetap - th0),
                                                    ph0 + f * (p.phip - ph0), p.eps)};
                auto nr = newton_solve(M, Mbar, mid.L, mid.params, z, 200, opt.tol);
                if (!nr) { alive = false; break; }
                z = nr->z;
            }
            if (alive) tq::try_seed(z, M, Mbar, spec, opt, sols);
        }
    }
    for (int t = 0; t < opt.ntrials; ++t)
        tq::try_seed(tq::random_seed(M, Mbar, spec.params.eta, rng), M, Mbar, spec, opt, sols);
    std::sort(sols.begin(), sols.end(),
              [](const BetheRoots& a, const BetheRoots& b) { return a.energy < b.energy; });
    return sols;
}

// ---------------------------------------------------------------------------
// completeness match against exact diagonalization
// ---------------------------------------------------------------------------

struct MatchReport {
    std::vector<double> ed_energies;
    std::vector<double> bae_energy;     // best-matching BAE energy per level
    std::vector<double> distance;       // |ED - BAE| per level
    std::vector<std::pair<int, int>> sector;  // (M, Mbar) of the match
    std::vector<BetheRoots> solutions;  // all solved configurations
    bool all_matched(double tol) const {
        for (double d : distance)
            if (!(d <= tol)) return false;
        return true;
    }
    int unmatched(double tol) const {
        int n = 0;
        for (double d : distance)
            if (!(d <= tol)) ++n;
        return n;
    }
};

namespace tq {

// Targeted root recovery for one exact level: sample Lambda(u) through its
// eigenvector, fit the Q-polynomial coefficients in the (M, Mb) sector by
// damped least squares, then polish the recovered roots on the Bethe
// equations.  Returns all accepted configurations.
inline void guided_level(const LatticeSpec& spec, const CVec& vec, double e_level,
                         int M, int Mb, std::mt19937_64& rng, const SeedOptions& opt,
                         std::vector<BetheRoots>& sols) {
    tqg::CoeffProblem cp = tqg::make_coeff_problem(spec, vec, M, Mb);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<cplx> seed = random_seed(M, Mb, spec.params.eta, rng);
        std::vector<cplx> e;
        for (int i = 0; i < M; ++i)
            e.push_back(seed[i] * (seed[i] + spec.params.eta));
        std::vector<cplx> lamset(seed.begin() + M, seed.end());
        std::vector<cplx> z = tqg::poly_from_roots(e);
        auto q1 = tqg::q1_from_lams(lamset);
        z.insert(z.end(), q1.begin(), q1.end());
        double resid = 1e300;
        auto zs = tqg::lm_solve(cp, z, &resid, 400, 1e-11, 4, 977 + trial);
        if (!zs || resid > 1e-10) continue;
        std::vector<cplx> qc(zs->begin(), zs->begin() + M), q1c(zs->begin() + M, zs->end());
        std::vector<cplx> zroots;
        const double eta = spec.params.eta;
        for (cplx ev : tqg::poly_roots(qc))
            zroots.push_back((-eta + std::sqrt(cplx(eta * eta + 4.0 * ev))) / 2.0);
        for (cplx w : tqg::poly_roots(q1c)) zroots.push_back(std::sqrt(w));
        size_t before = sols.size();
        try_seed(zroots, M, Mb, spec, opt, sols);
        // accept only a configuration that actually reproduces this level
        if (sols.size() > before) {
            if (std::abs(sols.back().energy - e_level) > 1e-6)
                sols.pop_back();
            else
                return;
        }
    }
}

} // namespace tq

// Solve every sector M <= L, Mbar <= M and pair each ED eigenvalue with the
// nearest BAE energy.  Completeness holds when every level has a partner
// within tolerance; spurious extra configurations are harmless here.  Levels
// that the blind multi-start misses are closed by the Lambda-guided fit
// through their own eigenvectors.
inline MatchReport match_against_exact(const LatticeSpec& spec, std::mt19937_64& rng,
                                       const SeedOptions& opt_in = {}) {
    if (spec.L > 3)
        throw std::invalid_argument("match_against_exact: full matching supported for L <= 3");
    MatchReport rep;
    auto ed = exact_spectrum(spec, detail::ipow3(spec.L));
    rep.ed_energies = ed.energies;
    SeedOptions opt = opt_in;
    for (int M = 0; M <= spec.L; ++M)
        for (int Mb = 0; Mb <= M; ++Mb) {
            auto sols = solve_nested_bae(spec, M, Mb, opt, rng);
            for (auto& s : sols) rep.solutions.push_back(std::move(s));
        }

    // targeted pass over levels still missing a partner
    Mat H = build_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    for (long k = 0; k < long(rep.ed_energies.size()); ++k) {
        double e = rep.ed_energies[k];
        double best = 1e300;
        for (const auto& s : rep.solutions) best = std::min(best, std::abs(s.energy - e));
        if (best <= 1e-5) continue;
        CVec vec = es.eigenvectors().col(k);
        bool closed = false;
        // electron number fixes the charge-root count; scan the spin count
        int Mlev = ed.electron_numbers.empty() ? -1 : ed.electron_numbers[k];
        if (Mlev >= 0 && Mlev <= spec.L) {
            for (int Mb = 0; Mb <= Mlev && !closed; ++Mb) {
                size_t before = rep.solutions.size();
                tq::guided_level(spec, vec, e, Mlev, Mb, rng, opt, rep.solutions);
                closed = rep.solutions.size() > before;
            }
        }
        for (int M = 0; M <= spec.L && !closed; ++M) {
            if (M == Mlev) continue;
            for (int Mb = 0; Mb <= M && !closed; ++Mb) {
                size_t before = rep.solutions.size();
                tq::guided_level(spec, vec, e, M, Mb, rng, opt, rep.solutions);
                closed = rep.solutions.size() > before;
            }
        }
    }

    for (double e : rep.ed_energies) {
        double best = 1e300;
        const BetheRoots* who = nullptr;
        for (const auto& s : rep.solutions) {
            double d = std::abs(s.energy - e);
            if (d < best) { best = d; who = &s; }
        }
        rep.bae_energy.push_back(who ? who->energy : 0.0);
        rep.distance.push_back(best);
        rep.sector.push_back(who ? std::make_pair(int(who->v.size()), int(who->lam.size()))
                                 : std::make_pair(-1, -1));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// structural checks on a solved configuration
// ---------------------------------------------------------------------------

// Lambda(u) must be a polynomial of degree 2L+2: sample on a circle,
// interpolate, and measure the relative size of coefficients beyond 2L+2
// plus the reproduction error at fresh points.
inline double lambda_polynomial_residual(const BetheRoots& r, double radius = 1.37) {
    const int L = r.L;
    const int npts = 2 * L + 8;
    std::vector<cplx> f(npts);
    for (int k = 0; k < npts; ++k) {
        cplx u = radius * std::exp(cplx(0.0, 2.0 * PI * (k + 0.23) / npts));
        f[k] = eval_lambda(u, r);
    }
    // DFT coefficients c_m r^m; degree cap means c_m ~ 0 for m > 2L+2
    std::vector<cplx> coef(npts);
    double fmax = 1e-300;
    for (int m = 0; m < npts; ++m) {
        cplx acc = 0.0;
        for (int k = 0; k < npts; ++k)
            acc += f[k] * std::exp(cplx(0.0, -2.0 * PI * (k + 0.23) * m / npts));
        coef[m] = acc / double(npts);
        fmax = std::max(fmax, std::abs(f[m]));
    }
    double excess = 0.0;
    for (int m = 2 * L + 3; m < npts; ++m)
        excess = std::max(excess, std::abs(coef[m]) / fmax);
    // reproduction at fresh points inside the circle
    double worst = excess;
    for (int t = 0; t < 12; ++t) {
        cplx u = 0.71 * radius * std::exp(cplx(0.0, 2.0 * PI * (t + 0.41) / 12.0));
        cplx fit = 0.0;   // coef[m] = c_m r^m, so Horner in u/r
        for (int m = npts - 1; m >= 0; --m) fit = fit * (u / radius) + coef[m];
        worst = std::max(worst, std::abs(fit - eval_lambda(u, r)) / fmax);
    }
    return worst;
}

// Lambda is invariant under replacing any v by its orbit partner -v-eta.
inline double orbit_invariance_residual(const BetheRoots& r, cplx u) {
    BetheRoots flipped = r;
    for (cplx& x : flipped.v) x = -x - r.params.eta;
    cplx a = eval_lambda(u, r), b = eval_lambda(u, flipped);
    return std::abs(a - b) / std::max(1.0, std::abs(a));
}

// Energy through the transfer eigenvalue: (eta/2) Lambda'(0)/Lambda(0) plus
// the boundary constants and 2M - (L-1) must reproduce energy_from_roots.
inline double energy_consistency_residual(const BetheRoots& r) {
    const BoundaryParams& p = r.params;
    const double eta = p.eta;
    // derivative at 0 via a small contour (Lambda is polynomial)
    const int npts = 2 * r.L + 8;
    const double rad = 0.3;
    cplx d = 0.0, z0 = 0.0;
    for (int k = 0; k < npts; ++k) {
        cplx u = rad * std::exp(cplx(0.0, 2.0 * PI * (k + 0.37) / npts));
        cplx f = eval_lambda(u, r);
        d += f / u;
        z0 += f;
    }
    d /= double(npts);
    z0 /= double(npts);   // mean over the circle = c_0 = Lambda(0)
    double cnst = -eta / (2.0 * p.xi) + (eta - 2.0 * p.xip) / (2.0 * (eta - p.xip));
    cplx e_tq = 0.5 * eta * d / z0 + cnst + 2.0 * double(r.v.size()) - double(r.L - 1);
    return std::abs(e_tq - energy_from_roots_raw(r.v, eta));
}

} // namespace opentj
