#pragma once
// Coefficient-space machinery for the inhomogeneous T-Q identity.  The
// transfer eigenvalue Lambda(u) is sampled through a numerically exact
// eigenvector on contour rings; the Q-polynomial coefficient vectors are then
// recovered by damped least squares on the polynomial-cleared identity
//   (u+eta/2) Lambda Q Q1 = w3p (xi+u)(u+eta)^{2L} Qm Q1
//                         + u^{2L} [(eta/2-u)(u+xi')(u+xi) Qm Q1p
//                                   - (u-xi')(u-xi)(u+eta/2) Q Q1m]
//                         + 2h u^{2L+1} (u-eta/2)(u+eta/2) Q Qm
// with Q monic in s = u(u+eta) and Q1 monic in w = u^2.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "opentj/lattice.hpp"

namespace opentj {

namespace tq {

inline cplx w3(cplx u, const BoundaryParams& p) {
    return p.xip - u - p.eta * (2.0 * p.xip - p.eta) / (2.0 * u + p.eta);
}
inline cplx abar(cplx u, const BoundaryParams& p) {
    return (u - p.eta / 2.0) / (u + p.eta / 2.0) * (u + p.xip) * (u + p.xi);
}
inline cplx dbar(cplx u, const BoundaryParams& p) {
    return (u - p.xip) * (u - p.xi);
}
// (u + eta/2) w3(u), a polynomial; vanishes identically at u = xi' - eta
// and at u = eta/2, which makes those points degenerate for the cleared
// equations.
inline cplx w3_poly(cplx u, const BoundaryParams& p) {
    return (p.xip - u) * (u + p.eta / 2.0) - p.eta / 2.0 * (2.0 * p.xip - p.eta);
}

inline cplx ipow(cplx u, int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= u;
    return r;
}

} // namespace tq

namespace tqg {

// ascending coefficients of the monic polynomial with the given roots
inline std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (cplx r : roots) {
        std::vector<cplx> nc(c.size() + 1, 0.0);
        for (size_t j = 0; j < c.size(); ++j) {
            nc[j + 1] += c[j];
            nc[j] -= r * c[j];
        }
        c = std::move(nc);
    }
    c.pop_back();   // drop the leading 1
    return c;
}

// roots of a monic polynomial given by ascending coefficients (companion matrix)
inline std::vector<cplx> poly_roots(const std::vector<cplx>& coef) {
    const int n = int(coef.size());
    if (n == 0) return {};
    Mat C = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -coef[i];
    Eigen::ComplexEigenSolver<Mat> es(C);
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()(i);
    return out;
}

// arg^deg + sum_j coef[j] arg^j
inline cplx poly_eval_mon(cplx arg, const std::vector<cplx>& coef) {
    const int deg = int(coef.size());
    cplx p = 1.0;
    cplx out = 0.0;
    for (int j = 0; j < deg; ++j) {
        out += coef[j] * p;
        p *= arg;
    }
    return out + p;
}

inline std::vector<cplx> q1_from_lams(const std::vector<cplx>& lams) {
    std::vector<cplx> w;
    for (cplx l : lams) w.push_back(l * l);
    return poly_from_roots(w);
}

// Lambda samples on contour rings plus the cleared five-term residual.
struct CoeffProblem {
    int L = 0;
    int M = 0, Mb = 0;
    BoundaryParams p;
    std::vector<cplx> u, lam;   // sample points and Lambda values there

    // five factors multiplying [Q Q1, Qm Q1, Qm Q1p, Q Q1m, Q Qm]
    void terms(size_t i, const std::vector<cplx>& q, const std::vector<cplx>& q1,
               cplx out[5]) const {
        const double eta = p.eta;
        const cplx uu = u[i];
        const cplx f1 = (uu + eta / 2.0) * lam[i];
        const cplx f2 = -tq::w3_poly(uu, p) * (p.xi + uu) * tq::ipow(uu + eta, 2 * L);
        const cplx f3 = tq::ipow(uu, 2 * L) * (uu - eta / 2.0) * (uu + p.xip) * (uu + p.xi);
        const cplx f4 = tq::ipow(uu, 2 * L) * (uu - p.xip) * (uu - p.xi) * (uu + eta / 2.0);
        const cplx f5 = -2.0 * p.h * tq::ipow(uu, 2 * L + 1)
                      * (uu - eta / 2.0) * (uu + eta / 2.0);
        const cplx s = uu * (uu + eta), sm = uu * (uu - eta);
        const cplx w = uu * uu, wp = (uu + eta) * (uu + eta), wm = (uu - eta) * (uu - eta);
        const cplx Q = poly_eval_mon(s, q), Qm = poly_eval_mon(sm, q);
        const cplx Q1 = poly_eval_mon(w, q1), Q1p = poly_eval_mon(wp, q1),
                   Q1m = poly_eval_mon(wm, q1);
        out[0] = f1 * Q * Q1;
        out[1] = f2 * Qm * Q1;
        out[2] = f3 * Qm * Q1p;
        out[3] = f4 * Q * Q1m;
        out[4] = f5 * Q * Qm;
    }

    // normalized residual at every sample for the packed vector z = [q, q1]
    void residuals(const std::vector<cplx>& z, std::vector<cplx>& f) const {
        std::vector<cplx> q(z.begin(), z.begin() + M), q1(z.begin() + M, z.end());
        f.resize(u.size());
        cplx t[5];
        for (size_t i = 0; i < u.size(); ++i) {
            terms(i, q, q1, t);
            double scale = 1e-300;
            cplx sum = 0.0;
            for (int k = 0; k < 5; ++k) {
                sum += t[k];
                scale = std::max(scale, std::abs(t[k]));
            }
            f[i] = sum / scale;
        }
    }
};

// Sample Lambda through an eigenvector on four rings.  The vector must be an
// eigenvector of the transfer matrix (equivalently of H, by commutativity).
inline CoeffProblem make_coeff_problem(const LatticeSpec& spec, const CVec& vec,
                                       int M, int Mb) {
    CoeffProblem cp;
    cp.L = spec.L;
    cp.M = M;
    cp.Mb = Mb;
    cp.p = spec.params;
    TransferApply ta(spec);
    const double radii[4] = {0.83, 1.9, 4.2, 9.0};
    const int nring = 2 * spec.L + 6;
    for (int ri = 0; ri < 4; ++ri)
        for (int k = 0; k < nring; ++k) {
            cplx u = radii[ri] * std::exp(cplx(0.0, 2.0 * PI * (k + 0.31 + 0.5 * ri) / nring));
            cp.u.push_back(u);
            cp.lam.push_back(ta.eigenvalue_through(u, vec));
        }
    return cp;
}

inline double norm2(const std::vector<cplx>& f) {
    double s = 0.0;
    for (cplx x : f) s += std::norm(x);
    return std::sqrt(s);
}

// Levenberg-Marquardt on the coefficient vector; the residual map is
// holomorphic in the coefficients, so the complex normal equations carry the
// full Gauss-Newton structure.  The coefficient magnitudes span many orders,
// so the damped step is solved in Marquardt's column-equilibrated form.
inline std::optional<std::vector<cplx>>
lm_core(const CoeffProblem& cp, std::vector<cplx> z, double* resid_out,
        int iters = 400, double tol = 1e-11) {
    const int n = int(z.size());
    const double hstep = 1e-7;
    std::vector<cplx> f, f2, fp;
    cp.residuals(z, f);
    double cost = norm2(f);
    double mu = 1e-3;
    for (int it = 0; it < iters; ++it) {
        double worst = 0.0;
        for (cplx x : f) worst = std::max(worst, std::abs(x));
        if (worst < tol) break;
        const int m = int(f.size());
        Mat J(m, n);
        for (int j = 0; j < n; ++j) {
            std::vector<cplx> zp(z);
            zp[j] += hstep;
            cp.residuals(zp, fp);
            for (int k = 0; k < m; ++k) J(k, j) = (fp[k] - f[k]) / hstep;
        }
        Mat JhJ = J.adjoint() * J;
        CVec g(n);
        for (int j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < m; ++k) acc += std::conj(J(k, j)) * f[k];
            g(j) = acc;
        }
        // equilibration: unit diagonal in the scaled normal matrix
        Eigen::VectorXd S(n);
        for (int j = 0; j < n; ++j)
            S(j) = 1.0 / std::sqrt(std::max(JhJ(j, j).real(), 1e-12));
        Mat As(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) As(r, c) = JhJ(r, c) * S(r) * S(c);
        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            Mat A = As;
            for (int j = 0; j < n; ++j) A(j, j) += mu;
            CVec rhs(n);
            for (int j = 0; j < n; ++j) rhs(j) = -g(j) * S(j);
            CVec y = A.colPivHouseholderQr().solve(rhs);
            if (!y.allFinite()) { mu *= 4.0; continue; }
            std::vector<cplx> z2(z);
            for (int j = 0; j < n; ++j) z2[j] += S(j) * y(j);
            cp.residuals(z2, f2);
            double c2 = norm2(f2);
            if (c2 < cost) {
                z = std::move(z2);
                f = f2;
                cost = c2;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted) break;
    }
    double worst = 0.0;
    for (cplx x : f) worst = std::max(worst, std::abs(x));
    if (resid_out) *resid_out = worst;
    if (!std::isfinite(worst)) return std::nullopt;
    return z;
}

// LM with basin-hopping restarts: on a stalled descent, jitter the stall
// point multiplicatively and retry, keeping the best visit.  The landscape
// of the cleared identity develops many shallow local minima as L grows,
// and single-trajectory descent is not reliable there.
inline std::optional<std::vector<cplx>>
lm_solve(const CoeffProblem& cp, const std::vector<cplx>& z0, double* resid_out,
         int iters = 400, double tol = 1e-11, int hops = 12,
         std::uint64_t hop_seed = 20240901) {
    double best_resid = 1e300;
    std::optional<std::vector<cplx>> best;
    std::mt19937_64 rng(hop_seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<cplx> z = z0;
    for (int hop = 0; hop <= hops; ++hop) {
        double r = 1e300;
        auto out = lm_core(cp, z, &r, iters, tol);
        if (out && r < best_resid) {
            best_resid = r;
            best = out;
        }
        if (best_resid < tol) break;
        // hop from the best point found so far
        const std::vector<cplx>& base = best ? *best : z0;
        z = base;
        for (cplx& c : z)
            c *= 1.0 + 0.15 * cplx(N(rng), N(rng));
    }
    if (resid_out) *resid_out = best_resid;
    return best;
}

// Linear least-squares seed for q1 at fixed q: the cleared identity is linear
// in the Q1 coefficients.
inline std::vector<cplx> solve_q1_linear(const CoeffProblem& cp, const std::vector<cplx>& q) {
    const double eta = cp.p.eta;
    const int m = int(cp.u.size());
    const int Mb = cp.Mb;
    Mat A(m, Mb);
    CVec b(m);
    for (int i = 0; i < m; ++i) {
        const cplx uu = cp.u[i];
        const cplx f1 = (uu + eta / 2.0) * cp.lam[i];
        const cplx f2 = -tq::w3_poly(uu, cp.p) * (cp.p.xi + uu) * tq::ipow(uu + eta, 2 * cp.L);
        const cplx f3 = tq::ipow(uu, 2 * cp.L) * (uu - eta / 2.0) * (uu + cp.p.xip) * (uu + cp.p.xi);
        const cplx f4 = tq::ipow(uu, 2 * cp.L) * (uu - cp.p.xip) * (uu - cp.p.xi) * (uu + eta / 2.0);
        const cplx f5 = -2.0 * cp.p.h * tq::ipow(uu, 2 * cp.L + 1)
                      * (uu - eta / 2.0) * (uu + eta / 2.0);
        const cplx s = uu * (uu + eta), sm = uu * (uu - eta);
        const cplx w = uu * uu, wp = (uu + eta) * (uu + eta), wm = (uu - eta) * (uu - eta);
        const cplx Q = poly_eval_mon(s, q), Qm = poly_eval_mon(sm, q);
        const cplx a1 = f1 * Q + f2 * Qm, a2 = f3 * Qm, a3 = f4 * Q;
        cplx pw = 1.0, pwp = 1.0, pwm = 1.0;
        double rowmax = 1e-300;
        for (int j = 0; j < Mb; ++j) {
            A(i, j) = a1 * pw + a2 * pwp + a3 * pwm;
            rowmax = std::max(rowmax, std::abs(A(i, j)));
            pw *= w; pwp *= wp; pwm *= wm;
        }
        b(i) = -(a1 * pw + a2 * pwp + a3 * pwm + f5 * Q * Qm);
        rowmax = std::max(rowmax, std::abs(b(i)));
        for (int j = 0; j < Mb; ++j) A(i, j) /= rowmax;
        b(i) /= rowmax;
    }
    CVec c = A.colPivHouseholderQr().solve(b);
    std::vector<cplx> q1(Mb);
    for (int j = 0; j < Mb; ++j) q1[j] = c(j);
    return q1;
}

// Spin-root candidate sets that extend a previous (smaller-L) configuration
// by one or two roots on coarse real/imaginary/conjugate-pair grids.
inline std::vector<std::vector<cplx>>
lam_candidates(const std::vector<cplx>& prev, int M) {
    std::vector<std::vector<cplx>> out;
    std::vector<double> grid;
    for (int k = 0; k < 16; ++k) grid.push_back(0.25 + 7.5 * k / 15.0);
    const int need = M - int(prev.size());
    if (need <= 0) {
        out.push_back(prev);
        return out;
    }
    if (need == 1) {
        for (double g : grid) {
            auto a = prev; a.emplace_back(g, 0.0); out.push_back(a);
            auto b = prev; b.emplace_back(0.0, g); out.push_back(b);
        }
    } else if (need == 2) {
        for (double g : grid)
            for (double ph : {0.3, 0.8, 1.2}) {
                auto a = prev;
                a.push_back(g * std::exp(cplx(0.0, ph)));
                a.push_back(g * std::exp(cplx(0.0, -ph)));
                out.push_back(a);
            }
        for (size_t i = 0; i < grid.size(); i += 2)
            for (size_t j = 0; j < grid.size(); j += 2) {
                auto a = prev;
                a.emplace_back(grid[i], 0.0);
                a.emplace_back(0.0, grid[j]);
                out.push_back(a);
            }
    } else {
        out.push_back(prev);
    }
    return out;
}

inline std::vector<cplx> random_lam_set(int M, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };
    std::vector<cplx> lams;
    while (int(lams.size()) < M) {
        switch (rng() % 3) {
            case 0: lams.emplace_back(uni(0.3, 8.0), 0.0); break;
            case 1: lams.emplace_back(0.0, uni(0.3, 8.0)); break;
            default:
                if (M - int(lams.size()) >= 2) {
                    double r = uni(0.3, 8.0), ph = uni(0.2, 1.4);
                    lams.push_back(r * std::exp(cplx(0.0, ph)));
                    lams.push_back(r * std::exp(cplx(0.0, -ph)));
                } else {
                    lams.emplace_back(uni(0.3, 8.0), 0.0);
                }
        }
    }
    lams.resize(M);
    return lams;
}

} // namespace tqg

} // namespace opentj
