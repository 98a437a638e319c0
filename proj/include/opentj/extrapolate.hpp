#pragma once
// Algebraic sequence extrapolation for finite-size data F(L) -> F(inf).
// The table recursion accelerates sequences with leading correction L^{-omega};
// an exponent scan picks omega by minimizing the convergence spread.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace opentj {

struct BstTable {
    std::vector<std::vector<std::optional<double>>> t;  // t[m][n], column m
    double omega = 0.0;
    double estimate = 0.0;
    double spread = std::numeric_limits<double>::infinity();
    int depth = 0;   // column index of the estimate
};

// One extrapolation table at fixed omega.  Entries whose denominator
// underflows (|denom| < 1e-300) are marked invalid; the estimate is the
// deepest valid entry, preferring small n within a column.
inline BstTable bst(const std::vector<double>& F, const std::vector<double>& Ls, double omega) {
    const int N = int(F.size());
    if (N < 2 || Ls.size() != F.size())
        throw std::invalid_argument("bst: need >= 2 points with matching sizes");
    for (size_t i = 1; i < Ls.size(); ++i)
        if (!(Ls[i] > Ls[i - 1]))
            throw std::invalid_argument("bst: sizes must be strictly increasing");

    BstTable out;
    out.omega = omega;
    auto& T = out.t;
    T.assign(N, {});
    T[0].assign(N, std::nullopt);
    for (int n = 0; n < N; ++n) T[0][n] = F[n];

    auto at = [&](int m, int n) -> std::optional<double> {
        if (m < 0) return 0.0;              // virtual column T_{-1} = 0
        if (m >= N || n < 0 || n >= int(T[m].size())) return std::nullopt;
        return T[m][n];
    };

    for (int m = 1; m < N; ++m) {
        T[m].assign(N - m, std::nullopt);
        for (int n = 0; n < N - m; ++n) {
            auto tnp = at(m - 1, n + 1), tn = at(m - 1, n), tp2 = at(m - 2, n + 1);
            if (!tnp || !tn || !tp2) continue;
            double d1 = *tnp - *tn;
            double d2 = *tnp - *tp2;
            double ratio = d2 == 0.0 ? 0.0 : d1 / d2;
            double denom = std::pow(Ls[n] / Ls[n + m], -omega) * (1.0 - ratio) - 1.0;
            if (std::abs(denom) < 1e-300) continue;   // invalid entry
            double val = *tnp + d1 / denom;
            if (!std::isfinite(val)) continue;
            T[m][n] = val;
        }
    }

    // deepest valid entry
    for (int m = N - 1; m >= 0 && out.depth == 0; --m)
        for (int n = 0; n < int(T[m].size()); ++n)
            if (T[m][n]) {
                out.estimate = *T[m][n];
                out.depth = m;
                // spread from the two parents one column shallower
                double s = 0.0;
                auto p1 = at(m - 1, n), p2 = at(m - 1, n + 1);
                if (p1) s += std::abs(out.estimate - *p1);
                if (p2) s += std::abs(out.estimate - *p2);
                out.spread = (p1 || p2) ? s : std::numeric_limits<double>::infinity();
                if (m == 0) out.spread = std::numeric_limits<double>::infinity();
                goto done;
            }
done:
    if (out.depth == 0 && T[0].empty())
        throw std::runtime_error("bst: empty table");
    return out;
}

// Scan omega on [lo, hi] with the given step and keep the table whose
// convergence spread is smallest.
inline BstTable bst_auto_omega(const std::vector<double>& F, const std::vector<double>& Ls,
                               double lo = 0.5, double hi = 3.0, double step = 0.01) {
    if (!(lo < hi) || step <= 0)
        throw std::invalid_argument("bst_auto_omega: bad scan range");
    BstTable best;
    bool have = false;
    const int nsteps = int(std::floor((hi - lo) / step + 0.5));
    for (int k = 0; k <= nsteps; ++k) {
        double w = lo + k * step;
        BstTable tab = bst(F, Ls, w);
        if (!have || tab.spread < best.spread) {
            best = tab;
            have = true;
        }
    }
    if (!have) throw std::runtime_error("bst_auto_omega: no valid table in scan");
    return best;
}

} // namespace opentj
