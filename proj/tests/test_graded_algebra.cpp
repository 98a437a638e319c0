// Structural tests for the graded operator algebra: permutation operator,
// R-matrix, graded embeddings, super transposition, supertrace, and the
// boundary K-matrices with their parameter constraints.

#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "opentj/graded_algebra.hpp"

using namespace opentj;
using Catch::Approx;

namespace {
const double pi = std::numbers::pi;

BoundaryParams benchmark_params() {
    return make_params(1.0, 0.6, pi / 5, pi / 3, 1.5, 2 * pi / 3, pi / 4, +1);
}

Mat random_matrix(long n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat A(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) A(i, j) = cplx(nd(rng), nd(rng));
    return A;
}
} // namespace

TEST_CASE("graded permutation entries and involution") {
    Mat P = graded_permutation();
    // boson-boson exchange keeps a + sign: states (1,1) -> (1,1) (1-based)
    REQUIRE(P(0, 0) == cplx(1.0, 0.0));
    // fermion-fermion exchange picks up the minus sign: (2,3) <-> (3,2)
    REQUIRE(P(1 * 3 + 2, 2 * 3 + 1) == cplx(-1.0, 0.0));
    REQUIRE(max_abs(P * P - Mat::Identity(9, 9)) == 0.0);
    // entries are integers
    for (long i = 0; i < 9; ++i)
        for (long j = 0; j < 9; ++j) {
            double re = P(i, j).real();
            REQUIRE(P(i, j).imag() == 0.0);
            REQUIRE(re == double(long(re)));
        }
}

TEST_CASE("R-matrix limits and unitarity") {
    double eta = 1.3;
    REQUIRE(max_abs(r_matrix(cplx(0.0), eta) - eta * graded_permutation()) == 0.0);
    REQUIRE(max_abs(r_matrix(cplx(1.0), 0.0) - Mat::Identity(9, 9)) == 0.0);

    std::mt19937_64 rng(4242);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k)
        worst = std::max(worst, unitarity_residual(cplx(nd(rng), nd(rng)), eta));
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("graded embeddings") {
    Mat id3 = Mat::Identity(3, 3);
    REQUIRE(max_abs(graded_embed(id3, {1}, 3) - Mat::Identity(27, 27)) == 0.0);

    Mat P = graded_permutation();
    for (int j = 0; j < 2; ++j) {
        Mat Pj = graded_embed(P, {j, j + 1}, 3);
        REQUIRE(max_abs(Pj * Pj - Mat::Identity(27, 27)) == 0.0);
    }

    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k)
        worst = std::max(worst,
                         ybe_residual(cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), 0.7));
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("super transposition") {
    std::mt19937_64 rng(7);
    Mat A = random_matrix(3, rng);
    Mat P3 = Mat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) P3(i, i) = (EPS[i] == 0) ? 1.0 : -1.0;

    Mat st1 = super_transpose(A, 0, 1);
    Mat st2 = super_transpose(st1, 0, 1);
    REQUIRE(max_abs(st2 - P3 * A * P3) <= 1e-14);
    Mat st4 = super_transpose(super_transpose(st2, 0, 1), 0, 1);
    REQUIRE(max_abs(st4 - A) <= 1e-14);
    REQUIRE(max_abs(super_transpose(Mat::Identity(3, 3), 0, 1) - Mat::Identity(3, 3)) == 0.0);

    double worst = 0.0;
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int k = 0; k < 100; ++k)
        worst = std::max(worst, crossing_residual(cplx(nd(rng), nd(rng)), 1.1));
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("supertrace") {
    REQUIRE(supertrace_full(Mat::Identity(3, 3)) == cplx(-1.0, 0.0));
    Mat D = Mat::Zero(3, 3);
    D(0, 0) = cplx(2.0, 1.0);
    D(1, 1) = cplx(-3.0, 0.5);
    D(2, 2) = cplx(0.7, -2.0);
    REQUIRE(std::abs(supertrace_full(D) - (D(0, 0) - D(1, 1) - D(2, 2))) == 0.0);

    // tracing the permutation over one factor leaves the identity (the parity
    // signs of the graded trace cancel those of the exchange)
    Mat s = supertrace(graded_permutation(), 0, 2);
    REQUIRE(max_abs(s - Mat::Identity(3, 3)) == 0.0);
}

TEST_CASE("K-matrices at special points") {
    BoundaryParams p = benchmark_params();
    REQUIRE(max_abs(k_minus(cplx(0.0), p) - p.xi * Mat::Identity(3, 3)) <= 1e-15);
    Mat kp = k_plus(cplx(p.eta / 2), p);
    REQUIRE(max_abs(kp - kp(0, 0) * Mat::Identity(3, 3)) <= 1e-12);
    REQUIRE(kp(0, 0).real() == Approx(p.xip - p.eta / 2).margin(1e-12));

    auto [r1, r2] = coefficient_constraints(p);
    REQUIRE(r1 <= 1e-15);
    REQUIRE(r2 <= 1e-15);
}

TEST_CASE("reflection identities over random parameter sets") {
    std::mt19937_64 prng(20240811);
    std::uniform_real_distribution<double> ang(-pi, pi), mag(0.2, 2.0);
    for (int set = 0; set < 5; ++set) {
        double eta = mag(prng);
        // pick a valid region at random
        int eps = (set % 2 == 0) ? +1 : -1;
        double xi = (set % 3 == 0) ? -mag(prng) : mag(prng);
        double xip = (region_ok(xi, 0.5, eps)) ? 0.5 * eta : 2.0 * eta;
        BoundaryParams p =
            make_params(eta, xi, ang(prng), ang(prng), xip, ang(prng), ang(prng), eps);
        std::mt19937_64 rng(1000 + set);
        auto rep = verify_identities(p, rng, 100);
        INFO("set " << set << " worst " << rep.worst());
        REQUIRE(rep.worst() <= 1e-12);
    }
}

TEST_CASE("coincident-point reflection residual") {
    BoundaryParams p = benchmark_params();
    cplx u(0.37, -0.81);
    REQUIRE(re_residual(u, u, p) <= 1e-12);
    REQUIRE(dual_re_residual(u, u, p) <= 1e-12);
}

TEST_CASE("broken coefficient constraint is detected") {
    BoundaryParams p = benchmark_params();
    BoundaryParams broken = make_params_raw(p.eta, p.xi, p.c, p.c1 + 1e-3, p.c2,
                                            p.xip, p.cp, p.c1p, p.c2p, p.eps);
    auto [r1, r2] = coefficient_constraints(broken);
    REQUIRE(r1 > 1e-10);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst_re = 0.0;
    for (int k = 0; k < 50; ++k)
        worst_re = std::max(worst_re,
                            re_residual(cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), broken));
    REQUIRE(worst_re > 1e-10);
}

TEST_CASE("boundary parameter regions") {
    // epsilon = +1 needs (xi<0, xi'<eta) or (xi>0, xi'>eta)
    REQUIRE_NOTHROW(make_params(1.0, -0.1, 0.3, 0.1, 0.45, 0.2, 0.4, +1));
    REQUIRE_NOTHROW(make_params(1.0, 0.6, 0.3, 0.1, 1.5, 0.2, 0.4, +1));
    REQUIRE_THROWS_AS(make_params(1.0, -0.1, 0.3, 0.1, 1.5, 0.2, 0.4, +1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_params(1.0, 0.6, 0.3, 0.1, 0.45, 0.2, 0.4, +1),
                      std::invalid_argument);
    // epsilon = -1 is the mirrored region
    REQUIRE_NOTHROW(make_params(1.0, -0.1, 0.3, 0.1, 1.5, 0.2, 0.4, -1));
    REQUIRE_NOTHROW(make_params(1.0, 0.6, 0.3, 0.1, 0.45, 0.2, 0.4, -1));
    REQUIRE_THROWS_AS(make_params(1.0, -0.1, 0.3, 0.1, 0.45, 0.2, 0.4, -1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_params(1.0, 0.0, 0.3, 0.1, 1.5, 0.2, 0.4, +1),
                      std::invalid_argument);
}

TEST_CASE("field mismatch h vanishes for aligned boundaries") {
    // parallel: same angles, eps = +1 -> exact zero
    BoundaryParams par = make_params(1.0, 0.6, pi / 5, pi / 3, 1.5, pi / 5, pi / 3, +1);
    REQUIRE(par.h == 0.0);
    // anti-parallel: theta' = pi - theta, phi' = phi + pi, eps = -1
    for (double theta : {0.4, pi / 5, 1.1})
        for (double phi : {-0.7, 0.3}) {
            BoundaryParams ap =
                make_params(1.0, -0.1, theta, phi, 1.5, pi - theta, phi + pi, -1);
            REQUIRE(std::abs(ap.h) <= 1e-15);
        }
    // generic unparallel fields have h != 0
    REQUIRE(std::abs(benchmark_params().h) > 0.1);
}

TEST_CASE("boundary chemical potentials by region") {
    // eta = 1: xi < 0 makes chi_1 > 1
    for (double xi : {-0.05, -0.3, -2.0}) {
        BoundaryParams p = make_params(1.0, xi, 0.2, 0.1, 0.45, 0.3, 0.2, +1);
        REQUIRE(p.chi1 > 1.0);
    }
    // xi' <= 1/2 puts chi_L in [0, 1); 1/2 < xi' < 1 makes it negative
    for (double xip : {0.1, 0.3, 0.5}) {
        BoundaryParams p = make_params(1.0, -0.1, 0.2, 0.1, xip, 0.3, 0.2, +1);
        REQUIRE(p.chiL >= 0.0);
        REQUIRE(p.chiL < 1.0);
    }
    for (double xip : {0.55, 0.8, 0.95}) {
        BoundaryParams p = make_params(1.0, -0.1, 0.2, 0.1, xip, 0.3, 0.2, +1);
        REQUIRE(p.chiL < 0.0);
    }
}
