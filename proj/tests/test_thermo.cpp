// Tests for the thermodynamic layer: convolution kernels, Fermi boundaries,
// the bulk energy density, and the surface energy computed by two routes.

#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "opentj/ground_state.hpp"
#include "opentj/thermo.hpp"

using namespace opentj;
using Catch::Approx;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("kernel normalization and symmetry") {
    REQUIRE(kernel_a(0.0, 1.0) == Approx(2.0 / pi).margin(1e-15));
    for (double u : {0.1, 0.37, 2.5}) {
        REQUIRE(kernel_a(u, 1.0) == Approx(kernel_a(-u, 1.0)).margin(1e-15));
        REQUIRE(kernel_a(u, -1.0) == Approx(-kernel_a(u, 1.0)).margin(1e-15));
    }
    using boost::math::quadrature::gauss_kronrod;
    double total = gauss_kronrod<double, 31>::integrate(
        [](double u) { return kernel_a(u, 1.0); }, -1.0, 1.0, 15, 1e-14);
    REQUIRE(total == Approx((2.0 / pi) * std::atan(2.0)).margin(1e-12));
}

TEST_CASE("Fermi boundary tends to 1/2 from the correct side") {
    REQUIRE(fermi_boundary(100000, 0.2) == Approx(0.5).margin(1e-4));
    REQUIRE(fermi_boundary(64, 0.2) > 0.5);
    REQUIRE(fermi_boundary(64, -0.2) < 0.5);
    REQUIRE_THROWS_AS(fermi_boundary(64, -0.6), std::invalid_argument);
}

TEST_CASE("bulk energy density is exactly -2/pi") {
    REQUIRE(bulk_density_energy() == Approx(-2.0 / pi).margin(1e-12));
}

TEST_CASE("surface energy anchor values") {
    REQUIRE(surface_energy_closed(0.0) == 0.0);
    REQUIRE(surface_energy_closed(0.5) == Approx(1.0 - 1.0 / pi).margin(1e-12));
    // small-field slope (4 + 2 pi)/pi
    REQUIRE(surface_energy_closed(1e-6) / 1e-6 ==
            Approx((4.0 + 2.0 * pi) / pi).epsilon(1e-3));
    REQUIRE(std::abs(surface_energy_closed(1e6) - 1.0) <= 1e-6);
    // the bound root makes the energy dive near the region edge
    REQUIRE(surface_energy_closed(-0.499) < -900.0);
    REQUIRE_THROWS_AS(surface_energy_closed(-0.5), std::invalid_argument);
}

TEST_CASE("closed form and quadrature agree across both regions") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-0.49, 5.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        double zeta = U(rng);
        worst = std::max(worst, std::abs(surface_energy_closed(zeta) -
                                         surface_energy_quadrature(zeta)));
    }
    REQUIRE(worst <= 1e-9);
}

TEST_CASE("surface energy is monotone for nonnegative fields") {
    double prev = surface_energy_closed(0.0);
    for (double zeta = 0.05; zeta <= 3.0; zeta += 0.05) {
        double cur = surface_energy_closed(zeta);
        REQUIRE(cur > prev);
        prev = cur;
    }
}

TEST_CASE("surface energy is continuous at zero field") {
    REQUIRE(std::abs(surface_energy_closed(1e-9)) <= 1e-6);
    REQUIRE(std::abs(surface_energy_closed(-1e-9)) <= 1e-6);
}

TEST_CASE("region bookkeeping in the combined report") {
    auto pos = surface_energy(0.3);
    REQUIRE(pos.region == SurfaceRegion::real_roots);
    REQUIRE(pos.delta_term == 1.0);
    auto neg = surface_energy(-0.3);
    REQUIRE(neg.region == SurfaceRegion::bound_state);
    REQUIRE(neg.delta_term == Approx(3.0 - 1.0 / (0.25 - 0.09)).margin(1e-12));
    REQUIRE(std::abs(pos.value - pos.quadrature_value) <= 1e-9);
}

TEST_CASE("finite-size surface term approaches the closed form") {
    for (double zeta : {0.05, 0.2, -0.2}) {
        double F = energy_hom(1024, zeta) + 2.0 * 1024 / pi;
        REQUIRE(std::abs(F - surface_energy_closed(zeta)) <= 0.01);
    }
}
