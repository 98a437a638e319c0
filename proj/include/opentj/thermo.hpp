#pragma once
// Thermodynamic-limit quantities: root densities, Fermi boundaries, the bulk
// energy density -2/pi, and the boundary (surface) energy E_b(zeta) computed
// two independent ways, by adaptive quadrature of the density convolution and
// by a partial-fraction closed form.

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "opentj/graded_algebra.hpp"

namespace opentj {

// a_n(u) = (1/2pi) n / (u^2 + n^2/4); the sign of n is kept, so a_{-n} = -a_n
inline double kernel_a(double u, double n) {
    return (1.0 / (2.0 * PI)) * n / (u * u + n * n / 4.0);
}

enum class SurfaceRegion { real_roots, bound_state };

// Fermi boundary of the finite-L root distribution (leading 1/L correction).
inline double fermi_boundary(int L, double zeta) {
    if (zeta <= -0.5) throw std::invalid_argument("fermi_boundary: need zeta > -1/2");
    double denom = 4.0 * L + 4.0 * zeta / (1.0 + 4.0 * zeta * zeta);
    if (zeta >= 0)
        return 0.5 + (PI - 2.0 * std::atan(1.0 / (2.0 * zeta))) / denom;
    return 0.5 - (PI + 2.0 * std::atan(1.0 / (2.0 * zeta))) / denom;
}

// e_g = -2 pi \int_{-1/2}^{1/2} a_1(u)^2 du + 1.  The integral is
// (2+pi)/(2 pi^2), giving exactly -2/pi; this is asserted internally.
inline double bulk_density_energy() {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [](double u) { double a = kernel_a(u, 1.0); return a * a; };
    double integral = gauss_kronrod<double, 31>::integrate(f, -0.5, 0.5, 15, 1e-14);
    double expect = (2.0 + PI) / (2.0 * PI * PI);
    if (std::abs(integral - expect) > 1e-12)
        throw std::runtime_error("bulk_density_energy: kernel integral check failed");
    double eg = -2.0 * PI * integral + 1.0;
    if (std::abs(eg + 2.0 / PI) > 1e-12)
        throw std::runtime_error("bulk_density_energy: -2/pi check failed");
    return eg;
}

struct SurfaceEnergyResult {
    double zeta = 0.0;
    SurfaceRegion region = SurfaceRegion::real_roots;
    double value = 0.0;             // closed form
    double quadrature_value = 0.0;  // independent route
    double delta_term = 0.0;        // additive constant of the region
};

namespace detail {

// (2 arctan(1/(2z)) - pi z) / (2 pi (z^2 - 1/4)), the removable singularity
// at z = 1/2 handled by a local Taylor expansion of the numerator.
inline double surface_kernel_closed(double z) {
    double d = z - 0.5;
    if (std::abs(d) > 1e-4)
        return (2.0 * std::atan(1.0 / (2.0 * z)) - PI * z) / (2.0 * PI * (z * z - 0.25));
    double ratio = (-2.0 - PI) + 2.0 * d - (8.0 / 6.0) * d * d;
    return ratio / (2.0 * PI * (z + 0.5));
}

inline double surface_delta(double zeta) {
    return zeta >= 0 ? 1.0 : 3.0 - 1.0 / (0.25 - zeta * zeta);
}

} // namespace detail

// closed form for E_b(zeta); exact 0 at zeta = 0 by continuity from above
inline double surface_energy_closed(double zeta) {
    if (zeta <= -0.5) throw std::invalid_argument("surface_energy: need zeta > -1/2");
    if (zeta == 0.0) return 0.0;
    double k = detail::surface_kernel_closed(std::abs(zeta));
    if (zeta < 0) k = -k;
    return k + (2.0 / PI) * std::atan(1.0 / (2.0 * zeta)) + detail::surface_delta(zeta);
}

// quadrature route: -pi \int_{-1/2}^{1/2} a_1(u) a_{2 zeta}(u) du plus the
// same boundary terms.  The integrand is glued from segments split at the
// half-width scales 0 and +-2|zeta| so the adaptive rule never straddles
// the narrow peak of a_{2 zeta}.
inline double surface_energy_quadrature(double zeta) {
    if (zeta <= -0.5) throw std::invalid_argument("surface_energy: need zeta > -1/2");
    if (zeta == 0.0) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double u) { return kernel_a(u, 1.0) * kernel_a(u, 2.0 * zeta); };
    double cuts[5] = {-0.5, -2.0 * std::abs(zeta), 0.0, 2.0 * std::abs(zeta), 0.5};
    double total = 0.0, prev = -0.5;
    for (double c : cuts) {
        if (c <= prev || c > 0.5) continue;
        total += gauss_kronrod<double, 31>::integrate(f, prev, c, 15, 1e-14);
        prev = c;
    }
    if (prev < 0.5)
        total += gauss_kronrod<double, 31>::integrate(f, prev, 0.5, 15, 1e-14);
    return -PI * total + (2.0 / PI) * std::atan(1.0 / (2.0 * zeta)) + detail::surface_delta(zeta);
}

inline SurfaceEnergyResult surface_energy(double zeta) {
    SurfaceEnergyResult r;
    r.zeta = zeta;
    r.region = zeta >= 0 ? SurfaceRegion::real_roots : SurfaceRegion::bound_state;
    r.value = surface_energy_closed(zeta);
    r.quadrature_value = surface_energy_quadrature(zeta);
    r.delta_term = detail::surface_delta(zeta);
    return r;
}

} // namespace opentj
