#pragma once

// Dyadic Green tensor of a sphere in vacuum, for field and source points
// outside the sphere.
//
// Normalization: every tensor here solves
//     curl curl G - eps k0^2 G = k0^2 I delta(r - r'),
// i.e. it is k0^2 times the unit-source tensor of most of the literature, and
// has units of nm^-1. With this choice Im G_0(r, r) = k0^3/(6 pi) I and the
// rates of ddi.hpp need no further constants.

#include <optional>
#include <vector>

#include "plasmon_ddi/material.hpp"
#include "plasmon_ddi/specfun.hpp"
#include "plasmon_ddi/types.hpp"

namespace plasmon_ddi::green
{
    struct SphereSystem
    {
        double radius = 20.0; ///< nm; 0 means no sphere
        material::DrudeModel drude;
        material::HostMedium host;

        cdouble eps_sphere(double omega) const { return material::permittivity(drude, omega); }
    };

    enum class AzimuthalBasis
    {
        real_even_odd,
        complex_exponential,
    };

    struct ExpansionOptions
    {
        /// Fixed truncation order; disables the convergence search.
        std::optional<int> lmax;
        /// Converged when the last three orders contribute less than this
        /// fraction of the tensor norm.
        double tail_tol = 1e-10;
        int lmax_cap = 200;
        AzimuthalBasis basis = AzimuthalBasis::real_even_odd;
    };

    struct GreenTensor
    {
        Matrix3c matrix = Matrix3c::Zero();
        double omega = 0.0;
        Vec3 r_field = Vec3::Zero();
        Vec3 r_source = Vec3::Zero();
        int lmax_used = 0;
        /// relative contribution of the last three orders
        double tail = 0.0;
    };

    /// Reflection coefficients of the sphere for outgoing TE (M) and TM (N)
    /// spherical waves. Index n runs 0..order_max; entry 0 is unused.
    struct MieCoefficients
    {
        int order_max = 0;
        double omega = 0.0;
        double radius = 0.0;
        cdouble eps_sphere = 1.0;
        double k0 = 0.0;

        std::vector<cdouble> b_M;
        std::vector<cdouble> b_N;
        /// b * h_n(k0 a)^2. Finite for every order, unlike b itself.
        std::vector<cdouble> t_M;
        std::vector<cdouble> t_N;
        /// h_n(k0 a), used to form h_n(k0 r) / h_n(k0 a) at the points.
        specfun::ScaledSeries hankel_surface;
    };

    MieCoefficients mie_coefficients(const SphereSystem& sys, double omega, int lmax);
    MieCoefficients mie_coefficients(double radius, cdouble eps_sphere, double omega, int lmax);

    /// Closed-form homogeneous tensor between distinct points.
    GreenTensor free_space_green(const Vec3& r1, const Vec3& r2, double omega);

    /// Im G_0(r, r) per Cartesian component: k0^3 / (6 pi).
    double im_free_space_green_selfterm(double omega);

    /// Starting truncation order of the convergence search.
    int automatic_start_order(double k0, double r_min);

    GreenTensor scattering_green(const SphereSystem& sys, const Vec3& r_field, const Vec3& r_source, double omega,
                                 const ExpansionOptions& options = {});

    /// Same as above with precomputed coefficients; they must cover the
    /// orders the expansion reaches (lmax_cap or the fixed lmax).
    GreenTensor scattering_green(const MieCoefficients& mie, const Vec3& r_field, const Vec3& r_source,
                                 const ExpansionOptions& options = {});

    /// Free-space plus scattering tensor for distinct points.
    GreenTensor total_green(const SphereSystem& sys, const Vec3& r_field, const Vec3& r_source, double omega,
                            const ExpansionOptions& options = {}, const MieCoefficients* mie = nullptr);

    /// Homogeneous tensor summed from its vector-spherical-wave expansion
    /// about the origin, truncated at lmax. Cross-check for the closed form.
    GreenTensor free_space_green_multipole(const Vec3& r1, const Vec3& r2, double omega, int lmax,
                                           AzimuthalBasis basis = AzimuthalBasis::real_even_odd);

    /// Number of orders the coefficient table needs for these options.
    int required_orders(const ExpansionOptions& options);
}
