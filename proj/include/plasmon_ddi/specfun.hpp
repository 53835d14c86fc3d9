#pragma once

// Complex-argument spherical Bessel/Hankel functions and associated Legendre
// functions for the multipole expansion of the sphere Green tensor.
//
// Large-order values overflow or underflow a double long before the
// expansion has converged near the sphere surface (h_150(0.3) ~ 1e385), so
// the recurrences run on mantissa/exponent pairs (ScaledSeries). The plain
// arrays returned by spherical_bessel_j / spherical_hankel_h1 are the same
// numbers converted with ldexp, and saturate to 0 or inf out of range.
//
// Associated Legendre functions carry the Condon-Shortley phase:
// P_1^1(cos t) = -sin t.

#include <span>
#include <vector>

#include "plasmon_ddi/types.hpp"

namespace plasmon_ddi::specfun
{
    enum class BesselFamily
    {
        j,  ///< regular, j_n
        h1, ///< outgoing, h_n^(1) = j_n + i y_n
    };

    enum class Recurrence
    {
        automatic, ///< downward (Miller) for |z| < lmax, upward otherwise
        upward,
        downward,
    };

    /// value(n) = mantissa[n] * 2^exponent[n]
    struct ScaledSeries
    {
        std::vector<cdouble> mantissa;
        std::vector<int> exponent;

        int order_max() const { return static_cast<int>(mantissa.size()) - 1; }
        cdouble value(int n) const;
        /// f_n / g_n with the exponents combined before conversion.
        static cdouble ratio(const ScaledSeries& f, int n, const ScaledSeries& g, int m);
        /// f_n * g_m, exponents combined before conversion.
        static cdouble product(const ScaledSeries& f, int n, const ScaledSeries& g, int m);
    };

    ScaledSeries scaled_bessel_j(int lmax, cdouble z, Recurrence rec = Recurrence::automatic);
    ScaledSeries scaled_hankel_h1(int lmax, cdouble z);

    /// j_0..j_lmax at z. z = 0 returns the limit (1, 0, 0, ...).
    std::vector<cdouble> spherical_bessel_j(int lmax, cdouble z, Recurrence rec = Recurrence::automatic);

    /// h_0^(1)..h_lmax^(1) at z by upward recurrence. Throws DomainError at z = 0.
    std::vector<cdouble> spherical_hankel_h1(int lmax, cdouble z);

    /// d/dz [z f_n(z)] = z f_{n-1}(z) - n f_n(z), with the closed form at n = 0.
    std::vector<cdouble> riccati_derivative(BesselFamily family, std::span<const cdouble> f, cdouble z);

    /// [z f_n(z)]' / (z f_n(z)) = f_{n-1}/f_n - n/z, from scaled values so it
    /// stays finite where f_n itself does not.
    std::vector<cdouble> riccati_log_derivative(BesselFamily family, const ScaledSeries& f, cdouble z);

    struct SphericalBesselSet
    {
        int order_max = 0;
        cdouble argument;
        std::vector<cdouble> values_j;
        std::vector<cdouble> values_h1;
        std::vector<cdouble> ricatti_dj;
        std::vector<cdouble> ricatti_dh1;
    };

    SphericalBesselSet spherical_bessel_set(int lmax, cdouble z);

    /// Associated Legendre functions at x = cos(theta) for 0 <= m <= l <= lmax.
    ///
    /// Stored Schmidt semi-normalized, Pbar_l^m = sqrt((l-m)!/(l+m)!) P_l^m,
    /// which is bounded by 1 for any order. value() converts back to P_l^m.
    struct LegendreSet
    {
        int order_max = 0;
        double argument = 0.0; ///< x
        double sin_theta = 0.0;

        std::vector<double> pbar;       ///< Pbar_l^m
        std::vector<double> dpbar;      ///< d Pbar_l^m / d theta
        std::vector<double> m_over_sin; ///< m Pbar_l^m / sin(theta), finite at the poles

        static constexpr std::size_t index(int l, int m) { return static_cast<std::size_t>(l) * (l + 1) / 2 + m; }

        double normalized(int l, int m) const { return pbar[index(l, m)]; }
        double normalized_dtheta(int l, int m) const { return dpbar[index(l, m)]; }
        double normalized_m_over_sin(int l, int m) const { return m_over_sin[index(l, m)]; }

        /// Unnormalized P_l^m(x); overflows for large l+m.
        double value(int l, int m) const;
        /// Unnormalized dP_l^m / d theta.
        double dtheta(int l, int m) const;
    };

    LegendreSet associated_legendre(int lmax, double x);
}
