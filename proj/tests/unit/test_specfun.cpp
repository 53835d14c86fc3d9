#include <cmath>

#include "helpers.hpp"
#include "plasmon_ddi/material.hpp"
#include "plasmon_ddi/specfun.hpp"
#include "plasmon_ddi/validation.hpp"

using namespace plasmon_ddi;
using namespace plasmon_ddi::specfun;

// reference values: tests/oracles/sphere_green_mp.py special (mpmath, 40 digits)
TEST_SUITE("specfun")
{
    TEST_CASE("j_10 at a complex argument")
    {
        const auto j = spherical_bessel_j(12, {2.0, 0.5});
        CHECK(test::rel(j[10], {-6.8906008848351163e-8, 6.2359975284277003e-8}) < 1e-12);
    }

    TEST_CASE("h_15 at a complex argument")
    {
        const auto h = spherical_hankel_h1(15, {3.0, 1.0});
        CHECK(test::rel(h[15], {67218856.726531123, -23106432.630554063}) < 1e-12);
    }

    TEST_CASE("low orders against the closed forms")
    {
        const cdouble z{1.7, -0.4};
        const auto j = spherical_bessel_j(2, z);
        const auto h = spherical_hankel_h1(2, z);
        CHECK(test::rel(j[0], std::sin(z) / z) < 1e-14);
        CHECK(test::rel(j[1], std::sin(z) / (z * z) - std::cos(z) / z) < 1e-13);
        const cdouble h0 = -kI * std::exp(kI * z) / z;
        CHECK(test::rel(h[0], h0) < 1e-14);
        CHECK(test::rel(h[1], -std::exp(kI * z) * (z + kI) / (z * z)) < 1e-14);
    }

    TEST_CASE("j at z = 0 is the limit")
    {
        const auto j = spherical_bessel_j(4, 0.0);
        CHECK(j[0] == cdouble(1.0));
        for (int n = 1; n <= 4; ++n)
            CHECK(j[n] == cdouble(0.0));
        CHECK_THROWS_AS(spherical_hankel_h1(3, 0.0), DomainError);
    }

    TEST_CASE("Wronskian j_n y_{n-1} - j_{n-1} y_n = 1/z^2")
    {
        for (cdouble z : {cdouble(0.5, 0.0), cdouble(3.0, 0.2), cdouble(12.0, -1.0)})
        {
            const int lmax = 30;
            const auto j = spherical_bessel_j(lmax, z);
            const auto h = spherical_hankel_h1(lmax, z);
            for (int n = 1; n <= 10; ++n)
            {
                const cdouble yn = (h[n] - j[n]) / kI;
                const cdouble ym = (h[n - 1] - j[n - 1]) / kI;
                CHECK(test::rel(j[n] * ym - j[n - 1] * yn, 1.0 / (z * z)) < 1e-10);
            }
        }
    }

    TEST_CASE("upward and downward recurrences agree where both are stable")
    {
        const cdouble z{25.0, 0.3};
        const auto up = spherical_bessel_j(20, z, Recurrence::upward);
        const auto down = spherical_bessel_j(20, z, Recurrence::downward);
        for (int n = 0; n <= 20; ++n)
            CHECK(test::rel(up[n], down[n]) < 1e-10);
    }

    TEST_CASE("scaled values survive far beyond double range")
    {
        const auto h = scaled_hankel_h1(150, 0.3);
        const double log2_abs = std::log2(std::abs(h.mantissa[150])) + h.exponent[150];
        // |h_150(0.3)| = 3.38e385 (mpmath)
        CHECK(log2_abs * std::log10(2.0) == doctest::Approx(385.529166).epsilon(1e-7));
        CHECK(std::isinf(std::abs(spherical_hankel_h1(150, 0.3)[150])));
    }

    TEST_CASE("downward j keeps the top orders finite inside a lossy metal")
    {
        // k1 a at 1 eV for a 20 nm silver sphere: the normalization once
        // underflowed the highest orders to NaN
        const cdouble eps = material::permittivity(material::DrudeModel::silver(), 1.0);
        const cdouble z = material::wavenumber(eps, 1.0) * 20.0;
        const auto s = scaled_bessel_j(200, z);
        for (int n = 0; n <= 200; ++n)
        {
            CHECK(std::isfinite(std::abs(s.mantissa[n])));
            CHECK(std::abs(s.mantissa[n]) > 0.0);
        }
        // asymptotically j_{n+1}/j_n -> z/(2n+3)
        const cdouble r = ScaledSeries::ratio(s, 200, s, 199);
        CHECK(test::rel(r, z / 401.0) < 1e-2);
        // and the low orders still match the closed form
        CHECK(test::rel(s.value(0), std::sin(z) / z) < 1e-12);
    }

    TEST_CASE("riccati derivative of j_0")
    {
        const cdouble z{2.0, 0.3};
        const auto j = spherical_bessel_j(3, z);
        const auto d = riccati_derivative(BesselFamily::j, j, z);
        CHECK(test::rel(d[0], std::cos(z)) < 1e-14);
    }

    TEST_CASE("associated Legendre with the Condon-Shortley phase")
    {
        const auto L = associated_legendre(6, 0.3);
        CHECK(test::rel(L.value(5, 3), 8.6591446160619698938) < 1e-13);
        CHECK(L.value(1, 1) == doctest::Approx(-std::sqrt(1.0 - 0.09)).epsilon(1e-15));
        CHECK(L.value(2, 0) == doctest::Approx(0.5 * (3 * 0.09 - 1)).epsilon(1e-15));
        // semi-normalized values stay bounded by one
        const auto big = associated_legendre(300, 0.1);
        double worst = 0.0;
        for (double v : big.pbar)
            worst = std::max(worst, std::abs(v));
        CHECK(worst <= 1.0 + 1e-12);
    }

    TEST_CASE("Legendre parity P_l^m(-x) = (-1)^(l+m) P_l^m(x)")
    {
        const auto a = associated_legendre(12, 0.37);
        const auto b = associated_legendre(12, -0.37);
        for (int l = 0; l <= 12; ++l)
            for (int m = 0; m <= l; ++m)
                CHECK(b.normalized(l, m) == doctest::Approx(((l + m) % 2 ? -1 : 1) * a.normalized(l, m)).epsilon(1e-13));
    }

    TEST_CASE("multiprecision oracle reproduces the mpmath values")
    {
        const auto j = validation::oracle_bessel(10, {2.0, 0.5}, 30);
        CHECK(j.relative_error_bound < 1e-30);
        CHECK(j.real_text.rfind("-6.89060088483511625188236903", 0) == 0);
        const auto h = validation::oracle_bessel(15, {3.0, 1.0}, 30, BesselFamily::h1);
        CHECK(test::rel(h.value, {67218856.726531123, -23106432.630554063}) < 1e-15);
        CHECK_THROWS_AS(validation::oracle_bessel(80, 1.0, 20), DomainError);
    }
}
