#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "plasmon_ddi/ddi.hpp"
#include "plasmon_ddi/quadrature.hpp"
#include "plasmon_ddi/specfun.hpp"

using namespace plasmon_ddi;
using namespace plasmon_ddi::ddi;

namespace
{
    const double h = 1.0 / std::sqrt(2.0);
    const ComplexVec3 x_hat(1, 0, 0);
    const ComplexVec3 r_xy(h, kI * h, 0);
    const ComplexVec3 l_xy(h, -kI * h, 0);
    const ComplexVec3 r_yz(0, h, kI * h);
    const ComplexVec3 l_yz(0, h, -kI * h);

    green::SphereSystem no_sphere()
    {
        green::SphereSystem s;
        s.radius = 0.0;
        return s;
    }

    // Im G0 in spherical Bessel form, independent of the closed form in the library
    Eigen::Matrix3d im_free_green(const Vec3& r1, const Vec3& r2, double omega)
    {
        const double k = omega / kHbarC;
        const Vec3 d = r1 - r2;
        const double x = k * d.norm();
        const Vec3 u = d / d.norm();
        const double j0 = std::sin(x) / x;
        const double j1_over_x =
            x < 1e-2 ? 1.0 / 3.0 - x * x / 30.0 + std::pow(x, 4) / 840.0 : (std::sin(x) / x - std::cos(x)) / (x * x);
        const double p = j0 - j1_over_x;
        const double q = 3.0 * j1_over_x - j0;
        return k * k * k / (4 * kPi) * (p * Eigen::Matrix3d::Identity() + q * u * u.transpose());
    }
}

TEST_SUITE("ddi")
{
    TEST_CASE("normalizer and polarization handling")
    {
        const double k = 2.0 / kHbarC;
        CHECK(gamma0(2.0) == doctest::Approx(2 * k * k * k / (6 * kPi)).epsilon(1e-15));
        CHECK(gamma0(2.0, 3.0) == doctest::Approx(9 * gamma0(2.0)).epsilon(1e-15));
        const auto e = Emitter::make(Vec3(30, 0, 0), ComplexVec3(1.0, kI, 0.0));
        CHECK(e.polarization.norm() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK_THROWS_AS(Emitter::make(Vec3(30, 0, 0), ComplexVec3::Zero()), DomainError);
    }

    TEST_CASE("cross term of a circular and a linear dipole mixes Im and Re parts")
    {
        // u_i = x + iy, u_j = x: Gamma ~ Im G_xx - Re G_yx
        Matrix3c g;
        g << cdouble(1, 2), cdouble(3, 4), cdouble(5, 6), cdouble(7, 8), cdouble(9, 10), cdouble(11, 12), cdouble(13, 14),
            cdouble(15, 16), cdouble(17, 18);
        const cdouble c = contract(ComplexVec3(1, kI, 0), g, x_hat);
        CHECK(c.imag() == doctest::Approx(g(0, 0).imag() - g(1, 0).real()));
        const auto [gamma, delta] = normalized_rates(x_hat, g, x_hat, 2.0);
        const double k = 2.0 / kHbarC;
        CHECK(gamma == doctest::Approx(6 * kPi / (k * k * k) * 2.0));
        CHECK(delta == doctest::Approx(-3 * kPi / (k * k * k) * 1.0));
    }

    TEST_CASE("vacuum Purcell factor is one")
    {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> n;
        for (int t = 0; t < 20; ++t)
        {
            const ComplexVec3 u(cdouble(n(rng), n(rng)), cdouble(n(rng), n(rng)), cdouble(n(rng), n(rng)));
            const auto e = Emitter::make(Vec3(n(rng), n(rng), n(rng)) * 30.0, u);
            const auto r = self_coupling(e, no_sphere(), 2.0 + t * 0.05);
            CHECK(std::abs(r.gamma_ratio - 1.0) < 1e-10);
            CHECK(r.delta_ratio == 0.0);
        }
    }

    TEST_CASE("the sphere enhances the decay of a nearby radial dipole")
    {
        const auto e = Emitter::make(Vec3(25, 0, 0), x_hat);
        const auto r = self_coupling(e, green::SphereSystem{}, 2.937);
        CHECK(r.gamma_ratio > 10.0);
    }

    TEST_CASE("fig2 geometry at fixed truncation against the mpmath oracle")
    {
        // tests/oracles/sphere_green_mp.py fig2 2.937 30
        green::ExpansionOptions o;
        o.lmax = 30;
        const auto a = Emitter::make(Vec3(19, 11, 0), r_xy);
        const auto b = Emitter::make(Vec3(22, 0, 0), x_hat);
        const auto c = contrast(a, r_xy, l_xy, b, green::SphereSystem{}, 2.937, o);
        CHECK(test::rel(c.gamma_plus, -145.28945175813346) < 1e-9);
        CHECK(test::rel(c.delta_plus, 296.7455685558575) < 1e-9);
        CHECK(test::rel(c.gamma_minus, -11887.156189897125) < 1e-9);
        CHECK(test::rel(c.delta_minus, 1520.0864967227903) < 1e-9);
        CHECK(c.lmax_used == 30);
    }

    TEST_CASE("contrast helpers")
    {
        CHECK_FALSE(contrast_value(0.0, 0.0).has_value());
        CHECK(*contrast_value(2.0, 0.0) == 1.0);
        CHECK(*contrast_value(0.0, -3.0) == -1.0);
        CHECK(*contrast_value(-1.0, 3.0) == doctest::Approx(-0.5));
    }

    TEST_CASE("identical plus and minus give zero contrast")
    {
        const auto a = Emitter::make(Vec3(19, 11, 0), r_xy);
        const auto b = Emitter::make(Vec3(22, 0, 0), x_hat);
        const auto c = contrast(a, r_xy, r_xy, b, green::SphereSystem{}, 2.9);
        CHECK(*c.gamma_contrast == 0.0);
        CHECK(*c.delta_contrast == 0.0);
    }

    TEST_CASE("axis-symmetric selection rule: opposite sides of the sphere")
    {
        CHECK(selection_rule_check(l_yz, r_yz) == doctest::Approx(0.0).epsilon(1e-16));
        CHECK(selection_rule_check(r_yz, r_yz) == doctest::Approx(1.0));
        const auto a = Emitter::make(Vec3(-25, 0, 0), r_yz);
        const auto b = Emitter::make(Vec3(22, 0, 0), r_yz);
        for (double w : {2.85, 2.93, 3.0})
        {
            const auto c = contrast(a, r_yz, l_yz, b, green::SphereSystem{}, w);
            CHECK(std::abs(c.gamma_minus) < 1e-12 * std::abs(c.gamma_plus));
            CHECK(std::abs(c.delta_minus) < 1e-12 * std::abs(c.gamma_plus));
            CHECK(*c.gamma_contrast == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("dissipation matrix is Hermitian positive and matches the rate matrix for real dipoles")
    {
        const auto a = Emitter::make(Vec3(19, 11, 0), r_xy);
        const auto b = Emitter::make(Vec3(22, 0, 0), x_hat);
        const Eigen::Matrix2cd d = dissipation_matrix(a, b, green::SphereSystem{}, 2.937);
        CHECK((d - d.adjoint()).norm() < 1e-10 * d.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(d);
        CHECK(es.eigenvalues().minCoeff() >= -1e-6 * d.trace().real());

        const auto ar = Emitter::make(Vec3(19, 11, 0), ComplexVec3(0, 1, 0));
        const Eigen::Matrix2d m = rate_matrix(ar, b, green::SphereSystem{}, 2.937);
        const Eigen::Matrix2cd dr = dissipation_matrix(ar, b, green::SphereSystem{}, 2.937);
        CHECK((m.cast<cdouble>() - dr).norm() < 1e-10 * m.norm());
    }

    TEST_CASE("R3c vanishes at the mean transition energy")
    {
        auto a = Emitter::make(Vec3(19, 11, 0), r_xy, 2.937);
        auto b = Emitter::make(Vec3(22, 0, 0), x_hat, 2.937);
        const auto e = correction_r3c(a, b, green::SphereSystem{}, 2.937);
        CHECK(e.r3c.norm() == 0.0);
        CHECK(e.converged);
        CHECK(e.pi_g_norm > 0.0);
        CHECK_THROWS_AS(correction_r3c(a, b, green::SphereSystem{}, 6.0), DomainError);
        b.transition_energy = 0.0;
        CHECK_THROWS_AS(correction_r3c(a, b, green::SphereSystem{}, 2.9), DomainError);
    }

    TEST_CASE("R3c in vacuum against composite Simpson on the Bessel form of Im G0")
    {
        const auto a = Emitter::make(Vec3(19, 11, 0), r_xy, 2.937);
        const auto b = Emitter::make(Vec3(22, 0, 0), x_hat, 2.937);
        const double z = 2.947, wbar = 2.937, det = z - wbar;
        CorrectionOptions o;
        o.tol = 1e-9;
        const auto e = correction_r3c(a, b, no_sphere(), z, o);
        REQUIRE(e.converged);

        const auto f = [&](double w) -> Eigen::Matrix3d {
            if (w == 0.0)
                return Eigen::Matrix3d::Zero();
            return (-2.0 * det / ((wbar + w) * (wbar + w) - det * det)) * im_free_green(b.position, a.position, w);
        };
        const Eigen::Matrix3d ref = quadrature::simpson<Eigen::Matrix3d>(f, 0.0, e.cutoff, 20000);
        CHECK((e.r3c.real() - ref).norm() < 1e-8 * ref.norm());
        CHECK(e.r3c.imag().norm() == 0.0);
    }

    TEST_CASE("R3c is small at the fig2 geometry and stable under refinement")
    {
        const auto a = Emitter::make(Vec3(19, 11, 0), r_xy, 2.937);
        const auto b = Emitter::make(Vec3(22, 0, 0), x_hat, 2.937);
        CorrectionOptions o;
        const auto e = correction_r3c(a, b, green::SphereSystem{}, 2.947, o);
        o.tol *= 0.5;
        const auto f = correction_r3c(a, b, green::SphereSystem{}, 2.947, o);
        CHECK(e.converged);
        CHECK(e.ratio < 1e-2);
        CHECK((f.r3c - e.r3c).norm() <= e.quadrature_error);
    }
}

TEST_SUITE("quadrature")
{
    TEST_CASE("Gauss-Kronrod integrates smooth functions to rounding")
    {
        auto f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
        auto abs_norm = [](double v) { return std::abs(v); };
        const auto r = quadrature::integrate<double>(f, {0.0, 2.0, 10.0}, 1e-14, 1e-13, abs_norm, 10000);
        const double exact = (1.0 - std::exp(-10.0) * (std::cos(30.0) - 3 * std::sin(30.0))) / 10.0;
        CHECK(r.converged);
        CHECK(r.value == doctest::Approx(exact).epsilon(1e-13));
        CHECK(r.error < 1e-12);
    }

    TEST_CASE("adaptive refinement finds a narrow peak")
    {
        auto f = [](double x) { return 1e-3 / ((x - 0.3) * (x - 0.3) + 1e-6); };
        auto abs_norm = [](double v) { return std::abs(v); };
        const auto r = quadrature::integrate<double>(f, {0.0, 1.0}, 1e-12, 1e-10, abs_norm, 100000);
        const double exact = std::atan(0.7 / 1e-3) + std::atan(0.3 / 1e-3);
        CHECK(r.converged);
        CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
    }

    TEST_CASE("evaluation budget and bad ranges")
    {
        auto f = [](double x) { return std::sin(1000 * x); };
        auto abs_norm = [](double v) { return std::abs(v); };
        const auto r = quadrature::integrate<double>(f, {0.0, 100.0}, 1e-15, 1e-15, abs_norm, 300);
        CHECK_FALSE(r.converged);
        CHECK(r.evaluations <= 300 + 30);
        CHECK_THROWS(quadrature::integrate<double>(f, {1.0}, 1e-10, 1e-10, abs_norm, 100));
    }

    TEST_CASE("Simpson on a cubic is exact")
    {
        auto f = [](double x) { return x * x * x - 2 * x; };
        CHECK(quadrature::simpson<double>(f, 0.0, 2.0, 4) == doctest::Approx(0.0).epsilon(1e-14));
    }
}
