#include "plasmon_ddi/validation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <Eigen/Eigenvalues>

#include "plasmon_ddi/ddi.hpp"
#include "plasmon_ddi/material.hpp"

namespace plasmon_ddi::validation
{
    namespace mp = boost::multiprecision;
    using real100 = mp::cpp_bin_float_100;
    using complex100 = mp::cpp_complex_100;

    const char* status_name(Status s)
    {
        switch (s)
        {
        case Status::pass: return "pass";
        case Status::fail: return "FAIL";
        case Status::skipped: return "skipped";
        }
        return "?";
    }

    bool ValidationReport::ok() const
    {
        return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == Status::fail; });
    }

    std::string ValidationReport::to_text() const
    {
        std::ostringstream os;
        char line[256];
        for (const CheckResult& c : checks)
        {
            std::snprintf(line, sizeof line, "%-8s %-32s residual %-10.3g tol %-8.1e %7.3f s", status_name(c.status),
                          c.id.c_str(), c.residual, c.tolerance, c.runtime_s);
            os << line;
            if (!c.detail.empty())
                os << "  " << c.detail;
            os << '\n';
        }
        const auto failed = std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == Status::fail; });
        os << checks.size() << " checks, " << failed << " failed (seed " << seed << (quick ? ", quick" : "") << ")\n";
        return os.str();
    }

    // ------------------------------------------------------------------ oracle

    namespace
    {
        struct SeriesSum
        {
            complex100 value;
            real100 error; // absolute
        };

        // sum_k (-z^2/4)^k / (k! Gamma(nu + k + 1)) for half-integer nu = n + 1/2 or -n - 1/2
        SeriesSum half_integer_series(const complex100& z, int twice_nu)
        {
            const real100 half = real100(1) / 2;
            const real100 nu = real100(twice_nu) / 2;

            // Gamma(nu + 1) from Gamma(1/2) by the recurrence, never at a pole
            real100 gamma = mp::sqrt(boost::math::constants::pi<real100>());
            if (twice_nu > 0)
                for (real100 x = half; x < nu + 1 - half / 2; x += 1)
                    gamma *= x;
            else
                for (real100 x = -half; x > nu + half / 2; x -= 1)
                    gamma /= x;

            const complex100 w = -(z * z) / 4;
            const real100 aw = mp::abs(w);
            complex100 term = complex100(1) / gamma;
            complex100 sum = term;
            real100 biggest = mp::abs(term);
            const real100 eps = std::numeric_limits<real100>::epsilon();

            for (int k = 0; k < 20000; ++k)
            {
                const real100 den = real100(k + 1) * (nu + k + 1);
                term *= w / den;
                sum += term;
                const real100 at = mp::abs(term);
                biggest = std::max(biggest, at);
                const real100 ratio = aw / (real100(k + 2) * mp::abs(nu + k + 2));
                if (ratio < half && at <= eps * biggest * 1e-5)
                {
                    const real100 tail = at * ratio / (1 - ratio);
                    return {sum, tail + real100(k + 2) * biggest * eps};
                }
            }
            throw ConvergenceError("oracle_bessel: ascending series did not terminate", 0, 0.0);
        }

        cdouble to_double(const complex100& z)
        {
            return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
        }
    }

    OracleValue oracle_bessel(int l, cdouble z, int digits, specfun::BesselFamily family)
    {
        if (digits < 1 || digits > 50)
            throw DomainError("oracle_bessel: digits must be in 1..50");
        if (l < 0 || l > 60)
            throw DomainError("oracle_bessel: order must be in 0..60");
        if (std::abs(z) > 50.0)
            throw DomainError("oracle_bessel: |z| must not exceed 50");
        if (z == 0.0)
            throw DomainError("oracle_bessel: z = 0");

        const complex100 zz(z.real(), z.imag());
        const real100 sqrt_pi = mp::sqrt(boost::math::constants::pi<real100>());
        const complex100 half_z = zz / 2;

        // j_l = (sqrt(pi)/2) (z/2)^l S_{l+1/2}
        const SeriesSum sj = half_integer_series(zz, 2 * l + 1);
        const complex100 pj = (sqrt_pi / 2) * mp::pow(half_z, l);
        const complex100 j = pj * sj.value;
        real100 err = mp::abs(pj) * sj.error;
        complex100 result = j;

        if (family == specfun::BesselFamily::h1)
        {
            // y_l = (-1)^(l+1) (sqrt(pi)/z) (z/2)^-l S_{-l-1/2}
            const SeriesSum sy = half_integer_series(zz, -2 * l - 1);
            const complex100 py = ((l % 2) ? 1 : -1) * (sqrt_pi / zz) / mp::pow(half_z, l);
            const complex100 y = py * sy.value;
            result = j + complex100(0, 1) * y;
            err += mp::abs(py) * sy.error;
        }

        const real100 mag = mp::abs(result);
        const real100 rel = mag > 0 ? err / mag : err;
        if (rel > mp::pow(real100(10), -digits))
            throw ConvergenceError("oracle_bessel: series bound exceeds the requested digits", l,
                                   static_cast<double>(rel));

        OracleValue out;
        out.value = to_double(result);
        out.relative_error_bound = static_cast<double>(rel);
        out.real_text = result.real().str(digits, std::ios::scientific);
        out.imag_text = result.imag().str(digits, std::ios::scientific);
        return out;
    }

    // ------------------------------------------------------------------ checks

    namespace
    {
        using Clock = std::chrono::steady_clock;

        struct Context
        {
            std::uint64_t seed;
            bool quick;
            green::SphereSystem sphere;
            int configs; // randomized configurations per green/ddi check
        };

        struct Outcome
        {
            double residual = 0.0;
            std::string detail;
            bool skipped = false;
        };

        struct Check
        {
            std::string id;
            double tolerance;
            std::function<Outcome(const Context&)> run;
        };

        std::mt19937_64 rng_for(const Context& ctx, std::uint64_t salt)
        {
            std::seed_seq seq{ctx.seed, salt};
            return std::mt19937_64(seq);
        }

        double uniform(std::mt19937_64& rng, double lo, double hi)
        {
            // explicit mapping; std::uniform_real_distribution is not
            // specified identically across standard libraries
            const double u = (rng() >> 11) * 0x1.0p-53;
            return lo + (hi - lo) * u;
        }

        Vec3 random_direction(std::mt19937_64& rng)
        {
            for (;;)
            {
                Vec3 v(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
                const double n = v.norm();
                if (n > 0.1 && n <= 1.0)
                    return v / n;
            }
        }

        // at least 2 nm from the surface, where the default order cap converges
        Vec3 exterior_point(std::mt19937_64& rng, double radius)
        {
            return random_direction(rng) * (radius + uniform(rng, 2.0, 10.0));
        }

        ComplexVec3 random_polarization(std::mt19937_64& rng, bool complex_valued)
        {
            ComplexVec3 u;
            for (int i = 0; i < 3; ++i)
                u[i] = cdouble(uniform(rng, -1, 1), complex_valued ? uniform(rng, -1, 1) : 0.0);
            return ddi::normalized_polarization(u);
        }

        struct PairConfig
        {
            Vec3 r1, r2;
            double omega;
        };

        PairConfig random_pair(std::mt19937_64& rng, double radius)
        {
            PairConfig c;
            c.omega = uniform(rng, 2.6, 3.2);
            do
            {
                c.r1 = exterior_point(rng, radius);
                c.r2 = exterior_point(rng, radius);
            } while ((c.r1 - c.r2).norm() < 1.0);
            return c;
        }

        double rel_norm(const Matrix3c& d, const Matrix3c& ref)
        {
            const double n = ref.norm();
            return n > 0.0 ? d.norm() / n : d.norm();
        }

        bool no_sphere(const Context& ctx) { return !(ctx.sphere.radius > 0.0); }

        // ---- specfun

        Outcome check_oracle(const Context& ctx, specfun::BesselFamily family)
        {
            const std::vector<int> orders = ctx.quick ? std::vector<int>{0, 5, 15, 40} : std::vector<int>{0, 1, 2, 5, 10, 15, 25, 40, 60};
            const std::vector<cdouble> args = ctx.quick
                ? std::vector<cdouble>{{2.0, 0.5}, {3.0, 1.0}, {12.0, 0.3}}
                : std::vector<cdouble>{{0.5, 0.0}, {1.0, 0.0}, {2.0, 0.5}, {3.0, 1.0}, {0.3, 0.8}, {7.5, 0.0}, {12.0, 0.3}, {25.0, 1.0}, {40.0, 0.5}};
            Outcome o;
            for (cdouble z : args)
            {
                const int lmax = orders.back();
                const std::vector<cdouble> v = family == specfun::BesselFamily::j ? specfun::spherical_bessel_j(lmax, z)
                                                                                  : specfun::spherical_hankel_h1(lmax, z);
                for (int l : orders)
                {
                    const cdouble ref = oracle_bessel(l, z, 30, family).value;
                    o.residual = std::max(o.residual, std::abs(v[l] - ref) / std::abs(ref));
                }
            }
            return o;
        }

        Outcome check_wronskian(const Context& ctx)
        {
            const int npts = ctx.quick ? 12 : 60;
            Outcome o;
            for (int i = 0; i < npts; ++i)
            {
                const double x = 0.1 * std::pow(1000.0, static_cast<double>(i) / (npts - 1));
                const auto j = specfun::spherical_bessel_j(60, x);
                const auto h = specfun::spherical_hankel_h1(60, x);
                for (int n = 1; n <= 60; ++n)
                {
                    const double jn = j[n].real(), yn = h[n].imag();
                    const double dj = j[n - 1].real() - (n + 1) / x * jn;
                    const double dy = h[n - 1].imag() - (n + 1) / x * yn;
                    o.residual = std::max(o.residual, std::abs(x * x * (jn * dy - dj * yn) - 1.0));
                }
            }
            return o;
        }

        Outcome check_recurrences(const Context&)
        {
            Outcome o;
            for (cdouble z : {cdouble(20.0, 0.0), cdouble(50.0, 0.5), cdouble(100.0, 0.0), cdouble(35.0, 2.0)})
            {
                const int lmax = static_cast<int>(std::abs(z) / 2);
                const auto up = specfun::spherical_bessel_j(lmax, z, specfun::Recurrence::upward);
                const auto down = specfun::spherical_bessel_j(lmax, z, specfun::Recurrence::downward);
                for (int n = 0; n <= lmax; ++n)
                    o.residual = std::max(o.residual, std::abs(up[n] - down[n]) / std::abs(down[n]));
            }
            return o;
        }

        Outcome check_legendre(const Context&)
        {
            Outcome o;
            for (int i = 0; i <= 40; ++i)
            {
                const double x = -1.0 + i / 20.0;
                const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
                const double x2 = x * x;
                const double ref[5][5] = {
                    {1.0},
                    {x, -s},
                    {0.5 * (3 * x2 - 1), -3 * x * s, 3 * s * s},
                    {0.5 * x * (5 * x2 - 3), -1.5 * (5 * x2 - 1) * s, 15 * x * s * s, -15 * s * s * s},
                    {0.125 * (35 * x2 * x2 - 30 * x2 + 3), -2.5 * x * (7 * x2 - 3) * s, 7.5 * (7 * x2 - 1) * s * s,
                     -105 * x * s * s * s, 105 * s * s * s * s},
                };
                const auto p = specfun::associated_legendre(4, x);
                const auto q = specfun::associated_legendre(4, -x);
                for (int l = 0; l <= 4; ++l)
                    for (int m = 0; m <= l; ++m)
                    {
                        const double scale = std::max(1.0, std::abs(ref[l][m]));
                        o.residual = std::max(o.residual, std::abs(p.value(l, m) - ref[l][m]) / scale);
                        const double parity = ((l + m) % 2) ? -1.0 : 1.0;
                        o.residual = std::max(o.residual, std::abs(q.value(l, m) - parity * p.value(l, m)) / scale);
                    }
            }
            return o;
        }

        // ---- material

        Outcome check_passivity_material(const Context& ctx)
        {
            Outcome o;
            double prev = -INFINITY;
            for (int i = 0; i < 1000; ++i)
            {
                const double w = 0.1 + 9.9 * i / 999.0;
                const cdouble e = material::permittivity(ctx.sphere.drude, w);
                if (!(e.imag() > 0.0))
                    o.residual = std::max(o.residual, 1.0);
                if (!(e.real() > prev))
                    o.residual = std::max(o.residual, 1.0);
                prev = e.real();
                if (!(material::wavenumber(e, w).imag() >= 0.0))
                    o.residual = std::max(o.residual, 1.0);
            }
            o.detail = "Im eps > 0, Re eps increasing, Im k >= 0 on 1000 points";
            return o;
        }

        // ---- green

        Outcome check_multipole(const Context&)
        {
            Outcome o;
            const Vec3 d1 = Vec3(0.3, -0.5, 0.8).normalized();
            const Vec3 d2 = Vec3(-0.6, 0.2, 0.4).normalized();
            for (double kr : {0.5, 2.0, 10.0})
            {
                const double omega = 2.5;
                const double k = material::vacuum_wavenumber(omega);
                const double R = kr / k;
                const Vec3 r2 = 0.35 * R * d2;
                const Vec3 r1 = r2 + R * d1;
                const double rho = std::max(r1.norm(), r2.norm()) * k;
                const int lmax = static_cast<int>(80 + 2 * rho);
                const Matrix3c closed = green::free_space_green(r1, r2, omega).matrix;
                for (auto basis : {green::AzimuthalBasis::real_even_odd, green::AzimuthalBasis::complex_exponential})
                {
                    const Matrix3c series = green::free_space_green_multipole(r1, r2, omega, lmax, basis).matrix;
                    o.residual = std::max(o.residual, rel_norm(series - closed, closed));
                }
            }
            o.detail = "kR = 0.5, 2, 10; both azimuthal bases";
            return o;
        }

        Outcome check_reciprocity(const Context& ctx)
        {
            auto rng = rng_for(ctx, 11);
            Outcome o;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const PairConfig c = random_pair(rng, ctx.sphere.radius);
                const Matrix3c g12 = green::total_green(ctx.sphere, c.r1, c.r2, c.omega).matrix;
                const Matrix3c g21 = green::total_green(ctx.sphere, c.r2, c.r1, c.omega).matrix;
                o.residual = std::max(o.residual, rel_norm(g12 - g21.transpose(), g12));
            }
            return o;
        }

        Outcome check_mirror(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            auto rng = rng_for(ctx, 12);
            Outcome o;
            for (int i = 0; i < ctx.configs; ++i)
            {
                PairConfig c = random_pair(rng, ctx.sphere.radius);
                for (Vec3* r : {&c.r1, &c.r2})
                {
                    const double n = r->norm();
                    (*r)[2] = 0.0;
                    *r *= n / r->norm();
                }
                if ((c.r1 - c.r2).norm() < 1.0)
                    continue;
                const Matrix3c g = green::total_green(ctx.sphere, c.r1, c.r2, c.omega).matrix;
                const double off = std::abs(g(2, 0)) + std::abs(g(2, 1)) + std::abs(g(0, 2)) + std::abs(g(1, 2));
                o.residual = std::max(o.residual, off / g.norm());
            }
            return o;
        }

        Outcome check_x_axis(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            auto rng = rng_for(ctx, 13);
            Outcome o;
            const double a = ctx.sphere.radius;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const double omega = uniform(rng, 2.6, 3.2);
                const double s1 = rng() & 1 ? 1.0 : -1.0;
                const double s2 = rng() & 1 ? 1.0 : -1.0;
                Vec3 r1(s1 * (a + uniform(rng, 2.0, 10.0)), 0, 0);
                Vec3 r2(s2 * (a + uniform(rng, 2.0, 10.0)), 0, 0);
                if ((r1 - r2).norm() < 1.0)
                    r2[0] += s2 * 2.0;
                const Matrix3c g = green::total_green(ctx.sphere, r1, r2, omega).matrix;
                double off = std::abs(g(1, 1) - g(2, 2));
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q)
                        if (p != q)
                            off += std::abs(g(p, q));
                o.residual = std::max(o.residual, off / g.norm());
            }
            return o;
        }

        Outcome check_rotation(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            auto rng = rng_for(ctx, 14);
            Outcome o;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const PairConfig c = random_pair(rng, ctx.sphere.radius);
                const double phi = uniform(rng, 0.0, 2.0 * kPi);
                const Eigen::Matrix3d rot = Eigen::AngleAxisd(phi, Vec3::UnitZ()).toRotationMatrix();
                const Matrix3c g = green::total_green(ctx.sphere, c.r1, c.r2, c.omega).matrix;
                const Matrix3c gr = green::total_green(ctx.sphere, rot * c.r1, rot * c.r2, c.omega).matrix;
                const Matrix3c rc = rot.cast<cdouble>();
                o.residual = std::max(o.residual, rel_norm(gr - rc * g * rc.transpose(), g));
            }
            return o;
        }

        Outcome check_lmax_stability(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            auto rng = rng_for(ctx, 15);
            Outcome o;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const PairConfig c = random_pair(rng, ctx.sphere.radius);
                const green::GreenTensor g = green::scattering_green(ctx.sphere, c.r1, c.r2, c.omega);
                green::ExpansionOptions more;
                more.lmax = g.lmax_used + 5;
                const green::GreenTensor g5 = green::scattering_green(ctx.sphere, c.r1, c.r2, c.omega, more);
                o.residual = std::max(o.residual, (g5.matrix - g.matrix).cwiseAbs().maxCoeff() / g.matrix.norm());
            }
            o.detail = "largest entry change relative to the tensor norm";
            return o;
        }

        Outcome check_basis(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            auto rng = rng_for(ctx, 16);
            Outcome o;
            const int n = std::max(2, ctx.configs / 5);
            for (int i = 0; i < n; ++i)
            {
                const PairConfig c = random_pair(rng, ctx.sphere.radius);
                green::ExpansionOptions re, cx;
                re.lmax = cx.lmax = 60;
                cx.basis = green::AzimuthalBasis::complex_exponential;
                const Matrix3c a = green::scattering_green(ctx.sphere, c.r1, c.r2, c.omega, re).matrix;
                const Matrix3c b = green::scattering_green(ctx.sphere, c.r1, c.r2, c.omega, cx).matrix;
                o.residual = std::max(o.residual, rel_norm(a - b, a));
            }
            return o;
        }

        Outcome check_far_field(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            // Two points 1e4 nm out but 50 nm apart. For widely separated far
            // points the scattered part falls off only like R/(r1 r2) relative
            // to free space, about 4e-4 at the plasmon resonance.
            const Vec3 r1(1e4, 0.0, 0.0), r2(1e4, 50.0, 0.0);
            const Matrix3c g = green::total_green(ctx.sphere, r1, r2, 2.937).matrix;
            const Matrix3c g0 = green::free_space_green(r1, r2, 2.937).matrix;
            return {rel_norm(g - g0, g0), "points 1e4 nm from the sphere, 50 nm apart"};
        }

        // ---- ddi

        Outcome check_vacuum_purcell(const Context& ctx)
        {
            auto rng = rng_for(ctx, 21);
            green::SphereSystem vac = ctx.sphere;
            vac.radius = 0.0;
            Outcome o;
            for (int i = 0; i < 100; ++i)
            {
                const double omega = uniform(rng, 0.5, 5.0);
                const auto e = ddi::Emitter::make(exterior_point(rng, 20.0), random_polarization(rng, true));
                const double r = ddi::self_coupling(e, vac, omega).gamma_ratio;
                // the same number straight from Im G0(r, r)
                const double k = material::vacuum_wavenumber(omega);
                const Matrix3c im0 = Matrix3c::Identity() * cdouble(0.0, green::im_free_space_green_selfterm(omega));
                const double direct = 6.0 * kPi / (k * k * k) * ddi::contract(e.polarization, im0, e.polarization).imag();
                o.residual = std::max({o.residual, std::abs(r - 1.0), std::abs(direct - 1.0)});
            }
            return o;
        }

        Outcome check_dissipation(const Context& ctx)
        {
            auto rng = rng_for(ctx, 22);
            Outcome o;
            double literal_real = 0.0;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const PairConfig c = random_pair(rng, ctx.sphere.radius);
                const auto a = ddi::Emitter::make(c.r1, random_polarization(rng, true));
                const auto b = ddi::Emitter::make(c.r2, random_polarization(rng, true));
                const Eigen::Matrix2cd m = ddi::dissipation_matrix(a, b, ctx.sphere, c.omega);
                const double tr = m.trace().real();
                const double lo = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(m).eigenvalues().minCoeff();
                o.residual = std::max(o.residual, -lo / tr);

                // real polarizations: the plain rate matrix is the same object
                const auto ar = ddi::Emitter::make(c.r1, random_polarization(rng, false));
                const auto br = ddi::Emitter::make(c.r2, random_polarization(rng, false));
                const Eigen::Matrix2d rm = ddi::rate_matrix(ar, br, ctx.sphere, c.omega);
                const auto ev = Eigen::EigenSolver<Eigen::Matrix2d>(rm).eigenvalues();
                const double lo_r = std::min(ev[0].real(), ev[1].real());
                literal_real = std::max(literal_real, -lo_r / rm.trace());
            }
            o.residual = std::max(o.residual, literal_real);
            o.detail = "-min eigenvalue / trace";
            return o;
        }

        Outcome check_self_passivity(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            auto rng = rng_for(ctx, 23);
            Outcome o;
            double worst = INFINITY;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const double omega = uniform(rng, 1.0, 4.0);
                const auto e = ddi::Emitter::make(exterior_point(rng, ctx.sphere.radius), random_polarization(rng, true));
                worst = std::min(worst, ddi::self_coupling(e, ctx.sphere, omega).gamma_ratio);
            }
            o.residual = worst > 0.0 ? 0.0 : 1.0 - worst;
            char buf[64];
            std::snprintf(buf, sizeof buf, "smallest Gamma_ii/Gamma0 = %.4g", worst);
            o.detail = buf;
            return o;
        }

        Outcome check_selection_rule(const Context& ctx)
        {
            if (no_sphere(ctx))
                return {0.0, "no sphere", true};
            auto rng = rng_for(ctx, 24);
            Outcome o;
            const double a = ctx.sphere.radius;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const double omega = uniform(rng, 2.6, 3.2);
                const Vec3 ra(-(a + uniform(rng, 2.0, 10.0)), 0, 0);
                const Vec3 rb(a + uniform(rng, 2.0, 10.0), 0, 0);
                const cdouble p(uniform(rng, -1, 1), uniform(rng, -1, 1));
                const cdouble q(uniform(rng, -1, 1), uniform(rng, -1, 1));
                const ComplexVec3 ua = ddi::normalized_polarization(ComplexVec3(0.0, p, q));
                const ComplexVec3 ub = ComplexVec3(0.0, -std::conj(ua[2]), std::conj(ua[1]));
                const auto ea = ddi::Emitter::make(ra, ua);
                const auto eb = ddi::Emitter::make(rb, ub);
                const auto same = ddi::Emitter::make(rb, ua);
                const auto zero = ddi::coupling(ea, eb, ctx.sphere, omega);
                const auto ref = ddi::coupling(ea, same, ctx.sphere, omega);
                const double scale = std::hypot(ref.gamma_ratio, ref.delta_ratio);
                o.residual = std::max(o.residual, std::hypot(zero.gamma_ratio, zero.delta_ratio) / scale);
            }
            return o;
        }

        Outcome check_pairing(const Context& ctx)
        {
            auto rng = rng_for(ctx, 25);
            Outcome o;
            for (int i = 0; i < ctx.configs; ++i)
            {
                const PairConfig c = random_pair(rng, ctx.sphere.radius);
                const ComplexVec3 ua = random_polarization(rng, true);
                const ComplexVec3 ub = random_polarization(rng, true);
                const auto ij = ddi::coupling(ddi::Emitter::make(c.r1, ua), ddi::Emitter::make(c.r2, ub), ctx.sphere, c.omega);
                const auto ji = ddi::coupling(ddi::Emitter::make(c.r2, ub.conjugate()), ddi::Emitter::make(c.r1, ua.conjugate()),
                                              ctx.sphere, c.omega);
                const double scale = std::hypot(ij.gamma_ratio, ij.delta_ratio);
                o.residual = std::max(o.residual, std::hypot(ij.gamma_ratio - ji.gamma_ratio, ij.delta_ratio - ji.delta_ratio) / scale);
            }
            return o;
        }

        std::vector<Check> all_checks()
        {
            using specfun::BesselFamily;
            return {
                {"specfun.oracle_j", 1e-12, [](const Context& c) { return check_oracle(c, BesselFamily::j); }},
                {"specfun.oracle_h1", 1e-12, [](const Context& c) { return check_oracle(c, BesselFamily::h1); }},
                {"specfun.wronskian", 1e-10, check_wronskian},
                {"specfun.recurrence_agreement", 1e-10, check_recurrences},
                {"specfun.legendre_explicit", 1e-13, check_legendre},
                {"material.passivity", 0.5, check_passivity_material},
                {"green.multipole_vs_closed_form", 1e-8, check_multipole},
                {"green.reciprocity", 1e-10, check_reciprocity},
                {"green.mirror_zeros", 1e-12, check_mirror},
                {"green.x_axis_symmetry", 1e-12, check_x_axis},
                {"green.rotation_covariance", 1e-9, check_rotation},
                {"green.lmax_stability", 1e-6, check_lmax_stability},
                {"green.basis_equivalence", 1e-12, check_basis},
                {"green.far_field", 1e-6, check_far_field},
                {"ddi.vacuum_purcell", 1e-10, check_vacuum_purcell},
                {"ddi.dissipation_positivity", 1e-6, check_dissipation},
                {"ddi.self_rate_passivity", 0.5, check_self_passivity},
                {"ddi.selection_rule_zeros", 1e-12, check_selection_rule},
                {"ddi.reciprocity_pairing", 1e-10, check_pairing},
            };
        }
    }

    ValidationReport run_all(const ValidationOptions& options)
    {
        const Context ctx{options.seed, options.quick, options.sphere, options.quick ? 6 : 50};
        const std::vector<Check> checks = all_checks();

        ValidationReport report;
        report.seed = options.seed;
        report.quick = options.quick;
        report.checks.resize(checks.size());

        auto run_one = [&](std::size_t i) {
            CheckResult& r = report.checks[i];
            r.id = checks[i].id;
            r.tolerance = checks[i].tolerance;
            const auto t0 = Clock::now();
            try
            {
                const Outcome o = checks[i].run(ctx);
                r.residual = o.residual;
                r.detail = o.detail;
                if (o.skipped)
                    r.status = Status::skipped;
                else
                    r.status = std::isfinite(o.residual) && o.residual < r.tolerance ? Status::pass : Status::fail;
            }
            catch (const std::exception& e)
            {
                r.status = Status::fail;
                r.residual = INFINITY;
                r.detail = std::string("exception: ") + e.what();
            }
            r.runtime_s = std::chrono::duration<double>(Clock::now() - t0).count();
        };

        int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
        threads = std::clamp(threads, 1, static_cast<int>(checks.size()));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 1; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < checks.size(); i = next++)
                    run_one(i);
            });
        for (std::size_t i = next++; i < checks.size(); i = next++)
            run_one(i);
        for (auto& th : pool)
            th.join();
        return report;
    }
}
