#include "plasmon_ddi/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace plasmon_ddi::specfun
{
    namespace
    {
        constexpr int kRescaleBits = 448;
        const double kRescaleThreshold = std::ldexp(1.0, kRescaleBits);

        double max_abs(cdouble v) { return std::max(std::abs(v.real()), std::abs(v.imag())); }

        cdouble scale2(cdouble v, int e) { return {std::ldexp(v.real(), e), std::ldexp(v.imag(), e)}; }

        // Moves the binary exponent of the mantissa into exponent so that the
        // mantissa magnitude sits near 1.
        void normalize(ScaledSeries& s)
        {
            for (std::size_t n = 0; n < s.mantissa.size(); n++)
            {
                const double a = max_abs(s.mantissa[n]);
                if (a == 0.0 || !std::isfinite(a))
                    continue;
                const int e = std::ilogb(a);
                s.mantissa[n] = scale2(s.mantissa[n], -e);
                s.exponent[n] += e;
            }
        }

        cdouble j0_closed(cdouble z) { return std::sin(z) / z; }
        cdouble j1_closed(cdouble z) { return std::sin(z) / (z * z) - std::cos(z) / z; }

        ScaledSeries upward_j(int lmax, cdouble z)
        {
            ScaledSeries s{std::vector<cdouble>(lmax + 1), std::vector<int>(lmax + 1, 0)};
            cdouble prev = j0_closed(z);
            s.mantissa[0] = prev;
            if (lmax == 0)
                return s;
            cdouble cur = j1_closed(z);
            s.mantissa[1] = cur;
            int e = 0;
            for (int n = 1; n < lmax; n++)
            {
                const cdouble next = (2.0 * n + 1.0) / z * cur - prev;
                prev = cur;
                cur = next;
                if (max_abs(cur) > kRescaleThreshold)
                {
                    cur = scale2(cur, -kRescaleBits);
                    prev = scale2(prev, -kRescaleBits);
                    e += kRescaleBits;
                }
                s.mantissa[n + 1] = cur;
                s.exponent[n + 1] = e;
            }
            return s;
        }

        // Miller's algorithm: recur downward from an order far beyond lmax,
        // then fix the overall constant against the closed form of j_0 (or j_1
        // near a zero of j_0).
        ScaledSeries downward_j(int lmax, cdouble z)
        {
            const int margin = std::max(15, static_cast<int>(std::ceil(10.0 * std::sqrt(std::abs(z)))));
            const int start = lmax + margin;

            ScaledSeries s{std::vector<cdouble>(lmax + 1), std::vector<int>(lmax + 1, 0)};
            cdouble above = 0.0;
            cdouble cur = 1.0;
            int e = 0;
            for (int n = start; n >= 1; n--)
            {
                const cdouble below = (2.0 * n + 1.0) / z * cur - above;
                above = cur;
                cur = below;
                if (max_abs(cur) > kRescaleThreshold)
                {
                    cur = scale2(cur, -kRescaleBits);
                    above = scale2(above, -kRescaleBits);
                    e += kRescaleBits;
                }
                if (n - 1 <= lmax)
                {
                    s.mantissa[n - 1] = cur;
                    s.exponent[n - 1] = e;
                }
            }

            const cdouble t0 = j0_closed(z);
            int ref = 0;
            cdouble target = t0;
            if (lmax >= 1)
            {
                const cdouble t1 = j1_closed(z);
                if (std::abs(t1) > std::abs(t0))
                {
                    ref = 1;
                    target = t1;
                }
            }
            // keep the scale factor's magnitude in the exponent; multiplying
            // the mantissas by it directly underflows the top orders
            const int eref = std::ilogb(max_abs(s.mantissa[ref]));
            const cdouble c = target / scale2(s.mantissa[ref], -eref);
            const int shift = s.exponent[ref] + eref;
            for (int n = 0; n <= lmax; n++)
            {
                s.mantissa[n] *= c;
                s.exponent[n] -= shift;
            }
            normalize(s);
            return s;
        }
    }

    cdouble ScaledSeries::value(int n) const
    {
        return scale2(mantissa[n], exponent[n]);
    }

    cdouble ScaledSeries::ratio(const ScaledSeries& f, int n, const ScaledSeries& g, int m)
    {
        return scale2(f.mantissa[n] / g.mantissa[m], f.exponent[n] - g.exponent[m]);
    }

    cdouble ScaledSeries::product(const ScaledSeries& f, int n, const ScaledSeries& g, int m)
    {
        return scale2(f.mantissa[n] * g.mantissa[m], f.exponent[n] + g.exponent[m]);
    }

    ScaledSeries scaled_bessel_j(int lmax, cdouble z, Recurrence rec)
    {
        if (lmax < 0)
            throw DomainError("spherical_bessel_j: lmax must be >= 0");
        if (z == cdouble(0.0))
        {
            ScaledSeries s{std::vector<cdouble>(lmax + 1, 0.0), std::vector<int>(lmax + 1, 0)};
            s.mantissa[0] = 1.0;
            return s;
        }
        if (rec == Recurrence::automatic)
            rec = std::abs(z) >= lmax ? Recurrence::upward : Recurrence::downward;
        ScaledSeries s = rec == Recurrence::upward || lmax == 0 ? upward_j(lmax, z) : downward_j(lmax, z);
        normalize(s);
        return s;
    }

    ScaledSeries scaled_hankel_h1(int lmax, cdouble z)
    {
        if (lmax < 0)
            throw DomainError("spherical_hankel_h1: lmax must be >= 0");
        if (z == cdouble(0.0))
            throw DomainError("spherical_hankel_h1: singular at z = 0");

        // e^{iz} = e^{-Im z} e^{i Re z}; the real exponential goes to the exponent.
        const double decay = -z.imag() / std::log(2.0);
        const int e0 = static_cast<int>(std::floor(decay));
        const cdouble phase = std::exp(cdouble(0.0, z.real())) * std::exp2(decay - e0);
        const cdouble ez = phase / z;

        ScaledSeries s{std::vector<cdouble>(lmax + 1), std::vector<int>(lmax + 1, e0)};
        cdouble prev = -kI * ez;
        s.mantissa[0] = prev;
        if (lmax >= 1)
        {
            cdouble cur = -(1.0 + kI / z) * ez;
            s.mantissa[1] = cur;
            int e = e0;
            for (int n = 1; n < lmax; n++)
            {
                const cdouble next = (2.0 * n + 1.0) / z * cur - prev;
                prev = cur;
                cur = next;
                if (max_abs(cur) > kRescaleThreshold)
                {
                    cur = scale2(cur, -kRescaleBits);
                    prev = scale2(prev, -kRescaleBits);
                    e += kRescaleBits;
                }
                s.mantissa[n + 1] = cur;
                s.exponent[n + 1] = e;
            }
        }
        normalize(s);
        return s;
    }

    std::vector<cdouble> spherical_bessel_j(int lmax, cdouble z, Recurrence rec)
    {
        const ScaledSeries s = scaled_bessel_j(lmax, z, rec);
        std::vector<cdouble> out(lmax + 1);
        for (int n = 0; n <= lmax; n++)
            out[n] = s.value(n);
        return out;
    }

    std::vector<cdouble> spherical_hankel_h1(int lmax, cdouble z)
    {
        const ScaledSeries s = scaled_hankel_h1(lmax, z);
        std::vector<cdouble> out(lmax + 1);
        for (int n = 0; n <= lmax; n++)
            out[n] = s.value(n);
        return out;
    }

    std::vector<cdouble> riccati_derivative(BesselFamily family, std::span<const cdouble> f, cdouble z)
    {
        if (f.empty())
            throw DomainError("riccati_derivative: empty input");
        if (family == BesselFamily::h1 && z == cdouble(0.0))
            throw DomainError("riccati_derivative: h1 family is singular at z = 0");

        std::vector<cdouble> out(f.size());
        out[0] = family == BesselFamily::j ? std::cos(z) : std::exp(kI * z);
        for (std::size_t n = 1; n < f.size(); n++)
            out[n] = z * f[n - 1] - static_cast<double>(n) * f[n];
        return out;
    }

    std::vector<cdouble> riccati_log_derivative(BesselFamily family, const ScaledSeries& f, cdouble z)
    {
        if (f.mantissa.empty())
            throw DomainError("riccati_log_derivative: empty input");
        if (z == cdouble(0.0))
            throw DomainError("riccati_log_derivative: undefined at z = 0");

        const int lmax = f.order_max();
        std::vector<cdouble> out(lmax + 1);
        out[0] = family == BesselFamily::j ? std::cos(z) / std::sin(z) : kI;
        for (int n = 1; n <= lmax; n++)
            out[n] = ScaledSeries::ratio(f, n - 1, f, n) - static_cast<double>(n) / z;
        return out;
    }

    SphericalBesselSet spherical_bessel_set(int lmax, cdouble z)
    {
        SphericalBesselSet set;
        set.order_max = lmax;
        set.argument = z;
        set.values_j = spherical_bessel_j(lmax, z);
        set.values_h1 = spherical_hankel_h1(lmax, z);
        set.ricatti_dj = riccati_derivative(BesselFamily::j, set.values_j, z);
        set.ricatti_dh1 = riccati_derivative(BesselFamily::h1, set.values_h1, z);
        return set;
    }

    double LegendreSet::value(int l, int m) const
    {
        double c = 1.0;
        for (int k = l - m + 1; k <= l + m; k++)
            c *= k;
        return normalized(l, m) * std::sqrt(c);
    }

    double LegendreSet::dtheta(int l, int m) const
    {
        double c = 1.0;
        for (int k = l - m + 1; k <= l + m; k++)
            c *= k;
        return normalized_dtheta(l, m) * std::sqrt(c);
    }

    LegendreSet associated_legendre(int lmax, double x)
    {
        if (lmax < 0)
            throw DomainError("associated_legendre: lmax must be >= 0");
        if (!(std::abs(x) <= 1.0))
            throw DomainError("associated_legendre: |x| > 1");

        LegendreSet set;
        set.order_max = lmax;
        set.argument = x;
        const double s = std::sqrt((1.0 - x) * (1.0 + x));
        set.sin_theta = s;

        const std::size_t count = LegendreSet::index(lmax, lmax) + 1;
        set.pbar.assign(count, 0.0);
        set.dpbar.assign(count, 0.0);
        set.m_over_sin.assign(count, 0.0);

        // over_sin holds Pbar_l^m / sin(theta) for m >= 1; it obeys the same
        // three-term recurrence in l, seeded without the division.
        std::vector<double> over_sin(count, 0.0);

        double pmm = 1.0;
        double umm = 0.0;
        for (int m = 0; m <= lmax; m++)
        {
            if (m >= 1)
            {
                const double f = std::sqrt((2.0 * m - 1.0) / (2.0 * m));
                umm = m == 1 ? -f : umm * (-s) * f;
                pmm = pmm * (-s) * f;
            }
            set.pbar[LegendreSet::index(m, m)] = pmm;
            over_sin[LegendreSet::index(m, m)] = umm;
            if (m + 1 > lmax)
                continue;

            const double g = std::sqrt(2.0 * m + 1.0);
            set.pbar[LegendreSet::index(m + 1, m)] = g * x * pmm;
            over_sin[LegendreSet::index(m + 1, m)] = g * x * umm;
            for (int l = m + 2; l <= lmax; l++)
            {
                const double a = (2.0 * l - 1.0) * x;
                const double b = std::sqrt((l - 1.0 - m) * (l - 1.0 + m));
                const double d = std::sqrt((l - static_cast<double>(m)) * (l + static_cast<double>(m)));
                set.pbar[LegendreSet::index(l, m)] =
                    (a * set.pbar[LegendreSet::index(l - 1, m)] - b * set.pbar[LegendreSet::index(l - 2, m)]) / d;
                over_sin[LegendreSet::index(l, m)] =
                    (a * over_sin[LegendreSet::index(l - 1, m)] - b * over_sin[LegendreSet::index(l - 2, m)]) / d;
            }
        }

        for (int l = 0; l <= lmax; l++)
        {
            for (int m = 0; m <= l; m++)
            {
                const std::size_t i = LegendreSet::index(l, m);
                const double up = m + 1 <= l ? set.pbar[LegendreSet::index(l, m + 1)] : 0.0;
                if (m == 0)
                {
                    set.dpbar[i] = std::sqrt(l * (l + 1.0)) * up;
                }
                else
                {
                    const double down = set.pbar[LegendreSet::index(l, m - 1)];
                    set.dpbar[i] = 0.5 * (std::sqrt((l + m + 1.0) * (l - m)) * up -
                                          std::sqrt((l + static_cast<double>(m)) * (l - m + 1.0)) * down);
                    set.m_over_sin[i] = m * over_sin[i];
                }
            }
        }
        return set;
    }
}
