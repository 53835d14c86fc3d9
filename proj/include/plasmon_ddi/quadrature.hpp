#pragma once

// Globally adaptive Gauss-Kronrod (7, 15) quadrature for vector- or
// matrix-valued integrands. Segments are bisected largest-error first until
// the summed error estimate drops below max(abs_tol, rel_tol * |I|).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace plasmon_ddi::quadrature
{
    namespace detail
    {
        // Kronrod abscissae on [0, 1]; odd entries (1, 3, 5) are the Gauss nodes.
        inline constexpr std::array<double, 8> xgk = {
            0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
            0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
        };
        inline constexpr std::array<double, 8> wgk = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
        };
        inline constexpr std::array<double, 4> wg = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
        };
    }

    template <class T>
    struct Result
    {
        T value;
        double error = 0.0;
        int evaluations = 0;
        int segments = 0;
        bool converged = false;
    };

    template <class T>
    struct Segment
    {
        double a = 0.0;
        double b = 0.0;
        T value;
        double error = 0.0;
    };

    /// One 15-point Kronrod step with its embedded 7-point Gauss estimate.
    /// norm(x) must return a nonnegative size of x.
    template <class T, class F, class Norm>
    Segment<T> gauss_kronrod15(const F& f, double a, double b, const Norm& norm)
    {
        const double centre = 0.5 * (a + b);
        const double half = 0.5 * (b - a);

        T fc = f(centre);
        T kronrod = fc * detail::wgk[7];
        T gauss = fc * detail::wg[3];
        for (int j = 0; j < 7; ++j)
        {
            const double dx = half * detail::xgk[j];
            T f1 = f(centre - dx);
            T f2 = f(centre + dx);
            T sum = f1 + f2;
            kronrod = kronrod + sum * detail::wgk[j];
            if (j % 2 == 1)
                gauss = gauss + sum * detail::wg[j / 2];
        }
        kronrod = kronrod * half;
        gauss = gauss * half;
        return {a, b, kronrod, norm(kronrod - gauss)};
    }

    /// Adaptive integration over the union of [breaks[i], breaks[i+1]].
    template <class T, class F, class Norm>
    Result<T> integrate(const F& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                        const Norm& norm, int max_evaluations = 100000)
    {
        auto worse = [](const Segment<T>& x, const Segment<T>& y) { return x.error < y.error; };
        std::priority_queue<Segment<T>, std::vector<Segment<T>>, decltype(worse)> queue(worse);

        Result<T> out;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        {
            if (!(breaks[i + 1] > breaks[i]))
                continue;
            queue.push(gauss_kronrod15<T>(f, breaks[i], breaks[i + 1], norm));
            out.evaluations += 15;
        }
        if (queue.empty())
            throw std::invalid_argument("quadrature: empty integration range");

        auto totals = [&]() {
            auto copy = queue;
            Segment<T> s = copy.top();
            T sum = s.value;
            double err = s.error;
            copy.pop();
            while (!copy.empty())
            {
                sum = sum + copy.top().value;
                err += copy.top().error;
                copy.pop();
            }
            return std::pair<T, double>(sum, err);
        };

        auto [sum, err] = totals();
        while (err > std::max(abs_tol, rel_tol * norm(sum)) && out.evaluations + 30 <= max_evaluations)
        {
            Segment<T> worst = queue.top();
            queue.pop();
            const double mid = 0.5 * (worst.a + worst.b);
            if (!(mid > worst.a && mid < worst.b))
            {
                // interval exhausted at double resolution; keep it and stop
                queue.push(worst);
                break;
            }
            Segment<T> left = gauss_kronrod15<T>(f, worst.a, mid, norm);
            Segment<T> right = gauss_kronrod15<T>(f, mid, worst.b, norm);
            out.evaluations += 30;
            // running totals updated incrementally, re-summed at the end
            sum = sum - worst.value + left.value + right.value;
            err += left.error + right.error - worst.error;
            queue.push(left);
            queue.push(right);
        }

        std::tie(sum, err) = totals();
        out.value = sum;
        out.error = err;
        out.segments = static_cast<int>(queue.size());
        out.converged = err <= std::max(abs_tol, rel_tol * norm(sum));
        return out;
    }

    /// Composite Simpson rule on n (even) panels; used as a plain reference.
    template <class T, class F>
    T simpson(const F& f, double a, double b, int n)
    {
        if (n % 2)
            ++n;
        const double h = (b - a) / n;
        T sum = f(a) + f(b);
        for (int i = 1; i < n; ++i)
            sum = sum + f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return sum * (h / 3.0);
    }
}
