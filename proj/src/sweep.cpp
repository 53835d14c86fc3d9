#include "plasmon_ddi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <utility>

namespace plasmon_ddi::sweep
{
    const char* axis_name(Axis axis)
    {
        switch (axis)
        {
        case Axis::frequency: return "frequency";
        case Axis::position_A: return "position_A";
        case Axis::radius: return "radius";
        }
        return "?";
    }

    Axis parse_axis(const std::string& name)
    {
        if (name == "frequency")
            return Axis::frequency;
        if (name == "position_A")
            return Axis::position_A;
        if (name == "radius")
            return Axis::radius;
        throw Error("unknown sweep axis '" + name + "' (expected frequency, position_A or radius)");
    }

    void SweepSpec::validate() const
    {
        if (grid.empty())
            throw Error("sweep grid is empty");
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            if (!std::isfinite(grid[i]))
                throw Error("sweep grid contains a non-finite value");
            if (i > 0 && !(grid[i] > grid[i - 1]))
                throw Error("sweep grid must be strictly increasing");
        }
        if (axis == Axis::position_A && !(emitter_a.position.norm() > 0.0))
            throw Error("position_A sweep needs a nonzero emitter_a position to define the direction");
    }

    bool SweepTable::has_failures() const
    {
        return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
    }

    std::vector<double> linspace(double start, double stop, int n)
    {
        if (n < 1)
            throw Error("linspace: need at least one point");
        if (n == 1)
            return {start};
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i)
            v[i] = start + (stop - start) * i / (n - 1);
        v.back() = stop;
        return v;
    }

    namespace
    {
        struct RowSetup
        {
            double omega;
            green::SphereSystem sphere;
            ddi::Emitter a;
        };

        RowSetup setup(const SweepSpec& spec, double x)
        {
            RowSetup s{spec.omega, spec.sphere, spec.emitter_a};
            switch (spec.axis)
            {
            case Axis::frequency: s.omega = x; break;
            case Axis::radius: s.sphere.radius = x; break;
            case Axis::position_A: s.a.position = x * spec.emitter_a.position.normalized(); break;
            }
            return s;
        }

        template <class Job>
        void parallel_for(std::size_t count, int threads, const Job& job)
        {
            int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
            n = std::clamp(n, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
            if (n == 1)
            {
                for (std::size_t i = 0; i < count; ++i)
                    job(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(n);
            for (int t = 0; t < n; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < count; i = next++)
                        job(i);
                });
            for (auto& th : pool)
                th.join();
        }
    }

    SweepRow evaluate_row(const SweepSpec& spec, double axis_value, const green::MieCoefficients* mie)
    {
        SweepRow row;
        row.axis_value = axis_value;
        try
        {
            const RowSetup s = setup(spec, axis_value);
            row.omega = s.omega;
            row.result = ddi::contrast(s.a, spec.plus, spec.minus, spec.emitter_b, s.sphere, s.omega, spec.expansion, mie);
            if (spec.self_rates)
            {
                ddi::Emitter ap = s.a;
                ap.polarization = ddi::normalized_polarization(spec.plus);
                row.self_rate_a = ddi::self_coupling(ap, s.sphere, s.omega, spec.expansion, mie).gamma_ratio;
                row.self_rate_b = ddi::self_coupling(spec.emitter_b, s.sphere, s.omega, spec.expansion, mie).gamma_ratio;
            }
        }
        catch (const ConvergenceError& e)
        {
            row = SweepRow{};
            row.axis_value = axis_value;
            row.error = e.what();
            row.nonconvergent = true;
        }
        catch (const Error& e)
        {
            row = SweepRow{};
            row.axis_value = axis_value;
            row.error = e.what();
        }
        return row;
    }

    SweepTable run_sweep(const SweepSpec& spec)
    {
        spec.validate();
        const std::size_t n = spec.grid.size();

        // read-only coefficient tables, one per distinct (omega, radius)
        std::vector<std::pair<double, double>> keys;
        std::vector<std::size_t> key_of_row(n, 0);
        std::vector<green::MieCoefficients> cache;
        if (spec.cache_mie)
        {
            std::map<std::pair<double, double>, std::size_t> index;
            for (std::size_t i = 0; i < n; ++i)
            {
                const RowSetup s = setup(spec, spec.grid[i]);
                auto key = std::make_pair(s.omega, s.sphere.radius);
                auto [it, inserted] = index.emplace(key, keys.size());
                if (inserted)
                    keys.push_back(key);
                key_of_row[i] = it->second;
            }
            cache.resize(keys.size());
            std::vector<char> ok(keys.size(), 1);
            const int orders = green::required_orders(spec.expansion);
            parallel_for(keys.size(), spec.threads, [&](std::size_t k) {
                green::SphereSystem sys = spec.sphere;
                sys.radius = keys[k].second;
                try
                {
                    cache[k] = green::mie_coefficients(sys, keys[k].first, orders);
                }
                catch (const Error&)
                {
                    ok[k] = 0; // the row reports the failure itself
                }
            });
            for (std::size_t k = 0; k < keys.size(); ++k)
                if (!ok[k])
                    cache[k].order_max = -1;
        }

        SweepTable table;
        table.axis = spec.axis;
        table.rows.resize(n);
        parallel_for(n, spec.threads, [&](std::size_t i) {
            const green::MieCoefficients* mie = nullptr;
            if (spec.cache_mie && cache[key_of_row[i]].order_max >= 0)
                mie = &cache[key_of_row[i]];
            table.rows[i] = evaluate_row(spec, spec.grid[i], mie);
        });
        return table;
    }

    std::vector<Band> bands_where(const SweepTable& table, const std::function<bool(const SweepRow&)>& pred)
    {
        std::vector<Band> out;
        const auto& rows = table.rows;
        std::size_t i = 0;
        while (i < rows.size())
        {
            if (!pred(rows[i]))
            {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < rows.size() && pred(rows[j + 1]))
                ++j;
            out.push_back({rows[i].axis_value, rows[j].axis_value, 0});
            i = j + 1;
        }
        return out;
    }

    FlipReport find_flips(const SweepTable& table, double hi, double band_threshold)
    {
        if (table.rows.empty())
            throw Error("find_flips: empty table");

        FlipReport rep;
        rep.hi = hi;
        rep.band_threshold = band_threshold;

        bool armed = false; // seen a row above +hi since the last flip
        double last_high = 0.0;
        for (const SweepRow& r : table.rows)
        {
            if (!r.error.empty() || !r.result.gamma_contrast)
                continue;
            const double c = *r.result.gamma_contrast;
            if (c > hi)
            {
                armed = true;
                last_high = r.axis_value;
            }
            else if (c < -hi && armed)
            {
                rep.flips.push_back({last_high, r.axis_value});
                armed = false;
            }
        }

        for (int sign : {+1, -1})
        {
            auto bands = bands_where(table, [&](const SweepRow& r) {
                return r.error.empty() && r.result.gamma_contrast && sign * *r.result.gamma_contrast > band_threshold;
            });
            for (Band& b : bands)
            {
                b.sign = sign;
                rep.bands.push_back(b);
            }
        }
        std::sort(rep.bands.begin(), rep.bands.end(), [](const Band& x, const Band& y) { return x.low < y.low; });
        return rep;
    }
}
