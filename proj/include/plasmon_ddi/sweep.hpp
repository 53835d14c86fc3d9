#pragma once

// Grid scans of the +/- polarization pair over frequency, emitter-A distance
// or sphere radius. Rows are independent; the output order is the grid order
// whatever the worker count.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plasmon_ddi/ddi.hpp"
#include "plasmon_ddi/green.hpp"

namespace plasmon_ddi::sweep
{
    enum class Axis
    {
        frequency,  ///< grid in eV
        position_A, ///< grid in nm: r_A = value * (direction of the configured r_A)
        radius,     ///< grid in nm
    };

    const char* axis_name(Axis axis);
    /// Accepts "frequency", "position_A", "radius"; throws Error otherwise.
    Axis parse_axis(const std::string& name);

    struct SweepSpec
    {
        Axis axis = Axis::frequency;
        std::vector<double> grid;

        green::SphereSystem sphere;
        ddi::Emitter emitter_a;
        ddi::Emitter emitter_b;
        ComplexVec3 plus = ComplexVec3(1.0, 0.0, 0.0);
        ComplexVec3 minus = ComplexVec3(1.0, 0.0, 0.0);
        /// eV; used when the axis is not frequency
        double omega = 2.937;

        bool self_rates = false;
        green::ExpansionOptions expansion;

        /// 0: hardware concurrency
        int threads = 1;
        bool cache_mie = true;

        /// Throws Error on an empty or non-increasing grid.
        void validate() const;
    };

    struct SweepRow
    {
        double axis_value = 0.0;
        double omega = 0.0;
        ddi::ContrastResult result;
        std::optional<double> self_rate_a;
        std::optional<double> self_rate_b;
        /// nonempty when this row failed; the numeric fields are then zero
        std::string error;
        bool nonconvergent = false;
    };

    struct SweepTable
    {
        Axis axis = Axis::frequency;
        std::vector<SweepRow> rows;

        bool has_failures() const;
    };

    /// One grid point, exactly as run_sweep computes it.
    SweepRow evaluate_row(const SweepSpec& spec, double axis_value, const green::MieCoefficients* mie = nullptr);

    SweepTable run_sweep(const SweepSpec& spec);

    /// n evenly spaced values from start to stop inclusive.
    std::vector<double> linspace(double start, double stop, int n);

    struct Interval
    {
        double low = 0.0;
        double high = 0.0;
        double width() const { return high - low; }
    };

    struct Band
    {
        double low = 0.0;
        double high = 0.0;
        int sign = 0; ///< sign of the contrast inside the band
        double width() const { return high - low; }
    };

    struct FlipReport
    {
        /// last row above +hi to first following row below -hi
        std::vector<Interval> flips;
        std::vector<Band> bands;
        double hi = 0.9;
        double band_threshold = 0.999;
    };

    /// Hysteresis scan of the rate contrast for +hi -> -hi crossings, and maximal
    /// runs of rows with |contrast| > band_threshold. Throws Error on an empty table.
    FlipReport find_flips(const SweepTable& table, double hi = 0.9, double band_threshold = 0.999);

    /// Maximal runs of consecutive rows satisfying pred, as axis intervals.
    std::vector<Band> bands_where(const SweepTable& table, const std::function<bool(const SweepRow&)>& pred);
}
