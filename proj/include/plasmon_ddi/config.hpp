#pragma once

// Run configuration: flat "section.key = value" text, one entry per line,
// '#' starts a comment. See README.md for the full key list.
//
// Numbers are written back in shortest round-trip form and polarizations as
// their original (trimmed) text, so serialize(parse(serialize(c))) is stable
// and a re-run from the serialized form reproduces the same output bytes.

#include <optional>
#include <string>
#include <vector>

#include "plasmon_ddi/green.hpp"
#include "plasmon_ddi/sweep.hpp"
#include "plasmon_ddi/types.hpp"

namespace plasmon_ddi::config
{
    /// Malformed text or an invalid value; the message names the key.
    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    /// Named token (x, y, z, R_xy, L_xy, R_yz, L_yz) or an explicit complex
    /// triple such as "(1, 0, 1i)" or "(0.6+0.8i, 0, 0)", normalized on load.
    struct PolarizationSpec
    {
        std::string text;
        ComplexVec3 vector;

        static PolarizationSpec parse(const std::string& text);
    };

    ComplexVec3 parse_polarization(const std::string& text);

    /// "1.5", "-2i", "0.3-0.4i", "1e-3+2.5e-1i"
    cdouble parse_complex(const std::string& text);

    struct RunConfig
    {
        // one entry per series; a single entry is shared by all series
        std::vector<double> radius_nm{20.0};
        material::DrudeModel drude;

        std::vector<Vec3> position_a_nm{Vec3(19.0, 11.0, 0.0)};
        PolarizationSpec polarization_a = PolarizationSpec::parse("R_xy");
        double transition_a_eV = 0.0; ///< 0: use sweep.omega_eV

        Vec3 position_b_nm = Vec3(22.0, 0.0, 0.0);
        PolarizationSpec polarization_b = PolarizationSpec::parse("x");
        double transition_b_eV = 0.0;

        PolarizationSpec plus = PolarizationSpec::parse("R_xy");
        PolarizationSpec minus = PolarizationSpec::parse("L_xy");

        sweep::Axis axis = sweep::Axis::frequency;
        double start = 2.85;
        double stop = 3.05;
        int points = 401;
        double omega_eV = 2.937;
        bool self_rates = false;

        std::optional<int> lmax;
        int lmax_cap = 200;
        double tail_tol = 1e-10;
        green::AzimuthalBasis basis = green::AzimuthalBasis::real_even_odd;

        std::string format = "csv";
        std::string path = "-";
        int precision = 9;

        double flip_hi = 0.9;
        double band_threshold = 0.999;
        double joint_threshold = 0.99;

        std::vector<double> correction_z_eV;
        double correction_cutoff_eV = 0.0;
        double correction_tol = 1e-6;

        int series_count() const;
        /// Throws ConfigError on inconsistent values.
        void validate() const;

        green::SphereSystem sphere(int series) const;
        green::ExpansionOptions expansion() const;
        std::vector<double> grid() const;
        sweep::SweepSpec sweep_spec(int series, int threads) const;
        ddi::Emitter emitter_a(int series) const;
        ddi::Emitter emitter_b() const;
    };

    /// Sets one key from its textual value.
    void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
    /// "key=value" or "key = value"
    void apply_override(RunConfig& cfg, const std::string& assignment);

    RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
    RunConfig load_config(const std::string& path);

    /// (key, value) pairs of the effective configuration, in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries(const RunConfig& cfg);
    std::string serialize(const RunConfig& cfg);

    /// Shortest text that reads back to the same double.
    std::string format_roundtrip(double x);
    /// Fixed significant digits, locale independent; "inf"/"nan" never produced
    /// for finite input.
    std::string format_number(double x, int significant);
}
