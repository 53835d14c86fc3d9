// plasmon-ddi: spectra, contrast, flip detection, validation and correction
// diagnostics for two emitters near a Drude sphere.
//
// exit codes: 0 ok, 1 configuration or usage error, 2 nonconvergence,
// 3 validation failure

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plasmon_ddi/config.hpp"
#include "plasmon_ddi/output.hpp"
#include "plasmon_ddi/sweep.hpp"
#include "plasmon_ddi/validation.hpp"

namespace
{
    using namespace plasmon_ddi;

    constexpr int kExitConfig = 1;
    constexpr int kExitConvergence = 2;
    constexpr int kExitValidation = 3;

    struct Common
    {
        std::string config_path;
        std::string out;
        std::string format;
        int threads = -1;
        int lmax = -1;
        std::vector<std::string> sets;
    };

    void add_common(CLI::App* cmd, Common& c)
    {
        cmd->add_option("--config", c.config_path, "configuration file (key = value lines)");
        cmd->add_option("--out", c.out, "output path, - for stdout");
        cmd->add_option("--format", c.format, "csv or json");
        cmd->add_option("--threads", c.threads, "worker cap; 0 uses every core")->check(CLI::NonNegativeNumber);
        cmd->add_option("--lmax", c.lmax, "fixed multipole truncation")->check(CLI::PositiveNumber);
        cmd->add_option("--set", c.sets, "override a key, e.g. --set sphere.radius_nm=18");
    }

    int thread_count(const Common& c)
    {
        if (c.threads >= 0)
            return c.threads;
        if (const char* env = std::getenv("PLASMON_DDI_THREADS"))
        {
            try
            {
                const int n = std::stoi(env);
                if (n >= 0)
                    return n;
            }
            catch (const std::exception&)
            {
            }
            throw config::ConfigError(std::string("PLASMON_DDI_THREADS: expected a non-negative integer, got '") + env + "'");
        }
        return 0;
    }

    config::RunConfig effective_config(const Common& c)
    {
        config::RunConfig cfg = c.config_path.empty() ? config::RunConfig{} : config::load_config(c.config_path);
        for (const auto& s : c.sets)
            config::apply_override(cfg, s);
        if (c.lmax > 0)
            cfg.lmax = c.lmax;
        if (!c.format.empty())
            cfg.format = c.format;
        if (!c.out.empty())
            cfg.path = c.out;
        cfg.validate();
        return cfg;
    }

    void emit(const std::string& path, const std::string& text)
    {
        if (path == "-")
        {
            std::cout << text << std::flush;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw config::ConfigError("output.path: cannot write '" + path + "'");
        f << text;
    }

    std::string series_label(const config::RunConfig& cfg, int s)
    {
        if (cfg.series_count() == 1)
            return {};
        const Vec3 r = cfg.position_a_nm[cfg.position_a_nm.size() == 1 ? 0 : s];
        return "sphere.radius_nm = " + config::format_roundtrip(cfg.sphere(s).radius) + ", emitter_a.position_nm = (" +
               config::format_roundtrip(r.x()) + ", " + config::format_roundtrip(r.y()) + ", " +
               config::format_roundtrip(r.z()) + ")";
    }

    std::vector<output::Series> run_all_series(const config::RunConfig& cfg, int threads,
                                               const std::vector<double>* grid_override = nullptr)
    {
        std::vector<output::Series> out;
        for (int s = 0; s < cfg.series_count(); ++s)
        {
            sweep::SweepSpec spec = cfg.sweep_spec(s, threads);
            if (grid_override)
            {
                spec.axis = sweep::Axis::frequency;
                spec.grid = *grid_override;
            }
            out.push_back({series_label(cfg, s), sweep::run_sweep(spec)});
        }
        return out;
    }

    int failure_code(const std::vector<output::Series>& series)
    {
        int code = 0;
        for (const auto& s : series)
            for (const auto& r : s.table.rows)
                if (!r.error.empty())
                {
                    if (r.nonconvergent)
                        return kExitConvergence;
                    code = kExitConfig;
                }
        return code;
    }

    void report_failures(const std::vector<output::Series>& series)
    {
        int n = 0;
        for (const auto& s : series)
            for (const auto& r : s.table.rows)
                if (!r.error.empty() && n++ < 5)
                    std::cerr << "plasmon-ddi: row " << config::format_roundtrip(r.axis_value) << ": " << r.error << "\n";
        if (n > 5)
            std::cerr << "plasmon-ddi: ... " << n - 5 << " more failed rows\n";
    }

    int cmd_table(const Common& c, bool single_point)
    {
        const config::RunConfig cfg = effective_config(c);
        const std::vector<double> point{cfg.omega_eV};
        const auto series = run_all_series(cfg, thread_count(c), single_point ? &point : nullptr);
        std::ostringstream ss;
        if (cfg.format == "json")
            output::write_json(ss, cfg, series);
        else
            output::write_csv(ss, cfg, series);
        emit(cfg.path, ss.str());
        report_failures(series);
        return failure_code(series);
    }

    int cmd_flips(const Common& c)
    {
        const config::RunConfig cfg = effective_config(c);
        const auto series = run_all_series(cfg, thread_count(c));
        std::vector<output::SeriesFlips> flips;
        for (const auto& s : series)
            flips.push_back(output::analyse(cfg, s));
        std::ostringstream ss;
        output::write_flips_json(ss, cfg, flips);
        emit(cfg.path, ss.str());
        report_failures(series);
        return failure_code(series);
    }

    int cmd_validate(const Common& c, std::uint64_t seed, bool quick)
    {
        validation::ValidationOptions opt;
        opt.seed = seed;
        opt.quick = quick;
        opt.threads = thread_count(c);
        std::string format = c.format.empty() ? "text" : c.format;
        std::string path = c.out.empty() ? "-" : c.out;
        if (!c.config_path.empty() || !c.sets.empty())
        {
            const config::RunConfig cfg = effective_config(c);
            opt.sphere = cfg.sphere(0);
        }
        if (format != "text" && format != "json")
            throw config::ConfigError("output.format: validate writes text or json, got '" + format + "'");
        const auto report = validation::run_all(opt);
        std::ostringstream ss;
        if (format == "json")
            output::write_validation_json(ss, report);
        else
            ss << report.to_text();
        emit(path, ss.str());
        return report.ok() ? 0 : kExitValidation;
    }

    int cmd_correction(const Common& c)
    {
        const config::RunConfig cfg = effective_config(c);
        ddi::Emitter a = cfg.emitter_a(0);
        ddi::Emitter b = cfg.emitter_b();
        if (a.transition_energy == 0.0)
            a.transition_energy = cfg.omega_eV;
        if (b.transition_energy == 0.0)
            b.transition_energy = cfg.omega_eV;
        const double omega_bar = 0.5 * (a.transition_energy + b.transition_energy);
        std::vector<double> zs = cfg.correction_z_eV;
        if (zs.empty())
            zs = {omega_bar - 0.01, omega_bar, omega_bar + 0.01};

        ddi::CorrectionOptions opt;
        opt.cutoff = cfg.correction_cutoff_eV;
        opt.tol = cfg.correction_tol;
        opt.expansion = cfg.expansion();

        std::vector<output::CorrectionRow> rows;
        bool converged = true;
        for (double z : zs)
        {
            output::CorrectionRow r;
            r.estimate = ddi::correction_r3c(a, b, cfg.sphere(0), z, opt);
            ddi::CorrectionOptions half = opt;
            half.tol *= 0.5;
            r.refined = ddi::correction_r3c(a, b, cfg.sphere(0), z, half);
            converged = converged && r.estimate.converged && r.refined.converged;
            rows.push_back(r);
        }
        std::ostringstream ss;
        output::write_correction(ss, cfg, rows, cfg.format);
        emit(cfg.path, ss.str());
        return converged ? 0 : kExitConvergence;
    }

    int cmd_config(const Common& c)
    {
        const config::RunConfig cfg = effective_config(c);
        emit(c.out.empty() ? "-" : c.out, config::serialize(cfg));
        return 0;
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"Dipole-dipole interaction of two emitters near a Drude nanosphere"};
    app.set_version_flag("--version", std::string("plasmon-ddi v") + output::kVersion);
    app.require_subcommand(1);

    Common common;
    std::uint64_t seed = 1;
    bool quick = false;

    auto* spectrum = app.add_subcommand("spectrum", "sweep the +/- pair and write the rate table");
    auto* contrast = app.add_subcommand("contrast", "single point at sweep.omega_eV");
    auto* flips = app.add_subcommand("flips", "sweep and report contrast flips and bands as JSON");
    auto* validate = app.add_subcommand("validate", "run the numerical self-checks");
    auto* correction = app.add_subcommand("correction", "principal-value correction R3c against pi G");
    auto* show = app.add_subcommand("config", "print the effective configuration");
    for (auto* cmd : {spectrum, contrast, flips, validate, correction, show})
        add_common(cmd, common);
    validate->add_option("--seed", seed, "seed of the random configurations");
    validate->add_flag("--quick", quick, "reduced configuration count");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (*spectrum)
            return cmd_table(common, false);
        if (*contrast)
            return cmd_table(common, true);
        if (*flips)
            return cmd_flips(common);
        if (*validate)
            return cmd_validate(common, seed, quick);
        if (*correction)
            return cmd_correction(common);
        if (*show)
            return cmd_config(common);
    }
    catch (const config::ConfigError& e)
    {
        std::cerr << "plasmon-ddi: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const ConvergenceError& e)
    {
        std::cerr << "plasmon-ddi: " << e.what() << "\n";
        return kExitConvergence;
    }
    catch (const Error& e)
    {
        std::cerr << "plasmon-ddi: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
