#include "plasmon_ddi/output.hpp"

#include <charconv>

#include <json.hpp>

namespace plasmon_ddi::output
{
    using nlohmann::ordered_json;

    namespace
    {
        // value rounded to the output precision, so the JSON text carries the
        // same digits as the CSV
        double rounded(double x, int digits)
        {
            const std::string s = config::format_number(x, digits);
            double y = 0.0;
            std::from_chars(s.data(), s.data() + s.size(), y);
            return y;
        }

        ordered_json number(double x, int digits)
        {
            return rounded(x, digits);
        }

        ordered_json optional_number(const std::optional<double>& x, int digits)
        {
            return x ? number(*x, digits) : ordered_json(nullptr);
        }

        ordered_json config_json(const config::RunConfig& cfg)
        {
            ordered_json j = ordered_json::object();
            for (const auto& [k, v] : header_entries(cfg))
                j[k] = v;
            return j;
        }

        ordered_json bands_json(const std::vector<sweep::Band>& bands, int digits)
        {
            ordered_json arr = ordered_json::array();
            for (const auto& b : bands)
                arr.push_back({{"low", number(b.low, digits)},
                               {"high", number(b.high, digits)},
                               {"width", number(b.width(), digits)},
                               {"sign", b.sign}});
            return arr;
        }

        std::string one_line(std::string s)
        {
            for (char& c : s)
                if (c == '\n' || c == '\r')
                    c = ' ';
            return s;
        }
    }

    std::string first_column(sweep::Axis axis)
    {
        switch (axis)
        {
        case sweep::Axis::frequency: return "omega_eV";
        case sweep::Axis::position_A: return "position_A_nm";
        case sweep::Axis::radius: return "radius_nm";
        }
        return "x";
    }

    std::vector<std::pair<std::string, std::string>> header_entries(const config::RunConfig& cfg)
    {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& e : config::entries(cfg))
            if (e.first.rfind("output.", 0) != 0 || e.first == "output.precision")
                out.push_back(std::move(e));
        return out;
    }

    void write_csv(std::ostream& out, const config::RunConfig& cfg, const std::vector<Series>& series)
    {
        const int p = cfg.precision;
        auto num = [p](double x) { return config::format_number(x, p); };
        auto opt = [&](const std::optional<double>& x) { return x ? num(*x) : std::string(); };

        out << "# plasmon-ddi v" << kVersion << "\n";
        for (const auto& [k, v] : header_entries(cfg))
            out << "# " << k << " = " << v << "\n";

        for (std::size_t s = 0; s < series.size(); ++s)
        {
            const Series& ser = series[s];
            if (series.size() > 1)
                out << "# series " << s << ": " << ser.label << "\n";
            out << first_column(ser.table.axis)
                << ",gamma_plus,gamma_minus,delta_plus,delta_minus,gamma_contrast,delta_contrast,lmax";
            if (cfg.self_rates)
                out << ",self_rate_a,self_rate_b";
            out << "\n";

            std::vector<const sweep::SweepRow*> failed;
            for (const auto& row : ser.table.rows)
            {
                out << num(row.axis_value);
                if (!row.error.empty())
                {
                    out << ",,,,,,," << (cfg.self_rates ? ",," : "") << "\n";
                    failed.push_back(&row);
                    continue;
                }
                const auto& r = row.result;
                out << ',' << num(r.gamma_plus) << ',' << num(r.gamma_minus) << ',' << num(r.delta_plus) << ','
                    << num(r.delta_minus) << ',' << opt(r.gamma_contrast) << ',' << opt(r.delta_contrast) << ','
                    << r.lmax_used;
                if (cfg.self_rates)
                    out << ',' << opt(row.self_rate_a) << ',' << opt(row.self_rate_b);
                out << "\n";
            }
            for (const auto* row : failed)
                out << "# error " << first_column(ser.table.axis) << " = " << num(row->axis_value) << ": "
                    << one_line(row->error) << "\n";
        }
    }

    void write_json(std::ostream& out, const config::RunConfig& cfg, const std::vector<Series>& series)
    {
        const int p = cfg.precision;
        ordered_json doc;
        doc["version"] = kVersion;
        doc["config"] = config_json(cfg);
        ordered_json arr = ordered_json::array();
        for (const Series& ser : series)
        {
            ordered_json js;
            js["label"] = ser.label;
            js["axis"] = sweep::axis_name(ser.table.axis);
            ordered_json rows = ordered_json::array();
            const std::string col = first_column(ser.table.axis);
            for (const auto& row : ser.table.rows)
            {
                ordered_json jr;
                jr[col] = number(row.axis_value, p);
                if (!row.error.empty())
                {
                    jr["error"] = row.error;
                    jr["nonconvergent"] = row.nonconvergent;
                    rows.push_back(std::move(jr));
                    continue;
                }
                const auto& r = row.result;
                if (ser.table.axis != sweep::Axis::frequency)
                    jr["omega_eV"] = number(row.omega, p);
                jr["gamma_plus"] = number(r.gamma_plus, p);
                jr["gamma_minus"] = number(r.gamma_minus, p);
                jr["delta_plus"] = number(r.delta_plus, p);
                jr["delta_minus"] = number(r.delta_minus, p);
                jr["gamma_contrast"] = optional_number(r.gamma_contrast, p);
                jr["delta_contrast"] = optional_number(r.delta_contrast, p);
                jr["lmax"] = r.lmax_used;
                if (cfg.self_rates)
                {
                    jr["self_rate_a"] = optional_number(row.self_rate_a, p);
                    jr["self_rate_b"] = optional_number(row.self_rate_b, p);
                }
                rows.push_back(std::move(jr));
            }
            js["rows"] = std::move(rows);
            arr.push_back(std::move(js));
        }
        doc["series"] = std::move(arr);
        out << doc.dump(2) << "\n";
    }

    SeriesFlips analyse(const config::RunConfig& cfg, const Series& s)
    {
        SeriesFlips f;
        f.label = s.label;
        f.report = sweep::find_flips(s.table, cfg.flip_hi, cfg.band_threshold);
        const double t = cfg.joint_threshold;
        auto both = [t](int sign) {
            return [t, sign](const sweep::SweepRow& r) {
                return r.error.empty() && r.result.gamma_contrast && r.result.delta_contrast &&
                       sign * *r.result.gamma_contrast > t && sign * *r.result.delta_contrast > t;
            };
        };
        f.joint_negative = sweep::bands_where(s.table, both(-1));
        for (auto& b : f.joint_negative)
            b.sign = -1;
        f.joint_positive = sweep::bands_where(s.table, both(+1));
        for (auto& b : f.joint_positive)
            b.sign = +1;
        for (const auto& r : s.table.rows)
            f.failed_rows += r.error.empty() ? 0 : 1;
        return f;
    }

    void write_flips_json(std::ostream& out, const config::RunConfig& cfg, const std::vector<SeriesFlips>& flips)
    {
        const int p = cfg.precision;
        ordered_json doc;
        doc["version"] = kVersion;
        doc["config"] = config_json(cfg);
        ordered_json arr = ordered_json::array();
        for (const auto& f : flips)
        {
            ordered_json js;
            js["label"] = f.label;
            js["hi"] = f.report.hi;
            js["band_threshold"] = f.report.band_threshold;
            js["joint_threshold"] = cfg.joint_threshold;
            ordered_json fl = ordered_json::array();
            for (const auto& i : f.report.flips)
                fl.push_back({{"low", number(i.low, p)}, {"high", number(i.high, p)}, {"width", number(i.width(), p)}});
            js["flips"] = std::move(fl);
            js["bands"] = bands_json(f.report.bands, p);
            js["joint_negative_bands"] = bands_json(f.joint_negative, p);
            js["joint_positive_bands"] = bands_json(f.joint_positive, p);
            js["failed_rows"] = f.failed_rows;
            arr.push_back(std::move(js));
        }
        doc["series"] = std::move(arr);
        out << doc.dump(2) << "\n";
    }

    void write_validation_json(std::ostream& out, const validation::ValidationReport& report)
    {
        ordered_json doc;
        doc["version"] = kVersion;
        doc["seed"] = report.seed;
        doc["quick"] = report.quick;
        doc["ok"] = report.ok();
        ordered_json arr = ordered_json::array();
        for (const auto& c : report.checks)
            arr.push_back({{"id", c.id},
                           {"status", validation::status_name(c.status)},
                           {"residual", c.residual},
                           {"tolerance", c.tolerance},
                           {"runtime_s", c.runtime_s},
                           {"detail", c.detail}});
        doc["checks"] = std::move(arr);
        out << doc.dump(2) << "\n";
    }

    void write_correction(std::ostream& out, const config::RunConfig& cfg, const std::vector<CorrectionRow>& rows,
                          const std::string& format)
    {
        const int p = cfg.precision;
        auto num = [p](double x) { return config::format_number(x, p); };
        if (format == "json")
        {
            ordered_json doc;
            doc["version"] = kVersion;
            doc["config"] = config_json(cfg);
            ordered_json arr = ordered_json::array();
            for (const auto& r : rows)
            {
                const auto& e = r.estimate;
                arr.push_back({{"z_eV", number(e.z, p)},
                               {"omega_bar_eV", number(e.omega_bar, p)},
                               {"r3c_norm", number(e.r3c_norm, p)},
                               {"pi_g_norm", number(e.pi_g_norm, p)},
                               {"ratio", number(e.ratio, p)},
                               {"quadrature_error", number(e.quadrature_error, p)},
                               {"tail_estimate", number(e.tail_estimate, p)},
                               {"cutoff_eV", number(e.cutoff, p)},
                               {"evaluations", e.evaluations},
                               {"converged", e.converged},
                               {"refined_ratio", number(r.refined.ratio, p)},
                               {"refinement_change", number((r.refined.r3c - e.r3c).norm(), p)}});
            }
            doc["rows"] = std::move(arr);
            out << doc.dump(2) << "\n";
            return;
        }
        out << "# plasmon-ddi v" << kVersion << "\n";
        for (const auto& [k, v] : header_entries(cfg))
            out << "# " << k << " = " << v << "\n";
        out << "z_eV,omega_bar_eV,r3c_norm,pi_g_norm,ratio,quadrature_error,tail_estimate,cutoff_eV,evaluations,"
               "converged,refined_ratio,refinement_change\n";
        for (const auto& r : rows)
        {
            const auto& e = r.estimate;
            out << num(e.z) << ',' << num(e.omega_bar) << ',' << num(e.r3c_norm) << ',' << num(e.pi_g_norm) << ','
                << num(e.ratio) << ',' << num(e.quadrature_error) << ',' << num(e.tail_estimate) << ','
                << num(e.cutoff) << ',' << e.evaluations << ',' << (e.converged ? 1 : 0) << ','
                << num(r.refined.ratio) << ',' << num((r.refined.r3c - e.r3c).norm()) << "\n";
        }
    }
}
