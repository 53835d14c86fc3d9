#include "plasmon_ddi/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace plasmon_ddi::config
{
    namespace
    {
        std::string trim(const std::string& s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split(const std::string& s, char sep)
        {
            std::vector<std::string> out;
            std::string cur;
            for (char c : s)
            {
                if (c == sep)
                {
                    out.push_back(trim(cur));
                    cur.clear();
                }
                else
                    cur += c;
            }
            out.push_back(trim(cur));
            return out;
        }

        bool read_double(const std::string& s, double& out)
        {
            const char* b = s.data();
            const char* e = b + s.size();
            if (b != e && *b == '+')
                ++b;
            auto [p, ec] = std::from_chars(b, e, out);
            return ec == std::errc() && p == e && std::isfinite(out);
        }

        double to_double(const std::string& key, const std::string& value)
        {
            double x = 0.0;
            if (!read_double(trim(value), x))
                throw ConfigError(key + ": expected a number, got '" + value + "'");
            return x;
        }

        int to_int(const std::string& key, const std::string& value)
        {
            const std::string v = trim(value);
            int x = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || p != v.data() + v.size() || v.empty())
                throw ConfigError(key + ": expected an integer, got '" + value + "'");
            return x;
        }

        bool to_bool(const std::string& key, const std::string& value)
        {
            const std::string v = trim(value);
            if (v == "true" || v == "1" || v == "yes")
                return true;
            if (v == "false" || v == "0" || v == "no")
                return false;
            throw ConfigError(key + ": expected true or false, got '" + value + "'");
        }

        Vec3 to_position(const std::string& key, const std::string& value)
        {
            std::string v = trim(value);
            if (v.size() >= 2 && v.front() == '(' && v.back() == ')')
                v = v.substr(1, v.size() - 2);
            const auto parts = split(v, ',');
            if (parts.size() != 2 && parts.size() != 3)
                throw ConfigError(key + ": expected (x, y) or (x, y, z), got '" + value + "'");
            Vec3 r = Vec3::Zero();
            for (std::size_t i = 0; i < parts.size(); ++i)
                r[i] = to_double(key, parts[i]);
            return r;
        }

        template <class T, class F>
        std::vector<T> to_list(const std::string& key, const std::string& value, F&& item)
        {
            std::vector<T> out;
            for (const std::string& s : split(value, ';'))
            {
                if (s.empty())
                    throw ConfigError(key + ": empty list entry in '" + value + "'");
                out.push_back(item(key, s));
            }
            return out;
        }

        PolarizationSpec to_polarization(const std::string& key, const std::string& value)
        {
            try
            {
                return PolarizationSpec::parse(value);
            }
            catch (const Error& e)
            {
                throw ConfigError(key + ": " + e.what());
            }
        }

        std::string position_text(const Vec3& r)
        {
            return "(" + format_roundtrip(r.x()) + ", " + format_roundtrip(r.y()) + ", " + format_roundtrip(r.z()) + ")";
        }

        template <class T, class F>
        std::string list_text(const std::vector<T>& v, F&& item)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                if (i)
                    s += "; ";
                s += item(v[i]);
            }
            return s;
        }

        const char* basis_name(green::AzimuthalBasis b)
        {
            return b == green::AzimuthalBasis::real_even_odd ? "real_even_odd" : "complex_exponential";
        }

        struct Key
        {
            std::function<void(RunConfig&, const std::string&, const std::string&)> set;
            std::function<std::string(const RunConfig&)> get;
        };

        using Table = std::vector<std::pair<std::string, Key>>;

        Table make_table()
        {
            auto num = [](double RunConfig::*field) {
                return Key{[field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); },
                           [field](const RunConfig& c) { return format_roundtrip(c.*field); }};
            };
            auto integer = [](int RunConfig::*field) {
                return Key{[field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_int(k, v); },
                           [field](const RunConfig& c) { return std::to_string(c.*field); }};
            };
            auto pol = [](PolarizationSpec RunConfig::*field) {
                return Key{[field](RunConfig& c, const std::string& k, const std::string& v) {
                               c.*field = to_polarization(k, v);
                           },
                           [field](const RunConfig& c) { return (c.*field).text; }};
            };

            Table t;
            t.emplace_back("sphere.radius_nm",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.radius_nm = to_list<double>(k, v, to_double);
                               },
                               [](const RunConfig& c) { return list_text(c.radius_nm, format_roundtrip); }});
            t.emplace_back("sphere.eps_inf",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.drude.eps_inf = to_double(k, v);
                               },
                               [](const RunConfig& c) { return format_roundtrip(c.drude.eps_inf); }});
            t.emplace_back("sphere.omega_m_eV",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.drude.omega_m = to_double(k, v);
                               },
                               [](const RunConfig& c) { return format_roundtrip(c.drude.omega_m); }});
            t.emplace_back("sphere.gamma_m_eV",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.drude.gamma_m = to_double(k, v);
                               },
                               [](const RunConfig& c) { return format_roundtrip(c.drude.gamma_m); }});
            t.emplace_back("emitter_a.position_nm",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.position_a_nm = to_list<Vec3>(k, v, to_position);
                               },
                               [](const RunConfig& c) { return list_text(c.position_a_nm, position_text); }});
            t.emplace_back("emitter_a.polarization", pol(&RunConfig::polarization_a));
            t.emplace_back("emitter_a.transition_eV", num(&RunConfig::transition_a_eV));
            t.emplace_back("emitter_b.position_nm",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.position_b_nm = to_position(k, v);
                               },
                               [](const RunConfig& c) { return position_text(c.position_b_nm); }});
            t.emplace_back("emitter_b.polarization", pol(&RunConfig::polarization_b));
            t.emplace_back("emitter_b.transition_eV", num(&RunConfig::transition_b_eV));
            t.emplace_back("contrast.plus", pol(&RunConfig::plus));
            t.emplace_back("contrast.minus", pol(&RunConfig::minus));
            t.emplace_back("sweep.axis",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   try
                                   {
                                       c.axis = sweep::parse_axis(trim(v));
                                   }
                                   catch (const Error& e)
                                   {
                                       throw ConfigError(k + ": " + e.what());
                                   }
                               },
                               [](const RunConfig& c) { return std::string(sweep::axis_name(c.axis)); }});
            t.emplace_back("sweep.start", num(&RunConfig::start));
            t.emplace_back("sweep.stop", num(&RunConfig::stop));
            t.emplace_back("sweep.points", integer(&RunConfig::points));
            t.emplace_back("sweep.omega_eV", num(&RunConfig::omega_eV));
            t.emplace_back("sweep.self_rates",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.self_rates = to_bool(k, v);
                               },
                               [](const RunConfig& c) { return std::string(c.self_rates ? "true" : "false"); }});
            t.emplace_back("numerics.lmax",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   if (trim(v) == "auto")
                                       c.lmax.reset();
                                   else
                                       c.lmax = to_int(k, v);
                               },
                               [](const RunConfig& c) { return c.lmax ? std::to_string(*c.lmax) : std::string("auto"); }});
            t.emplace_back("numerics.lmax_cap", integer(&RunConfig::lmax_cap));
            t.emplace_back("numerics.tail_tol", num(&RunConfig::tail_tol));
            t.emplace_back("numerics.basis",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   const std::string s = trim(v);
                                   if (s == "real_even_odd")
                                       c.basis = green::AzimuthalBasis::real_even_odd;
                                   else if (s == "complex_exponential")
                                       c.basis = green::AzimuthalBasis::complex_exponential;
                                   else
                                       throw ConfigError(k + ": expected real_even_odd or complex_exponential, got '" + v + "'");
                               },
                               [](const RunConfig& c) { return std::string(basis_name(c.basis)); }});
            t.emplace_back("output.format",
                           Key{[](RunConfig& c, const std::string&, const std::string& v) { c.format = trim(v); },
                               [](const RunConfig& c) { return c.format; }});
            t.emplace_back("output.path",
                           Key{[](RunConfig& c, const std::string&, const std::string& v) { c.path = trim(v); },
                               [](const RunConfig& c) { return c.path; }});
            t.emplace_back("output.precision", integer(&RunConfig::precision));
            t.emplace_back("flips.hi", num(&RunConfig::flip_hi));
            t.emplace_back("flips.band", num(&RunConfig::band_threshold));
            t.emplace_back("flips.joint", num(&RunConfig::joint_threshold));
            t.emplace_back("correction.z_eV",
                           Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                                   if (trim(v) == "auto")
                                       c.correction_z_eV.clear();
                                   else
                                       c.correction_z_eV = to_list<double>(k, v, to_double);
                               },
                               [](const RunConfig& c) {
                                   return c.correction_z_eV.empty() ? std::string("auto")
                                                                    : list_text(c.correction_z_eV, format_roundtrip);
                               }});
            t.emplace_back("correction.cutoff_eV", num(&RunConfig::correction_cutoff_eV));
            t.emplace_back("correction.tol", num(&RunConfig::correction_tol));
            return t;
        }

        const Table& table()
        {
            static const Table t = make_table();
            return t;
        }

        cdouble named_component(const std::string& s)
        {
            if (s.empty())
                throw DomainError("empty complex component");
            // a, bi, a+bi, a-bi; the split point is a sign that is not part of an exponent
            if (s.back() != 'i')
            {
                double re = 0.0;
                if (!read_double(s, re))
                    throw DomainError("bad complex component '" + s + "'");
                return {re, 0.0};
            }
            const std::string body = s.substr(0, s.size() - 1);
            std::size_t cut = std::string::npos;
            for (std::size_t i = body.size(); i-- > 1;)
            {
                if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E')
                {
                    cut = i;
                    break;
                }
            }
            auto imag_part = [&](const std::string& t) {
                if (t.empty() || t == "+")
                    return 1.0;
                if (t == "-")
                    return -1.0;
                double v = 0.0;
                if (!read_double(t, v))
                    throw DomainError("bad complex component '" + s + "'");
                return v;
            };
            if (cut == std::string::npos)
                return {0.0, imag_part(body)};
            double re = 0.0;
            if (!read_double(body.substr(0, cut), re))
                throw DomainError("bad complex component '" + s + "'");
            return {re, imag_part(body.substr(cut))};
        }
    }

    cdouble parse_complex(const std::string& text)
    {
        std::string s;
        for (char c : text)
            if (c != ' ' && c != '\t')
                s += c;
        return named_component(s);
    }

    ComplexVec3 parse_polarization(const std::string& text)
    {
        const std::string s = trim(text);
        const double h = 1.0 / std::sqrt(2.0);
        if (s == "x")
            return {1.0, 0.0, 0.0};
        if (s == "y")
            return {0.0, 1.0, 0.0};
        if (s == "z")
            return {0.0, 0.0, 1.0};
        if (s == "R_xy")
            return {h, kI * h, 0.0};
        if (s == "L_xy")
            return {h, -kI * h, 0.0};
        if (s == "R_yz")
            return {0.0, h, kI * h};
        if (s == "L_yz")
            return {0.0, h, -kI * h};

        if (s.size() < 2 || s.front() != '(' || s.back() != ')')
            throw DomainError("unknown polarization '" + s + "' (expected x, y, z, R_xy, L_xy, R_yz, L_yz or (a, b, c))");
        const auto parts = split(s.substr(1, s.size() - 2), ',');
        if (parts.size() != 3)
            throw DomainError("polarization triple needs three components: '" + s + "'");
        ComplexVec3 u;
        for (int i = 0; i < 3; ++i)
            u[i] = parse_complex(parts[i]);
        if (!(u.norm() > 0.0))
            throw DomainError("polarization '" + s + "' is the zero vector");
        return u / u.norm();
    }

    PolarizationSpec PolarizationSpec::parse(const std::string& text)
    {
        return {trim(text), parse_polarization(text)};
    }

    std::string format_roundtrip(double x)
    {
        if (x == 0.0)
            x = 0.0;
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, p);
    }

    std::string format_number(double x, int significant)
    {
        if (x == 0.0)
            x = 0.0;
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, significant);
        return std::string(buf, p);
    }

    int RunConfig::series_count() const
    {
        return static_cast<int>(std::max(radius_nm.size(), position_a_nm.size()));
    }

    void RunConfig::validate() const
    {
        const std::size_t n = series_count();
        if (radius_nm.empty() || (radius_nm.size() != 1 && radius_nm.size() != n))
            throw ConfigError("sphere.radius_nm: list length must be 1 or match emitter_a.position_nm");
        if (position_a_nm.empty() || (position_a_nm.size() != 1 && position_a_nm.size() != n))
            throw ConfigError("emitter_a.position_nm: list length must be 1 or match sphere.radius_nm");
        for (double a : radius_nm)
            if (!(a >= 0.0))
                throw ConfigError("sphere.radius_nm: radius must be >= 0");
        try
        {
            drude.validate();
        }
        catch (const Error& e)
        {
            throw ConfigError(std::string("sphere.eps_inf/omega_m_eV/gamma_m_eV: ") + e.what());
        }
        if (points < 1)
            throw ConfigError("sweep.points: must be >= 1");
        if (!(start < stop))
            throw ConfigError("sweep.start: must be below sweep.stop");
        if (axis == sweep::Axis::frequency && !(start > 0.0))
            throw ConfigError("sweep.start: frequencies must be positive");
        if (axis == sweep::Axis::radius && !(start >= 0.0))
            throw ConfigError("sweep.start: radii must be >= 0");
        if (!(omega_eV > 0.0))
            throw ConfigError("sweep.omega_eV: must be positive");
        if (lmax && *lmax < 1)
            throw ConfigError("numerics.lmax: must be >= 1 or auto");
        if (lmax_cap < 1)
            throw ConfigError("numerics.lmax_cap: must be >= 1");
        if (!(tail_tol > 0.0))
            throw ConfigError("numerics.tail_tol: must be positive");
        if (format != "csv" && format != "json")
            throw ConfigError("output.format: expected csv or json, got '" + format + "'");
        if (path.empty())
            throw ConfigError("output.path: empty (use - for stdout)");
        if (precision < 1 || precision > 17)
            throw ConfigError("output.precision: must be in 1..17");
        if (!(flip_hi > 0.0 && flip_hi <= 1.0))
            throw ConfigError("flips.hi: must be in (0, 1]");
        if (!(band_threshold > 0.0 && band_threshold <= 1.0))
            throw ConfigError("flips.band: must be in (0, 1]");
        if (!(joint_threshold > 0.0 && joint_threshold <= 1.0))
            throw ConfigError("flips.joint: must be in (0, 1]");
        if (transition_a_eV < 0.0)
            throw ConfigError("emitter_a.transition_eV: must be >= 0");
        if (transition_b_eV < 0.0)
            throw ConfigError("emitter_b.transition_eV: must be >= 0");
        if (!(correction_tol > 0.0))
            throw ConfigError("correction.tol: must be positive");
        if (correction_cutoff_eV < 0.0)
            throw ConfigError("correction.cutoff_eV: must be >= 0");
        for (int s = 0; s < series_count(); ++s)
        {
            const double a = radius_nm[radius_nm.size() == 1 ? 0 : s];
            const Vec3& ra = position_a_nm[position_a_nm.size() == 1 ? 0 : s];
            if (axis != sweep::Axis::position_A && !(ra.norm() > a))
                throw ConfigError("emitter_a.position_nm: position must lie outside the sphere");
            if (axis == sweep::Axis::position_A && !(ra.norm() > 0.0))
                throw ConfigError("emitter_a.position_nm: a position_A sweep needs a nonzero direction");
            if (axis != sweep::Axis::radius && !(position_b_nm.norm() > a))
                throw ConfigError("emitter_b.position_nm: position must lie outside the sphere");
            if (axis != sweep::Axis::position_A && (ra - position_b_nm).norm() == 0.0)
                throw ConfigError("emitter_a.position_nm: coincides with emitter_b.position_nm");
        }
    }

    green::SphereSystem RunConfig::sphere(int series) const
    {
        green::SphereSystem sys;
        sys.radius = radius_nm[radius_nm.size() == 1 ? 0 : series];
        sys.drude = drude;
        return sys;
    }

    green::ExpansionOptions RunConfig::expansion() const
    {
        green::ExpansionOptions o;
        o.lmax = lmax;
        o.lmax_cap = lmax_cap;
        o.tail_tol = tail_tol;
        o.basis = basis;
        return o;
    }

    std::vector<double> RunConfig::grid() const
    {
        return sweep::linspace(start, stop, points);
    }

    ddi::Emitter RunConfig::emitter_a(int series) const
    {
        return ddi::Emitter::make(position_a_nm[position_a_nm.size() == 1 ? 0 : series], polarization_a.vector,
                                  transition_a_eV);
    }

    ddi::Emitter RunConfig::emitter_b() const
    {
        return ddi::Emitter::make(position_b_nm, polarization_b.vector, transition_b_eV);
    }

    sweep::SweepSpec RunConfig::sweep_spec(int series, int threads) const
    {
        sweep::SweepSpec s;
        s.axis = axis;
        s.grid = grid();
        s.sphere = sphere(series);
        s.emitter_a = emitter_a(series);
        s.emitter_b = emitter_b();
        s.plus = plus.vector;
        s.minus = minus.vector;
        s.omega = omega_eV;
        s.self_rates = self_rates;
        s.expansion = expansion();
        s.threads = threads;
        return s;
    }

    void set_value(RunConfig& cfg, const std::string& key, const std::string& value)
    {
        for (const auto& [name, k] : table())
        {
            if (name == key)
            {
                k.set(cfg, key, value);
                return;
            }
        }
        throw ConfigError("unknown key '" + key + "'");
    }

    void apply_override(RunConfig& cfg, const std::string& assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + assignment + "' is not of the form key=value");
        set_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
    }

    RunConfig parse_config(const std::string& text, const std::string& origin)
    {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        std::map<std::string, int> seen;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            const std::string where = origin + ":" + std::to_string(lineno) + ": ";
            if (eq == std::string::npos)
                throw ConfigError(where + "expected key = value, got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            if (auto it = seen.find(key); it != seen.end())
                throw ConfigError(where + key + ": already set on line " + std::to_string(it->second));
            seen[key] = lineno;
            try
            {
                set_value(cfg, key, line.substr(eq + 1));
            }
            catch (const ConfigError& e)
            {
                throw ConfigError(where + e.what());
            }
        }
        return cfg;
    }

    RunConfig load_config(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot read config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), path);
    }

    std::vector<std::pair<std::string, std::string>> entries(const RunConfig& cfg)
    {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [name, k] : table())
            out.emplace_back(name, k.get(cfg));
        return out;
    }

    std::string serialize(const RunConfig& cfg)
    {
        std::string s;
        for (const auto& [k, v] : entries(cfg))
            s += k + " = " + v + "\n";
        return s;
    }
}
