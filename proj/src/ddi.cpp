#include "plasmon_ddi/ddi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "plasmon_ddi/material.hpp"
#include "plasmon_ddi/quadrature.hpp"

namespace plasmon_ddi::ddi
{
    namespace
    {
        double rate_scale(double omega)
        {
            const double k = material::vacuum_wavenumber(omega);
            return 6.0 * kPi / (k * k * k);
        }

        void require_positive(double omega, const char* what)
        {
            if (!(omega > 0.0) || !std::isfinite(omega))
                throw DomainError(std::string(what) + ": frequency must be positive, got " + std::to_string(omega));
        }
    }

    ComplexVec3 normalized_polarization(const ComplexVec3& u)
    {
        const double n = u.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw DomainError("polarization vector must be nonzero and finite");
        return u / n;
    }

    Emitter Emitter::make(const Vec3& position, const ComplexVec3& polarization, double transition_energy,
                          double dipole_magnitude)
    {
        Emitter e;
        e.position = position;
        e.polarization = normalized_polarization(polarization);
        e.transition_energy = transition_energy;
        e.dipole_magnitude = dipole_magnitude;
        return e;
    }

    double gamma0(double omega, double dipole_magnitude)
    {
        require_positive(omega, "gamma0");
        const double k = material::vacuum_wavenumber(omega);
        return 2.0 * dipole_magnitude * dipole_magnitude * k * k * k / (6.0 * kPi);
    }

    cdouble contract(const ComplexVec3& u_i, const Matrix3c& g, const ComplexVec3& u_j)
    {
        return u_i.dot(g * u_j); // Eigen's dot conjugates its left operand
    }

    std::pair<double, double> normalized_rates(const ComplexVec3& u_i, const Matrix3c& g, const ComplexVec3& u_j,
                                               double omega)
    {
        const cdouble c = contract(u_i, g, u_j);
        const double s = rate_scale(omega);
        return {s * c.imag(), -0.5 * s * c.real()};
    }

    DdiResult coupling(const Emitter& i, const Emitter& j, const green::SphereSystem& sys, double omega,
                       const CouplingOptions& options, const green::MieCoefficients* mie)
    {
        require_positive(omega, "coupling");
        const green::GreenTensor g = green::total_green(sys, i.position, j.position, omega, options.expansion, mie);

        DdiResult r;
        r.omega = omega;
        std::tie(r.gamma_ratio, r.delta_ratio) = normalized_rates(i.polarization, g.matrix, j.polarization, omega);
        r.lmax_used = g.lmax_used;
        if (options.self_rates)
        {
            r.self_rate_i = self_coupling(i, sys, omega, options.expansion, mie).gamma_ratio;
            r.self_rate_j = self_coupling(j, sys, omega, options.expansion, mie).gamma_ratio;
        }
        return r;
    }

    DdiResult self_coupling(const Emitter& e, const green::SphereSystem& sys, double omega,
                            const green::ExpansionOptions& options, const green::MieCoefficients* mie)
    {
        require_positive(omega, "self_coupling");
        const green::GreenTensor gs = mie ? green::scattering_green(*mie, e.position, e.position, options)
                                          : green::scattering_green(sys, e.position, e.position, omega, options);
        DdiResult r;
        r.omega = omega;
        std::tie(r.gamma_ratio, r.delta_ratio) = normalized_rates(e.polarization, gs.matrix, e.polarization, omega);
        // vacuum part: (6 pi / k^3) * k^3 / (6 pi) |u|^2
        r.gamma_ratio += 1.0;
        r.lmax_used = gs.lmax_used;
        return r;
    }

    std::optional<double> contrast_value(double x_plus, double x_minus)
    {
        const double p = std::abs(x_plus);
        const double m = std::abs(x_minus);
        const double den = p + m;
        if (!(den > 0.0))
            return std::nullopt;
        return (p - m) / den;
    }

    ContrastResult contrast(const Emitter& a_base, const ComplexVec3& plus_pol, const ComplexVec3& minus_pol,
                            const Emitter& b, const green::SphereSystem& sys, double omega,
                            const green::ExpansionOptions& options, const green::MieCoefficients* mie)
    {
        require_positive(omega, "contrast");
        // one tensor serves both polarizations
        const green::GreenTensor g = green::total_green(sys, a_base.position, b.position, omega, options, mie);
        const ComplexVec3 up = normalized_polarization(plus_pol);
        const ComplexVec3 um = normalized_polarization(minus_pol);

        ContrastResult r;
        r.omega = omega;
        std::tie(r.gamma_plus, r.delta_plus) = normalized_rates(up, g.matrix, b.polarization, omega);
        std::tie(r.gamma_minus, r.delta_minus) = normalized_rates(um, g.matrix, b.polarization, omega);
        r.gamma_contrast = contrast_value(r.gamma_plus, r.gamma_minus);
        r.delta_contrast = contrast_value(r.delta_plus, r.delta_minus);
        r.lmax_used = g.lmax_used;
        return r;
    }

    double selection_rule_check(const ComplexVec3& u_a, const ComplexVec3& u_b)
    {
        return std::abs(u_a.dot(u_b));
    }

    Eigen::Matrix2d rate_matrix(const Emitter& a, const Emitter& b, const green::SphereSystem& sys, double omega,
                                const green::ExpansionOptions& options)
    {
        CouplingOptions co;
        co.expansion = options;
        Eigen::Matrix2d m;
        m(0, 0) = self_coupling(a, sys, omega, options).gamma_ratio;
        m(1, 1) = self_coupling(b, sys, omega, options).gamma_ratio;
        m(0, 1) = coupling(a, b, sys, omega, co).gamma_ratio;
        m(1, 0) = coupling(b, a, sys, omega, co).gamma_ratio;
        return m;
    }

    Eigen::Matrix2cd dissipation_matrix(const Emitter& a, const Emitter& b, const green::SphereSystem& sys,
                                        double omega, const green::ExpansionOptions& options)
    {
        const double s = rate_scale(omega);
        const Eigen::Matrix3d im_ab = green::total_green(sys, a.position, b.position, omega, options).matrix.imag();
        const cdouble cross = s * a.polarization.dot(im_ab.cast<cdouble>() * b.polarization);

        Eigen::Matrix2cd m;
        m(0, 0) = self_coupling(a, sys, omega, options).gamma_ratio;
        m(1, 1) = self_coupling(b, sys, omega, options).gamma_ratio;
        m(0, 1) = cross;
        m(1, 0) = std::conj(cross);
        return m;
    }

    namespace
    {
        // Integration breakpoints: the free-space oscillation period of
        // Im G(r_B, r_A, w) in w, plus a finer grid across the window where
        // the surface-plasmon multipoles of the sphere sit.
        std::vector<double> r3c_breaks(const Emitter& a, const Emitter& b, const green::SphereSystem& sys,
                                       double cutoff)
        {
            std::vector<double> br{0.0, cutoff};
            const double separation = (a.position - b.position).norm();
            const double period = 2.0 * kPi * kHbarC / separation;
            for (double w = period; w < cutoff; w += period)
                br.push_back(w);

            if (sys.radius > 0.0)
            {
                const double einf = sys.drude.eps_inf;
                const double lo = std::max(0.0, sys.drude.omega_m / std::sqrt(einf + 2.0) - 0.2);
                const double hi = std::min(cutoff, sys.drude.omega_m / std::sqrt(einf + 1.0) + 0.2);
                const double step = 0.5 * sys.drude.gamma_m;
                const int n = static_cast<int>(std::ceil((hi - lo) / step));
                for (int i = 0; i <= n && lo < hi; ++i)
                    br.push_back(lo + (hi - lo) * i / n);
            }
            std::sort(br.begin(), br.end());
            br.erase(std::unique(br.begin(), br.end()), br.end());
            return br;
        }

        std::vector<double> clip(const std::vector<double>& br, double lo, double hi)
        {
            std::vector<double> out{lo};
            for (double w : br)
                if (w > lo && w < hi)
                    out.push_back(w);
            out.push_back(hi);
            return out;
        }
    }

    CorrectionEstimate correction_r3c(const Emitter& a, const Emitter& b, const green::SphereSystem& sys, double z,
                                      const CorrectionOptions& options)
    {
        const double wa = a.transition_energy;
        const double wb = b.transition_energy;
        if (!(wa > 0.0) || !(wb > 0.0))
            throw DomainError("correction_r3c: both emitters need a positive transition energy");
        if (!(z > 0.0) || !(z < wa + wb))
            throw DomainError("correction_r3c: z must satisfy 0 < z < omega_A + omega_B");

        CorrectionEstimate est;
        est.z = z;
        est.omega_bar = 0.5 * (wa + wb);
        est.cutoff = options.cutoff > 0.0 ? options.cutoff : 5.0 * (wa + wb);
        if (!(est.cutoff > 0.0))
            throw DomainError("correction_r3c: cutoff must be positive");

        const Matrix3c g_z = green::total_green(sys, b.position, a.position, z, options.expansion).matrix;
        est.pi_g_norm = kPi * g_z.norm();

        const double detune = z - est.omega_bar;
        if (detune == 0.0)
        {
            est.converged = true;
            return est;
        }

        auto integrand = [&](double w) -> Eigen::Matrix3d {
            const double den = (est.omega_bar + w) * (est.omega_bar + w) - detune * detune;
            const Eigen::Matrix3d im_g =
                green::total_green(sys, b.position, a.position, w, options.expansion).matrix.imag();
            return (-2.0 * detune / den) * im_g;
        };
        auto norm = [](const Eigen::Matrix3d& m) { return m.norm(); };

        // three pieces, the last two octaves of which give the tail estimate
        const std::vector<double> br = r3c_breaks(a, b, sys, est.cutoff);
        const double c = est.cutoff;
        const std::array<std::pair<double, double>, 3> pieces{{{0.0, 0.25 * c}, {0.25 * c, 0.5 * c}, {0.5 * c, c}}};
        const double abs_tol = options.tol * 1e-3 * est.pi_g_norm / 3.0;

        Eigen::Matrix3d total = Eigen::Matrix3d::Zero();
        std::array<double, 3> piece_norm{};
        est.converged = true;
        for (std::size_t p = 0; p < pieces.size(); ++p)
        {
            const int budget = std::max(30, options.max_evaluations - est.evaluations);
            auto res = quadrature::integrate<Eigen::Matrix3d>(integrand, clip(br, pieces[p].first, pieces[p].second),
                                                              abs_tol, options.tol, norm, budget);
            total += res.value;
            piece_norm[p] = res.value.norm();
            est.quadrature_error += res.error;
            est.evaluations += res.evaluations;
            est.converged = est.converged && res.converged;
        }

        const double q = piece_norm[1] > 0.0 ? piece_norm[2] / piece_norm[1] : 1.0;
        est.tail_estimate = q < 1.0 ? piece_norm[2] * q / (1.0 - q) : piece_norm[2];

        est.r3c = total.cast<cdouble>();
        est.r3c_norm = total.norm();
        est.ratio = est.pi_g_norm > 0.0 ? est.r3c_norm / est.pi_g_norm : 0.0;
        return est;
    }
}
