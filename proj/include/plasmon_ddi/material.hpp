#pragma once

#include "plasmon_ddi/types.hpp"

namespace plasmon_ddi::material
{
    /// eps(w) = eps_inf - w_m^2 / (w^2 + i gamma_m w); energies in eV.
    struct DrudeModel
    {
        double eps_inf = 6.0;
        double omega_m = 7.90;
        double gamma_m = 0.051;

        /// Throws DomainError unless eps_inf >= 1, omega_m > 0, gamma_m > 0.
        void validate() const;

        /// Drude silver: eps_inf 6, omega_m 7.90 eV, gamma_m 0.051 eV.
        static DrudeModel silver() { return {}; }
    };

    /// Surrounding medium. Only vacuum is supported.
    struct HostMedium
    {
        double eps_host = 1.0;
    };

    cdouble permittivity(const DrudeModel& model, double omega);

    /// k = sqrt(eps) omega / (hbar c) in nm^-1, on the branch with Im k >= 0.
    cdouble wavenumber(cdouble eps, double omega);

    /// Vacuum wavenumber omega / (hbar c).
    inline double vacuum_wavenumber(double omega) { return omega / kHbarC; }

    /// Principal square root flipped onto the absorbing branch (Im >= 0).
    cdouble absorbing_sqrt(cdouble eps);
}
