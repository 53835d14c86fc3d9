#include "plasmon_ddi/material.hpp"

#include <cmath>

namespace plasmon_ddi::material
{
    void DrudeModel::validate() const
    {
        if (!(eps_inf >= 1.0))
            throw DomainError("drude: eps_inf must be >= 1");
        if (!(omega_m > 0.0))
            throw DomainError("drude: omega_m must be > 0");
        if (!(gamma_m > 0.0))
            throw DomainError("drude: gamma_m must be > 0");
    }

    cdouble permittivity(const DrudeModel& model, double omega)
    {
        if (!(omega > 0.0))
            throw DomainError("permittivity: omega must be > 0");
        return model.eps_inf - model.omega_m * model.omega_m / cdouble(omega * omega, model.gamma_m * omega);
    }

    cdouble absorbing_sqrt(cdouble eps)
    {
        cdouble n = std::sqrt(eps);
        if (n.imag() < 0.0)
            n = -n;
        return n;
    }

    cdouble wavenumber(cdouble eps, double omega)
    {
        if (!(omega > 0.0))
            throw DomainError("wavenumber: omega must be > 0");
        return absorbing_sqrt(eps) * (omega / kHbarC);
    }
}
