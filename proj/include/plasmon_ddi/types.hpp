#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace plasmon_ddi
{
    using cdouble = std::complex<double>;

    /// Cartesian position in nm.
    using Vec3 = Eigen::Vector3d;
    /// Complex 3-vector; transition-dipole polarizations and field algebra.
    using ComplexVec3 = Eigen::Vector3cd;
    using Matrix3c = Eigen::Matrix3cd;

    inline constexpr double kPi = 3.14159265358979323846;

    /// hbar*c in eV nm. The only physical constant the numerics use.
    inline constexpr double kHbarC = 197.3269804;

    inline constexpr cdouble kI{0.0, 1.0};

    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Argument outside the domain of an operation.
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    /// A truncated series or quadrature failed to reach its tolerance.
    class ConvergenceError : public Error
    {
    public:
        ConvergenceError(const std::string& what, int lmax_reached, double residual)
            : Error(what), m_lmax(lmax_reached), m_residual(residual) {}

        int lmax_reached() const noexcept { return m_lmax; }
        double residual() const noexcept { return m_residual; }

    private:
        int m_lmax;
        double m_residual;
    };
}
