#pragma once

// Transfer rate and dipole-dipole potential between two emitters from the
// Green tensor of green.hpp.
//
//   Gamma_ij = (2/hbar eps0) Im[d_i^* . G(r_i, r_j) . d_j]
//   Delta_ij = -(1/hbar eps0) Re[d_i^* . G(r_i, r_j) . d_j]
//
// Everything is returned divided by the vacuum rate, so the dipole magnitude
// and hbar eps0 drop out: Gamma/Gamma0 = (6 pi / k0^3) Im[u_i^* . G . u_j].

#include <optional>

#include "plasmon_ddi/green.hpp"
#include "plasmon_ddi/types.hpp"

namespace plasmon_ddi::ddi
{
    struct Emitter
    {
        Vec3 position = Vec3::Zero();
        double dipole_magnitude = 1.0;
        ComplexVec3 polarization = ComplexVec3(1.0, 0.0, 0.0);
        double transition_energy = 0.0; ///< eV; 0 means "evaluate at the requested omega"

        /// Rescales the polarization to unit Hermitian norm; throws on a zero vector.
        static Emitter make(const Vec3& position, const ComplexVec3& polarization, double transition_energy = 0.0,
                            double dipole_magnitude = 1.0);
    };

    ComplexVec3 normalized_polarization(const ComplexVec3& u);

    struct DdiResult
    {
        double omega = 0.0;
        double gamma_ratio = 0.0;
        double delta_ratio = 0.0;
        /// Gamma_ii/Gamma0 and Gamma_jj/Gamma0, filled when requested.
        std::optional<double> self_rate_i;
        std::optional<double> self_rate_j;
        int lmax_used = 0;
    };

    struct ContrastResult
    {
        double omega = 0.0;
        double gamma_plus = 0.0;
        double gamma_minus = 0.0;
        double delta_plus = 0.0;
        double delta_minus = 0.0;
        /// Empty when both magnitudes vanish.
        std::optional<double> gamma_contrast;
        std::optional<double> delta_contrast;
        int lmax_used = 0;
    };

    struct CorrectionEstimate
    {
        double z = 0.0;
        double omega_bar = 0.0;
        Matrix3c r1c = Matrix3c::Zero();
        Matrix3c r2c = Matrix3c::Zero();
        Matrix3c r3c = Matrix3c::Zero();
        double r3c_norm = 0.0;
        double pi_g_norm = 0.0;
        double ratio = 0.0;
        double cutoff = 0.0;
        /// summed Gauss-Kronrod error estimate over (0, cutoff]
        double quadrature_error = 0.0;
        /// extrapolated size of the integral beyond the cutoff
        double tail_estimate = 0.0;
        int evaluations = 0;
        bool converged = false;
    };

    struct CouplingOptions
    {
        green::ExpansionOptions expansion;
        bool self_rates = false;
    };

    /// Normalizer in the internal units (hbar eps0 = 1): 2 u^2 k0^3 / (6 pi).
    double gamma0(double omega, double dipole_magnitude = 1.0);

    /// u_i^* . G . u_j
    cdouble contract(const ComplexVec3& u_i, const Matrix3c& g, const ComplexVec3& u_j);

    /// (Gamma/Gamma0, Delta/Gamma0) from a tensor evaluated at omega.
    std::pair<double, double> normalized_rates(const ComplexVec3& u_i, const Matrix3c& g, const ComplexVec3& u_j,
                                               double omega);

    /// Cross term between emitters i and j at omega (total tensor).
    DdiResult coupling(const Emitter& i, const Emitter& j, const green::SphereSystem& sys, double omega,
                       const CouplingOptions& options = {}, const green::MieCoefficients* mie = nullptr);

    /// Gamma_ii/Gamma0 including the vacuum part, and Delta_ii/Gamma0 from the
    /// scattering part alone (the vacuum shift is not computed).
    DdiResult self_coupling(const Emitter& e, const green::SphereSystem& sys, double omega,
                            const green::ExpansionOptions& options = {},
                            const green::MieCoefficients* mie = nullptr);

    /// (|x_plus| - |x_minus|) / (|x_plus| + |x_minus|); empty for 0/0.
    std::optional<double> contrast_value(double x_plus, double x_minus);

    ContrastResult contrast(const Emitter& a_base, const ComplexVec3& plus_pol, const ComplexVec3& minus_pol,
                            const Emitter& b, const green::SphereSystem& sys, double omega,
                            const green::ExpansionOptions& options = {}, const green::MieCoefficients* mie = nullptr);

    /// |u_A^* . u_B|
    double selection_rule_check(const ComplexVec3& u_a, const ComplexVec3& u_b);

    /// [[Gamma_AA, Gamma_AB], [Gamma_BA, Gamma_BB]] / Gamma0 with the cross
    /// terms exactly as coupling() returns them.
    Eigen::Matrix2d rate_matrix(const Emitter& a, const Emitter& b, const green::SphereSystem& sys, double omega,
                                const green::ExpansionOptions& options = {});

    /// Hermitian dissipation matrix 2 u_i^* . Im G(r_i, r_j) . u_j / Gamma0.
    /// Coincides with rate_matrix() for real polarizations.
    Eigen::Matrix2cd dissipation_matrix(const Emitter& a, const Emitter& b, const green::SphereSystem& sys,
                                        double omega, const green::ExpansionOptions& options = {});

    struct CorrectionOptions
    {
        /// eV; 0 selects 5 (omega_A + omega_B)
        double cutoff = 0.0;
        double tol = 1e-6;
        int max_evaluations = 200000;
        green::ExpansionOptions expansion;
    };

    /// Principal-value correction R3c(z) of the level-shift matrix element
    /// between A and B, as a tensor, compared against pi G(r_B, r_A, z).
    /// Requires 0 < z < omega_A + omega_B, where R1c and R2c vanish.
    CorrectionEstimate correction_r3c(const Emitter& a, const Emitter& b, const green::SphereSystem& sys, double z,
                                      const CorrectionOptions& options = {});
}
