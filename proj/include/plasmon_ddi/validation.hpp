#pragma once

// Self-checks of the numerics: an arbitrary-precision Bessel oracle and the
// invariant suites of specfun, green and ddi on seeded random configurations.

#include <cstdint>
#include <string>
#include <vector>

#include "plasmon_ddi/green.hpp"
#include "plasmon_ddi/specfun.hpp"

namespace plasmon_ddi::validation
{
    enum class Status
    {
        pass,
        fail,
        skipped,
    };

    const char* status_name(Status s);

    struct CheckResult
    {
        std::string id;
        Status status = Status::fail;
        double residual = 0.0;
        double tolerance = 0.0;
        double runtime_s = 0.0;
        std::string detail;
    };

    struct ValidationReport
    {
        std::uint64_t seed = 0;
        bool quick = false;
        std::vector<CheckResult> checks;

        /// true unless some check failed; skipped checks do not count
        bool ok() const;
        std::string to_text() const;
    };

    struct ValidationOptions
    {
        std::uint64_t seed = 1;
        bool quick = false;
        green::SphereSystem sphere;
        /// 0: hardware concurrency
        int threads = 1;
    };

    ValidationReport run_all(const ValidationOptions& options);

    struct OracleValue
    {
        cdouble value;
        /// bound on |error| / |value| of the series evaluation
        double relative_error_bound = 0.0;
        std::string real_text;
        std::string imag_text;
    };

    /// j_l(z) (family j) or h_l^(1)(z) (family h1) from the ascending series in
    /// 100-digit arithmetic. Requires digits <= 50, |z| <= 50, 0 <= l <= 60;
    /// throws ConvergenceError if the bound exceeds 10^-digits.
    OracleValue oracle_bessel(int l, cdouble z, int digits, specfun::BesselFamily family = specfun::BesselFamily::j);
}
