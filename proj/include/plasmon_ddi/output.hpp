#pragma once

// Table writers for the command-line tool. CSV layout:
//
//   # plasmon-ddi v1.0.0
//   # <key> = <value>            one line per effective configuration entry
//   omega_eV,gamma_plus,gamma_minus,delta_plus,delta_minus,gamma_contrast,delta_contrast,lmax
//   <rows>
//
// The first column is named radius_nm or position_A_nm for those axes. With
// several series each block starts with "# series <i>: ..." and repeats the
// column line. Failed rows keep the axis value, leave the rest empty and are
// followed by a "# error ..." line.

#include <ostream>
#include <string>
#include <vector>

#include "plasmon_ddi/config.hpp"
#include "plasmon_ddi/ddi.hpp"
#include "plasmon_ddi/sweep.hpp"
#include "plasmon_ddi/validation.hpp"

namespace plasmon_ddi::output
{
    inline constexpr const char* kVersion = "1.0.0";

    struct Series
    {
        std::string label; ///< empty for a single series
        sweep::SweepTable table;
    };

    std::string first_column(sweep::Axis axis);

    /// Configuration keys documented in table headers; output.* is left out so
    /// the bytes do not depend on where they are written.
    std::vector<std::pair<std::string, std::string>> header_entries(const config::RunConfig& cfg);

    void write_csv(std::ostream& out, const config::RunConfig& cfg, const std::vector<Series>& series);
    void write_json(std::ostream& out, const config::RunConfig& cfg, const std::vector<Series>& series);

    struct SeriesFlips
    {
        std::string label;
        sweep::FlipReport report;
        /// runs where both contrasts are below -joint_threshold
        std::vector<sweep::Band> joint_negative;
        /// runs where both are above +joint_threshold
        std::vector<sweep::Band> joint_positive;
        int failed_rows = 0;
    };

    SeriesFlips analyse(const config::RunConfig& cfg, const Series& s);
    void write_flips_json(std::ostream& out, const config::RunConfig& cfg, const std::vector<SeriesFlips>& flips);

    void write_validation_json(std::ostream& out, const validation::ValidationReport& report);

    struct CorrectionRow
    {
        ddi::CorrectionEstimate estimate;
        /// same evaluation at half the tolerance
        ddi::CorrectionEstimate refined;
    };

    void write_correction(std::ostream& out, const config::RunConfig& cfg, const std::vector<CorrectionRow>& rows,
                          const std::string& format);
}
