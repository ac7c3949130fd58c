// config.hpp
// Flat `key = value` run configuration with `#` comments. Angles are radians;
// every angle key also accepts a `_deg` variant. Unknown keys, malformed
// lines, and out-of-range values are errors that cite the line number.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "lgi/analysis.hpp"
#include "lgi/counting.hpp"
#include "lgi/protocol.hpp"

namespace lgi {

/// Scan geometry for the simulated measurements. The phase grid should
/// contain the fringe origin (chi = 0) so the default operating point is
/// an actual scan point.
struct ScanConfig {
    std::size_t chi_points = 31;
    double chi_min = -std::numbers::pi;
    double chi_max = std::numbers::pi;
    std::size_t scan_points = 41;
    double scan_min = -10.0;  ///< mm
    double scan_max = 10.0;   ///< mm
    TransversalProfile profile;

    void validate() const;
};

struct RunConfig {
    ProtocolConfig protocol;
    BeamConfig beam;
    ScanConfig scan;
    AnalysisOptions analysis;
    std::string output_dir = ".";

    // Recorded beam metadata; carried through, never used in computation.
    std::optional<double> wavelength_angstrom;
    std::optional<double> delta_lambda_over_lambda;
    std::optional<double> beam_cross_section_mm;

    void validate() const;
};

/// Parse a config file body. Defaults apply for absent keys; errors carry
/// the offending line number.
RunConfig parse_config(std::string_view text);

/// Read and parse a config file from disk.
RunConfig load_config(const std::string& path);

/// Apply one key=value override (same keys as the file; no line numbers).
void apply_config_key(RunConfig& config, std::string_view key, std::string_view value);

std::vector<double> chi_grid(const ScanConfig& scan);
std::vector<double> position_grid(const ScanConfig& scan);

}  // namespace lgi
