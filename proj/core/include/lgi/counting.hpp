// counting.hpp
// Monte-Carlo detector counts for the three correlator measurements, the
// count-ratio estimators with counting-statistics uncertainties, and the
// combination into K.
//
// Reproducibility: every (run kind, detector, scan point) triple gets its
// own random substream, derived from the master seed by hashing the triple
// with splitmix64 steps (see substream_seed). Counts therefore do not
// depend on generation order and are bit-exact for a fixed seed. Poisson
// variates are drawn by our own sampler on top of std::mt19937_64, so the
// stream does not depend on the standard library's distribution choices.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lgi/protocol.hpp"

namespace lgi {

/// Beam and acquisition parameters. flux_rate is the expected detected
/// neutrons per second at full transmission.
struct BeamConfig {
    double flux_rate = 30.0;
    double interferogram_s = 180.0;
    double transversal_s = 300.0;
    double blocker_s = 600.0;
    double detector_efficiency = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
};

enum class DetectorId { O, H, mobile };
enum class BlockerState { none, path_2plus, path_2minus };
enum class ScanVariable { chi_rad, pos_mm };

/// One acquisition: counts collected by one detector for one configuration.
struct CountRecord {
    std::string run;
    DetectorId detector = DetectorId::O;
    BlockerState blocker = BlockerState::none;
    ScanVariable scan_var = ScanVariable::chi_rad;
    double scan_value = 0.0;
    double duration_s = 0.0;
    std::uint64_t counts = 0;
};

/// Transversal-scan beam geometry: Gaussian profiles of common width
/// centered on the two paths. Path + sits at center_plus (the scan crosses
/// path - first, at the smaller position).
struct TransversalProfile {
    double center_plus = 5.0;    ///< mm
    double center_minus = -5.0;  ///< mm
    double width = 1.0;          ///< mm (Gaussian sigma)

    void validate() const;
};

enum class RunKind : std::uint32_t {
    interferogram = 1,
    transversal = 2,
    blocker_2plus = 3,
    blocker_2minus = 4,
};

/// Substream seed for (master, run kind, detector, scan point):
/// three chained splitmix64 steps, one per component.
std::uint64_t substream_seed(std::uint64_t master, RunKind kind, DetectorId detector,
                             std::uint32_t point);

std::mt19937_64 substream(std::uint64_t master, RunKind kind, DetectorId detector,
                          std::uint32_t point);

/// Exact Poisson variate: product-of-uniforms for small means, transformed
/// rejection (PTRS) for large means.
std::uint64_t sample_poisson(double mean, std::mt19937_64& rng);

/// Expected rates in counts per second.
struct DetectorRates {
    double o_rate = 0.0;
    double h_rate = 0.0;
};

/// Unblocked full-chain rates at phase chi. Detector mapping: O sees the
/// 3- port, H sees the 3+ port plus the phase-independent h_offset.
DetectorRates interferogram_rates(const ProtocolConfig& protocol, const BeamConfig& beam,
                                  double chi);

/// Mobile-detector rate at transversal position x (mm).
double transversal_rate(const ProtocolConfig& protocol, const BeamConfig& beam,
                        const TransversalProfile& profile, double x);

/// Rates with a blocker on the given region-2 path.
DetectorRates blocker_rates(const ProtocolConfig& protocol, const BeamConfig& beam,
                            Path blocked);

/// O and H records for every chi in chi_list, duration interferogram_s each.
std::vector<CountRecord> simulate_interferogram(const ProtocolConfig& protocol,
                                                const BeamConfig& beam,
                                                const std::vector<double>& chi_list);

struct TransversalScan {
    std::vector<CountRecord> records;
    std::optional<std::string> warning;  ///< set when the two peaks overlap
};

/// Mobile-detector records across positions (mm), duration transversal_s each.
TransversalScan simulate_transversal_scan(const ProtocolConfig& protocol,
                                          const BeamConfig& beam,
                                          const std::vector<double>& positions,
                                          const TransversalProfile& profile);

/// The four blocked-path acquisitions {blocker on 2-, blocker on 2+} x {O, H},
/// duration blocker_s each.
std::vector<CountRecord> simulate_blocker_runs(const ProtocolConfig& protocol,
                                               const BeamConfig& beam);

/// A correlator estimate with its counting-statistics standard error.
struct EstimatedCorrelator {
    double value = 0.0;
    double sigma = 0.0;
    std::vector<double> source_counts;
    bool degenerate = false;  ///< one side of the ratio was empty
};

/// (N+ - N-) / (N+ + N-) with sigma = 2 sqrt(N+ N- / (N+ + N-)^3).
/// With the default detector mapping, N+ are the H counts and N- the O counts.
EstimatedCorrelator estimate_c31(double n_plus, double n_minus);

/// Ratio of fitted Gaussian peak counts with first-order propagation of the
/// fit-reported peak uncertainties.
EstimatedCorrelator estimate_c21(double peak_plus, double peak_plus_sigma,
                                 double peak_minus, double peak_minus_sigma);

/// (N_{3+2-} + N_{3-2+} - N_{3+2+} - N_{3-2-}) / (sum of four), with sigma
/// from first-order Poisson propagation through the four partials.
EstimatedCorrelator estimate_c32(double n_3plus_2minus, double n_3minus_2plus,
                                 double n_3plus_2plus, double n_3minus_2minus);

/// K = C21 + C32 - C31, sigma_K in quadrature (independent runs), and
/// n_sigma = (K - 1) / sigma_K when K > 1 and sigma_K > 0.
CorrelatorSet combine_k(const EstimatedCorrelator& c21, const EstimatedCorrelator& c32,
                        const EstimatedCorrelator& c31);

}  // namespace lgi
