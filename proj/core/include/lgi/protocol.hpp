// protocol.hpp
// Correlators C21, C32, C31 and the combined parameter K for the three-region
// interferometer protocol: closed forms, the operational route built from
// blocked-path propagations (ideal negative measurements), the parameter-space
// sweep, and the violation boundary.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lgi/optics.hpp"

namespace lgi {

struct AbsorberSpec {
    double transmission = 1.0;
    Path path = Path::minus;
};

/// One instrument setting. theta_a / theta_b are the mixing angles of the
/// first and last plate, chi the phase-shifter setting. An optional partial
/// absorber sits directly after the first plate; visibility < 1 models
/// reduced fringe contrast; h_offset is a phase-independent additive rate at
/// detector H, expressed as a fraction of the beam flux (it enters count
/// rates only, never the probability table).
struct ProtocolConfig {
    double theta_a = std::numbers::pi / 2;
    double theta_b = std::numbers::pi / 2;
    double chi = 0.0;
    std::optional<AbsorberSpec> absorber;
    double visibility = 1.0;
    double h_offset = 0.0;
    bool renormalize = false;  ///< condition table entries on survival

    void validate() const;  ///< throws std::invalid_argument on bad ranges
};

/// Joint detection probabilities used by the negative-measurement protocol.
/// Entries are unconditional (absorber loss included) unless renormalized.
///
/// p2_* are P_{2q,1+}(1,1), detected right after region 1. p3_* are the
/// unblocked marginals P_{3q}(1). p3{q3}_block{q2} are P_{3q3,2q2}(1,0),
/// obtained by propagating with a blocker on path q2.
struct JointProbabilityTable {
    double p2_plus = 0.0;
    double p2_minus = 0.0;
    double p3_plus = 0.0;
    double p3_minus = 0.0;
    double p3plus_block2minus = 0.0;
    double p3minus_block2minus = 0.0;
    double p3plus_block2plus = 0.0;
    double p3minus_block2plus = 0.0;

    /// Copy conditioned on survival: the region-2 pair, the region-3
    /// marginals, and the four blocked entries are each divided by their
    /// own sum. Correlators computed from the result are unchanged.
    JointProbabilityTable renormalized() const;
};

/// Correlator values with optional counting-statistics uncertainties.
/// k is always c21 + c32 - c31; n_sigma = (k - 1) / k_sigma is present only
/// when k exceeds 1 and k_sigma is known and positive.
struct CorrelatorSet {
    double c21 = 0.0;
    double c32 = 0.0;
    double c31 = 0.0;
    double k = 0.0;
    std::optional<double> c21_sigma;
    std::optional<double> c32_sigma;
    std::optional<double> c31_sigma;
    std::optional<double> k_sigma;
    std::optional<double> n_sigma;
};

/// Closed forms for the ideal instrument:
///   C21 = cos theta_a
///   C32 = cos theta_b
///   C31 = cos theta_a cos theta_b - cos chi sin theta_a sin theta_b
CorrelatorSet correlators_analytic(double theta_a, double theta_b, double chi);

/// Closed forms for a configured instrument: the absorber is folded into an
/// effective first-plate angle (survival-conditioned), and visibility scales
/// the interference term of C31. h_offset does not enter.
CorrelatorSet correlators_analytic(const ProtocolConfig& config);

/// Reduced form at theta_b = pi/2: K = cos theta_a + cos chi sin theta_a.
double k_reduced(double theta_a, double chi);

/// First-plate angle with the absorber folded in, conditioned on survival.
double effective_theta_a(const ProtocolConfig& config);

/// Elements of region 1 (first plate + optional absorber).
ElementChain region1_chain(const ProtocolConfig& config);

/// Full chain through all three regions, with an optional blocker in
/// region 2. Order: plate A, absorber, phase shifter, dephaser, blocker,
/// plate B.
ElementChain full_chain(const ProtocolConfig& config,
                        std::optional<Path> blocked = std::nullopt);

/// Operational probability table: region-1 detection for the 21 pair,
/// blocked-path propagation for the 32 entries, unblocked marginals for 31.
JointProbabilityTable protocol_probabilities(const ProtocolConfig& config);

/// Count-ratio combination of the table:
///   C21 = (P_{2+} - P_{2-}) / (P_{2+} + P_{2-})
///   C31 = (P_{3+} - P_{3-}) / (P_{3+} + P_{3-})
///   C32 = (P_{3+,2-} + P_{3-,2+} - P_{3+,2+} - P_{3-,2-}) / (sum of four)
/// Each correlator is normalized by its own probability sum, mirroring the
/// ratio estimators used on measured counts.
CorrelatorSet correlators_from_probabilities(const JointProbabilityTable& table);

/// Inclusive-endpoint uniform grid with n >= 2 points (n == 1 gives {lo}).
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// K over a (theta_a, chi) grid at fixed theta_b, row-major with theta_a
/// as the outer (slow) axis.
struct SweepGrid {
    std::vector<double> theta_a;
    std::vector<double> chi;
    double theta_b = std::numbers::pi / 2;
    std::vector<double> k;  ///< theta_a.size() * chi.size(), row-major

    double at(std::size_t i_theta, std::size_t j_chi) const {
        return k[i_theta * chi.size() + j_chi];
    }
};

SweepGrid sweep_k(std::vector<double> theta_a_grid, std::vector<double> chi_grid,
                  double theta_b);

/// Largest |chi| with K > 1 at theta_b = pi/2:
/// arccos(tan(theta_a / 2)) where tan(theta_a / 2) <= 1, otherwise nothing.
std::optional<double> violation_boundary(double theta_a);

}  // namespace lgi
