// analysis.hpp
// Record-level analysis: ingest the three measurement record sets, fit the
// interferograms and beam profiles, evaluate the count-ratio estimators at
// the operating point, and combine into K. Mirrors what the counting
// simulators emit, so simulate -> analyze round-trips.

#pragma once

#include <optional>
#include <vector>

#include "lgi/counting.hpp"
#include "lgi/fitting.hpp"

namespace lgi {

/// Where on the phase axis the reported C31 (and hence K) is evaluated.
/// fitted_zero: the scan point nearest the fitted fringe origin (the O
/// maximum; half a period away when detectors are relabeled).
/// max_k: the scan point maximizing K.
enum class OperatingPointMode { fitted_zero, max_k };

struct AnalysisOptions {
    bool relabel = false;  ///< swap the O/H sign assignment in region 3
    OperatingPointMode operating_point = OperatingPointMode::fitted_zero;
};

struct KCurvePoint {
    double chi = 0.0;
    double k = 0.0;
    double sigma_k = 0.0;
};

struct AnalysisReport {
    EstimatedCorrelator c21;
    EstimatedCorrelator c32;
    EstimatedCorrelator c31;
    CorrelatorSet correlators;  ///< combined values, sigmas, K, n_sigma
    double operating_chi = 0.0;
    bool relabel = false;

    FitResult cosine_fit_o;
    FitResult cosine_fit_h;
    FitResult gaussian_fit_plus;
    FitResult gaussian_fit_minus;

    /// Cross-check: C31 evaluated from the two cosine-fit models at the
    /// operating point, with the uncertainty propagated from the fit
    /// covariances.
    EstimatedCorrelator c31_from_fit;

    std::vector<KCurvePoint> k_curve;  ///< per-chi K with sigma
    std::vector<std::string> notes;
};

/// Full analysis of one simulated or ingested data set. Throws
/// std::invalid_argument on incomplete record sets (naming the missing run).
AnalysisReport analyze_records(const std::vector<CountRecord>& interferogram,
                               const std::vector<CountRecord>& transversal,
                               const std::vector<CountRecord>& blocker_runs,
                               const AnalysisOptions& options = {});

/// Correlators with the region-3 sign assignment swapped (detector O read
/// as 3+, H as 3-). C21 is unaffected and is passed through. The operating
/// point moves half a period, to the relabeled fringe optimum.
CorrelatorSet relabel_detectors(const std::vector<CountRecord>& interferogram,
                                const std::vector<CountRecord>& blocker_runs,
                                const EstimatedCorrelator& c21,
                                OperatingPointMode mode = OperatingPointMode::fitted_zero);

}  // namespace lgi
