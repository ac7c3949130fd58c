#include "lgi/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lgi {

namespace {

struct InterferogramPoint {
    double chi = 0.0;
    double n_o = 0.0;
    double n_h = 0.0;
};

std::vector<InterferogramPoint> collect_interferogram(
    const std::vector<CountRecord>& records) {
    std::vector<InterferogramPoint> points;
    for (const auto& rec : records) {
        if (rec.scan_var != ScanVariable::chi_rad) {
            throw std::invalid_argument("interferogram records must scan chi_rad");
        }
        auto it = std::find_if(points.begin(), points.end(), [&](const auto& p) {
            return p.chi == rec.scan_value;
        });
        if (it == points.end()) {
            points.push_back({rec.scan_value, -1.0, -1.0});
            it = points.end() - 1;
        }
        double counts = static_cast<double>(rec.counts);
        if (rec.detector == DetectorId::O) {
            it->n_o = counts;
        } else if (rec.detector == DetectorId::H) {
            it->n_h = counts;
        } else {
            throw std::invalid_argument("interferogram records must come from O or H");
        }
    }
    for (const auto& p : points) {
        if (p.n_o < 0.0 || p.n_h < 0.0) {
            throw std::invalid_argument("interferogram is missing a detector at some chi");
        }
    }
    if (points.size() < 5) {
        throw std::invalid_argument("interferogram needs at least 5 phase settings");
    }
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.chi < b.chi; });
    return points;
}

struct BlockerCounts {
    double o_2minus = -1.0;
    double h_2minus = -1.0;
    double o_2plus = -1.0;
    double h_2plus = -1.0;
};

BlockerCounts collect_blocker(const std::vector<CountRecord>& records) {
    BlockerCounts counts;
    for (const auto& rec : records) {
        double* slot = nullptr;
        if (rec.blocker == BlockerState::path_2minus) {
            slot = rec.detector == DetectorId::O ? &counts.o_2minus : &counts.h_2minus;
        } else if (rec.blocker == BlockerState::path_2plus) {
            slot = rec.detector == DetectorId::O ? &counts.o_2plus : &counts.h_2plus;
        } else {
            throw std::invalid_argument("blocker record without a blocker state");
        }
        if (rec.detector == DetectorId::mobile) {
            throw std::invalid_argument("blocker records must come from O or H");
        }
        *slot = static_cast<double>(rec.counts);
    }
    auto check = [](double v, const char* name) {
        if (v < 0.0) {
            throw std::invalid_argument(std::string("missing blocker run: ") + name);
        }
    };
    check(counts.o_2minus, "detector O with blocker 2-");
    check(counts.h_2minus, "detector H with blocker 2-");
    check(counts.o_2plus, "detector O with blocker 2+");
    check(counts.h_2plus, "detector H with blocker 2+");
    return counts;
}

EstimatedCorrelator c31_at_point(const InterferogramPoint& p, bool relabel) {
    return relabel ? estimate_c31(p.n_o, p.n_h) : estimate_c31(p.n_h, p.n_o);
}

EstimatedCorrelator c32_from_counts(const BlockerCounts& b, bool relabel) {
    // N_{3q3,2q2}: the 3+ port is H by default, O when relabeled.
    return relabel ? estimate_c32(b.o_2minus, b.h_2plus, b.o_2plus, b.h_2minus)
                   : estimate_c32(b.h_2minus, b.o_2plus, b.h_2plus, b.o_2minus);
}

std::size_t nearest_phase_index(const std::vector<InterferogramPoint>& points,
                                double target) {
    std::size_t best = 0;
    double best_dist = std::abs(wrap_angle(points[0].chi - target));
    for (std::size_t i = 1; i < points.size(); ++i) {
        double dist = std::abs(wrap_angle(points[i].chi - target));
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return best;
}

// Model-based C31 at chi from the two cosine fits, with the uncertainty
// propagated from each fit's covariance (delta method, independent fits).
EstimatedCorrelator c31_from_fits(const FitResult& fit_o, const FitResult& fit_h,
                                  double chi, bool relabel) {
    auto model_variance = [&](const FitResult& fit) {
        std::array<double, 3> g{};
        model_gradient(FitModel::cosine, fit.parameters, chi, g);
        double var = 0.0;
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                var += g[a] * fit.covariance[a * 3 + b] * g[b];
            }
        }
        return std::max(var, 0.0);
    };
    double m_o = eval_model(FitModel::cosine, fit_o.parameters, chi);
    double m_h = eval_model(FitModel::cosine, fit_h.parameters, chi);
    double plus = relabel ? m_o : m_h;
    double minus = relabel ? m_h : m_o;
    double var_plus = relabel ? model_variance(fit_o) : model_variance(fit_h);
    double var_minus = relabel ? model_variance(fit_h) : model_variance(fit_o);
    double total = plus + minus;
    if (!(total > 0.0)) {
        throw std::invalid_argument("fitted interferogram models sum to zero");
    }
    EstimatedCorrelator out;
    out.value = (plus - minus) / total;
    double d_plus = 2.0 * minus / (total * total);
    double d_minus = 2.0 * plus / (total * total);
    out.sigma = std::sqrt(d_plus * d_plus * var_plus + d_minus * d_minus * var_minus);
    out.source_counts = {plus, minus};
    return out;
}

struct SplitScan {
    std::vector<double> x_minus, y_minus;
    std::vector<double> x_plus, y_plus;
};

// Split the two-peak transversal scan at the midpoint between the peaks.
// The higher-position window belongs to path + (the scan crosses path -
// first).
SplitScan split_transversal(const std::vector<CountRecord>& records) {
    std::vector<std::pair<double, double>> data;
    data.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.scan_var != ScanVariable::pos_mm) {
            throw std::invalid_argument("transversal records must scan pos_mm");
        }
        data.emplace_back(rec.scan_value, static_cast<double>(rec.counts));
    }
    if (data.size() < 10) {
        throw std::invalid_argument("transversal scan needs at least 10 positions");
    }
    std::sort(data.begin(), data.end());

    double span = data.back().first - data.front().first;
    std::size_t first_peak = 0;
    for (std::size_t i = 1; i < data.size(); ++i) {
        if (data[i].second > data[first_peak].second) first_peak = i;
    }
    std::size_t second_peak = data.size();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (std::abs(data[i].first - data[first_peak].first) <= span / 3.0) continue;
        if (second_peak == data.size() || data[i].second > data[second_peak].second) {
            second_peak = i;
        }
    }
    if (second_peak == data.size()) {
        throw std::invalid_argument("could not locate two separated peaks in the transversal scan");
    }
    double midpoint = 0.5 * (data[first_peak].first + data[second_peak].first);

    SplitScan split;
    for (const auto& [x, y] : data) {
        if (x < midpoint) {
            split.x_minus.push_back(x);
            split.y_minus.push_back(y);
        } else {
            split.x_plus.push_back(x);
            split.y_plus.push_back(y);
        }
    }
    return split;
}

struct Region3Analysis {
    EstimatedCorrelator c31;
    EstimatedCorrelator c32;
    double operating_chi = 0.0;
    std::vector<KCurvePoint> k_curve;
};

Region3Analysis analyze_region3(const std::vector<InterferogramPoint>& points,
                                const BlockerCounts& blocker, const FitResult& fit_o,
                                const EstimatedCorrelator& c21, bool relabel,
                                OperatingPointMode mode) {
    Region3Analysis out;
    out.c32 = c32_from_counts(blocker, relabel);

    out.k_curve.reserve(points.size());
    for (const auto& p : points) {
        auto c31 = c31_at_point(p, relabel);
        double k = c21.value + out.c32.value - c31.value;
        double sigma = std::sqrt(c21.sigma * c21.sigma + out.c32.sigma * out.c32.sigma +
                                 c31.sigma * c31.sigma);
        out.k_curve.push_back({p.chi, k, sigma});
    }

    std::size_t pick = 0;
    if (mode == OperatingPointMode::fitted_zero) {
        // The O fringe peaks at the fitted phase origin; the relabeled
        // optimum sits half a period away.
        double target = fit_o.phase_origin() + (relabel ? std::numbers::pi : 0.0);
        pick = nearest_phase_index(points, target);
    } else {
        for (std::size_t i = 1; i < out.k_curve.size(); ++i) {
            if (out.k_curve[i].k > out.k_curve[pick].k) pick = i;
        }
    }
    out.operating_chi = points[pick].chi;
    out.c31 = c31_at_point(points[pick], relabel);
    return out;
}

}  // namespace

AnalysisReport analyze_records(const std::vector<CountRecord>& interferogram,
                               const std::vector<CountRecord>& transversal,
                               const std::vector<CountRecord>& blocker_runs,
                               const AnalysisOptions& options) {
    AnalysisReport report;
    report.relabel = options.relabel;

    auto points = collect_interferogram(interferogram);
    std::vector<double> chis, n_o, n_h;
    chis.reserve(points.size());
    for (const auto& p : points) {
        chis.push_back(p.chi);
        n_o.push_back(p.n_o);
        n_h.push_back(p.n_h);
    }
    report.cosine_fit_o = fit_cosine(chis, n_o);
    report.cosine_fit_h = fit_cosine(chis, n_h);

    auto split = split_transversal(transversal);
    report.gaussian_fit_minus = fit_gaussian(split.x_minus, split.y_minus);
    report.gaussian_fit_plus = fit_gaussian(split.x_plus, split.y_plus);
    report.c21 = estimate_c21(report.gaussian_fit_plus.peak(),
                              report.gaussian_fit_plus.sigma(0),
                              report.gaussian_fit_minus.peak(),
                              report.gaussian_fit_minus.sigma(0));

    auto blocker = collect_blocker(blocker_runs);
    auto region3 = analyze_region3(points, blocker, report.cosine_fit_o, report.c21,
                                   options.relabel, options.operating_point);
    report.c31 = region3.c31;
    report.c32 = region3.c32;
    report.operating_chi = region3.operating_chi;
    report.k_curve = std::move(region3.k_curve);
    report.correlators = combine_k(report.c21, report.c32, report.c31);
    report.c31_from_fit = c31_from_fits(report.cosine_fit_o, report.cosine_fit_h,
                                        report.operating_chi, options.relabel);

    auto note_fit = [&](const FitResult& fit, const char* label) {
        for (const auto& warning : fit.warnings) {
            report.notes.push_back(std::string(label) + ": " + warning);
        }
    };
    note_fit(report.cosine_fit_o, "O interferogram fit");
    note_fit(report.cosine_fit_h, "H interferogram fit");
    note_fit(report.gaussian_fit_minus, "path - profile fit");
    note_fit(report.gaussian_fit_plus, "path + profile fit");
    return report;
}

CorrelatorSet relabel_detectors(const std::vector<CountRecord>& interferogram,
                                const std::vector<CountRecord>& blocker_runs,
                                const EstimatedCorrelator& c21,
                                OperatingPointMode mode) {
    auto points = collect_interferogram(interferogram);
    std::vector<double> chis, n_o;
    for (const auto& p : points) {
        chis.push_back(p.chi);
        n_o.push_back(p.n_o);
    }
    auto fit_o = fit_cosine(chis, n_o);
    auto blocker = collect_blocker(blocker_runs);
    auto region3 = analyze_region3(points, blocker, fit_o, c21, true, mode);
    return combine_k(c21, region3.c32, region3.c31);
}

}  // namespace lgi
