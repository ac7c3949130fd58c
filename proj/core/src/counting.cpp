#include "lgi/counting.hpp"

#include <cmath>
#include <stdexcept>

namespace lgi {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Transformed rejection sampler (PTRS) for mean >= 10.
std::uint64_t poisson_ptrs(double mean, std::mt19937_64& rng) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = uniform01(rng) - 0.5;
        double v = uniform01(rng);
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::uint64_t>(kf);
        }
        if (kf < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        double k = kf;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = k * log_mean - mean - std::lgamma(k + 1.0);
        if (lhs <= rhs) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

}  // namespace

void BeamConfig::validate() const {
    require(flux_rate > 0.0, "flux_rate must be positive");
    require(interferogram_s > 0.0 && transversal_s > 0.0 && blocker_s > 0.0,
            "measurement times must be positive");
    require(detector_efficiency > 0.0 && detector_efficiency <= 1.0,
            "detector_efficiency outside (0, 1]");
}

void TransversalProfile::validate() const {
    require(width > 0.0, "scan width must be positive");
    require(center_plus != center_minus, "scan centers must be distinct");
}

std::uint64_t substream_seed(std::uint64_t master, RunKind kind, DetectorId detector,
                             std::uint32_t point) {
    std::uint64_t h = splitmix64(master ^ static_cast<std::uint64_t>(kind));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(detector) << 32));
    return splitmix64(h ^ point);
}

std::mt19937_64 substream(std::uint64_t master, RunKind kind, DetectorId detector,
                          std::uint32_t point) {
    return std::mt19937_64{substream_seed(master, kind, detector, point)};
}

std::uint64_t sample_poisson(double mean, std::mt19937_64& rng) {
    require(mean >= 0.0 && std::isfinite(mean), "poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double product = uniform01(rng);
        while (product > limit) {
            ++k;
            product *= uniform01(rng);
        }
        return k;
    }
    return poisson_ptrs(mean, rng);
}

DetectorRates interferogram_rates(const ProtocolConfig& protocol, const BeamConfig& beam,
                                  double chi) {
    ProtocolConfig at_chi = protocol;
    at_chi.chi = chi;
    at_chi.renormalize = false;
    auto p3 = detection_probabilities(
        propagate(TwoPathState::path_plus(), full_chain(at_chi)));
    double scale = beam.flux_rate * beam.detector_efficiency;
    return {scale * p3.p_minus, scale * (p3.p_plus + protocol.h_offset)};
}

double transversal_rate(const ProtocolConfig& protocol, const BeamConfig& beam,
                        const TransversalProfile& profile, double x) {
    auto p2 = detection_probabilities(
        propagate(TwoPathState::path_plus(), region1_chain(protocol)));
    auto peak = [&](double center) {
        double dx = (x - center) / profile.width;
        return std::exp(-0.5 * dx * dx);
    };
    return beam.flux_rate * beam.detector_efficiency *
           (p2.p_plus * peak(profile.center_plus) + p2.p_minus * peak(profile.center_minus));
}

DetectorRates blocker_rates(const ProtocolConfig& protocol, const BeamConfig& beam,
                            Path blocked) {
    ProtocolConfig cfg = protocol;
    cfg.renormalize = false;
    auto p3 = detection_probabilities(
        propagate(TwoPathState::path_plus(), full_chain(cfg, blocked)));
    double scale = beam.flux_rate * beam.detector_efficiency;
    return {scale * p3.p_minus, scale * (p3.p_plus + protocol.h_offset)};
}

std::vector<CountRecord> simulate_interferogram(const ProtocolConfig& protocol,
                                                const BeamConfig& beam,
                                                const std::vector<double>& chi_list) {
    protocol.validate();
    beam.validate();
    require(!chi_list.empty(), "chi_list must be non-empty");

    std::vector<CountRecord> records;
    records.reserve(2 * chi_list.size());
    for (std::uint32_t i = 0; i < chi_list.size(); ++i) {
        auto rates = interferogram_rates(protocol, beam, chi_list[i]);
        auto rng_o = substream(beam.seed, RunKind::interferogram, DetectorId::O, i);
        auto rng_h = substream(beam.seed, RunKind::interferogram, DetectorId::H, i);
        records.push_back({"interferogram", DetectorId::O, BlockerState::none,
                           ScanVariable::chi_rad, chi_list[i], beam.interferogram_s,
                           sample_poisson(rates.o_rate * beam.interferogram_s, rng_o)});
        records.push_back({"interferogram", DetectorId::H, BlockerState::none,
                           ScanVariable::chi_rad, chi_list[i], beam.interferogram_s,
                           sample_poisson(rates.h_rate * beam.interferogram_s, rng_h)});
    }
    return records;
}

TransversalScan simulate_transversal_scan(const ProtocolConfig& protocol,
                                          const BeamConfig& beam,
                                          const std::vector<double>& positions,
                                          const TransversalProfile& profile) {
    protocol.validate();
    beam.validate();
    profile.validate();
    require(!positions.empty(), "positions must be non-empty");

    TransversalScan scan;
    if (std::abs(profile.center_plus - profile.center_minus) < 4.0 * profile.width) {
        scan.warning = "transversal peaks overlap: |center_plus - center_minus| < 4 width";
    }
    scan.records.reserve(positions.size());
    for (std::uint32_t i = 0; i < positions.size(); ++i) {
        double rate = transversal_rate(protocol, beam, profile, positions[i]);
        auto rng = substream(beam.seed, RunKind::transversal, DetectorId::mobile, i);
        scan.records.push_back({"transversal", DetectorId::mobile, BlockerState::none,
                                ScanVariable::pos_mm, positions[i], beam.transversal_s,
                                sample_poisson(rate * beam.transversal_s, rng)});
    }
    return scan;
}

std::vector<CountRecord> simulate_blocker_runs(const ProtocolConfig& protocol,
                                               const BeamConfig& beam) {
    protocol.validate();
    beam.validate();

    std::vector<CountRecord> records;
    records.reserve(4);
    struct Run {
        Path blocked;
        RunKind kind;
        BlockerState state;
        const char* label;
    };
    const Run runs[2] = {
        {Path::minus, RunKind::blocker_2minus, BlockerState::path_2minus, "blocker_2-"},
        {Path::plus, RunKind::blocker_2plus, BlockerState::path_2plus, "blocker_2+"},
    };
    for (const Run& run : runs) {
        auto rates = blocker_rates(protocol, beam, run.blocked);
        auto rng_o = substream(beam.seed, run.kind, DetectorId::O, 0);
        auto rng_h = substream(beam.seed, run.kind, DetectorId::H, 0);
        records.push_back({run.label, DetectorId::O, run.state, ScanVariable::chi_rad, 0.0,
                           beam.blocker_s,
                           sample_poisson(rates.o_rate * beam.blocker_s, rng_o)});
        records.push_back({run.label, DetectorId::H, run.state, ScanVariable::chi_rad, 0.0,
                           beam.blocker_s,
                           sample_poisson(rates.h_rate * beam.blocker_s, rng_h)});
    }
    return records;
}

EstimatedCorrelator estimate_c31(double n_plus, double n_minus) {
    require(n_plus >= 0.0 && n_minus >= 0.0, "counts must be nonnegative");
    double total = n_plus + n_minus;
    require(total > 0.0, "C31 estimate needs a nonzero count total");
    EstimatedCorrelator out;
    out.value = (n_plus - n_minus) / total;
    out.sigma = 2.0 * std::sqrt(n_plus * n_minus / (total * total * total));
    out.source_counts = {n_plus, n_minus};
    out.degenerate = n_plus == 0.0 || n_minus == 0.0;
    return out;
}

EstimatedCorrelator estimate_c21(double peak_plus, double peak_plus_sigma,
                                 double peak_minus, double peak_minus_sigma) {
    require(peak_plus > 0.0 && peak_minus > 0.0, "peak counts must be positive");
    require(peak_plus_sigma >= 0.0 && peak_minus_sigma >= 0.0,
            "peak sigmas must be nonnegative");
    double total = peak_plus + peak_minus;
    EstimatedCorrelator out;
    out.value = (peak_plus - peak_minus) / total;
    double d_plus = 2.0 * peak_minus / (total * total);
    double d_minus = 2.0 * peak_plus / (total * total);
    out.sigma = std::sqrt(d_plus * d_plus * peak_plus_sigma * peak_plus_sigma +
                          d_minus * d_minus * peak_minus_sigma * peak_minus_sigma);
    out.source_counts = {peak_plus, peak_minus};
    return out;
}

EstimatedCorrelator estimate_c32(double n_3plus_2minus, double n_3minus_2plus,
                                 double n_3plus_2plus, double n_3minus_2minus) {
    const double n[4] = {n_3plus_2minus, n_3minus_2plus, n_3plus_2plus, n_3minus_2minus};
    double total = 0.0;
    for (double v : n) {
        require(v >= 0.0, "counts must be nonnegative");
        total += v;
    }
    require(total > 0.0, "C32 estimate needs a nonzero count total");
    double numer = n[0] + n[1] - n[2] - n[3];
    EstimatedCorrelator out;
    out.value = numer / total;
    // sigma^2 = sum_i (dC/dN_i)^2 N_i with dC/dN_i = (±total - numer) / total^2.
    double var = 0.0;
    const double sign[4] = {1.0, 1.0, -1.0, -1.0};
    for (int i = 0; i < 4; ++i) {
        double partial = (sign[i] * total - numer) / (total * total);
        var += partial * partial * n[i];
    }
    out.sigma = std::sqrt(var);
    out.source_counts = {n[0], n[1], n[2], n[3]};
    out.degenerate = (n[0] + n[1] == 0.0) || (n[2] + n[3] == 0.0);
    return out;
}

CorrelatorSet combine_k(const EstimatedCorrelator& c21, const EstimatedCorrelator& c32,
                        const EstimatedCorrelator& c31) {
    CorrelatorSet out;
    out.c21 = c21.value;
    out.c32 = c32.value;
    out.c31 = c31.value;
    out.k = out.c21 + out.c32 - out.c31;
    out.c21_sigma = c21.sigma;
    out.c32_sigma = c32.sigma;
    out.c31_sigma = c31.sigma;
    out.k_sigma = std::sqrt(c21.sigma * c21.sigma + c32.sigma * c32.sigma +
                            c31.sigma * c31.sigma);
    if (out.k > 1.0 && *out.k_sigma > 0.0) {
        out.n_sigma = (out.k - 1.0) / *out.k_sigma;
    }
    return out;
}

}  // namespace lgi
