#include "lgi/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lgi {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void ProtocolConfig::validate() const {
    require(theta_a >= 0.0 && theta_a <= kPi, "theta_a outside [0, pi]");
    require(theta_b >= 0.0 && theta_b <= kPi, "theta_b outside [0, pi]");
    require(std::isfinite(chi), "chi must be finite");
    require(visibility >= 0.0 && visibility <= 1.0, "visibility outside [0, 1]");
    require(h_offset >= 0.0, "h_offset must be nonnegative");
    if (absorber) {
        require(absorber->transmission >= 0.0 && absorber->transmission <= 1.0,
                "absorber transmission outside [0, 1]");
    }
}

CorrelatorSet correlators_analytic(double theta_a, double theta_b, double chi) {
    CorrelatorSet out;
    out.c21 = std::cos(theta_a);
    out.c32 = std::cos(theta_b);
    out.c31 = std::cos(theta_a) * std::cos(theta_b) -
              std::cos(chi) * std::sin(theta_a) * std::sin(theta_b);
    out.k = out.c21 + out.c32 - out.c31;
    return out;
}

CorrelatorSet correlators_analytic(const ProtocolConfig& config) {
    config.validate();
    double theta_eff = effective_theta_a(config);
    CorrelatorSet out;
    out.c21 = std::cos(theta_eff);
    out.c32 = std::cos(config.theta_b);
    out.c31 = std::cos(theta_eff) * std::cos(config.theta_b) -
              config.visibility * std::cos(config.chi) * std::sin(theta_eff) *
                  std::sin(config.theta_b);
    out.k = out.c21 + out.c32 - out.c31;
    return out;
}

double k_reduced(double theta_a, double chi) {
    return std::cos(theta_a) + std::cos(chi) * std::sin(theta_a);
}

double effective_theta_a(const ProtocolConfig& config) {
    if (!config.absorber) return config.theta_a;
    // Survival-conditioned amplitudes after plate A + absorber.
    double amp_plus = std::cos(0.5 * config.theta_a);
    double amp_minus = std::sin(0.5 * config.theta_a);
    double root_t = std::sqrt(config.absorber->transmission);
    if (config.absorber->path == Path::minus) {
        amp_minus *= root_t;
    } else {
        amp_plus *= root_t;
    }
    return 2.0 * std::atan2(amp_minus, amp_plus);
}

ElementChain region1_chain(const ProtocolConfig& config) {
    ElementChain chain;
    chain.emplace_back(Beamsplitter{config.theta_a});
    if (config.absorber) {
        chain.emplace_back(Absorber{config.absorber->transmission, config.absorber->path});
    }
    return chain;
}

ElementChain full_chain(const ProtocolConfig& config, std::optional<Path> blocked) {
    ElementChain chain = region1_chain(config);
    chain.emplace_back(PhaseShifter{config.chi});
    if (config.visibility < 1.0) {
        chain.emplace_back(Dephaser{config.visibility});
    }
    if (blocked) {
        chain.emplace_back(Blocker{*blocked});
    }
    chain.emplace_back(Beamsplitter{config.theta_b});
    return chain;
}

JointProbabilityTable protocol_probabilities(const ProtocolConfig& config) {
    config.validate();
    const TwoPathState in = TwoPathState::path_plus();

    JointProbabilityTable table;
    auto region2 = detection_probabilities(propagate(in, region1_chain(config)));
    table.p2_plus = region2.p_plus;
    table.p2_minus = region2.p_minus;

    auto region3 = detection_probabilities(propagate(in, full_chain(config)));
    table.p3_plus = region3.p_plus;
    table.p3_minus = region3.p_minus;

    auto blocked_minus =
        detection_probabilities(propagate(in, full_chain(config, Path::minus)));
    table.p3plus_block2minus = blocked_minus.p_plus;
    table.p3minus_block2minus = blocked_minus.p_minus;

    auto blocked_plus =
        detection_probabilities(propagate(in, full_chain(config, Path::plus)));
    table.p3plus_block2plus = blocked_plus.p_plus;
    table.p3minus_block2plus = blocked_plus.p_minus;

    return config.renormalize ? table.renormalized() : table;
}

JointProbabilityTable JointProbabilityTable::renormalized() const {
    auto scaled = [](double value, double sum) { return sum > 0.0 ? value / sum : 0.0; };
    JointProbabilityTable out = *this;
    double s2 = p2_plus + p2_minus;
    out.p2_plus = scaled(p2_plus, s2);
    out.p2_minus = scaled(p2_minus, s2);
    double s3 = p3_plus + p3_minus;
    out.p3_plus = scaled(p3_plus, s3);
    out.p3_minus = scaled(p3_minus, s3);
    double sb = p3plus_block2minus + p3minus_block2minus + p3plus_block2plus +
                p3minus_block2plus;
    out.p3plus_block2minus = scaled(p3plus_block2minus, sb);
    out.p3minus_block2minus = scaled(p3minus_block2minus, sb);
    out.p3plus_block2plus = scaled(p3plus_block2plus, sb);
    out.p3minus_block2plus = scaled(p3minus_block2plus, sb);
    return out;
}

CorrelatorSet correlators_from_probabilities(const JointProbabilityTable& table) {
    auto ratio = [](double num, double den, const char* what) {
        if (!(den > 0.0)) {
            throw std::invalid_argument(std::string("empty probability sum for ") + what);
        }
        return num / den;
    };
    CorrelatorSet out;
    out.c21 = ratio(table.p2_plus - table.p2_minus, table.p2_plus + table.p2_minus, "C21");
    out.c31 = ratio(table.p3_plus - table.p3_minus, table.p3_plus + table.p3_minus, "C31");
    double blocked_sum = table.p3plus_block2minus + table.p3minus_block2minus +
                         table.p3plus_block2plus + table.p3minus_block2plus;
    out.c32 = ratio(table.p3plus_block2minus + table.p3minus_block2plus -
                        table.p3plus_block2plus - table.p3minus_block2minus,
                    blocked_sum, "C32");
    out.k = out.c21 + out.c32 - out.c31;
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) throw std::invalid_argument("linspace needs at least one point");
    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = lo;
        return grid;
    }
    double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
    }
    grid.back() = hi;
    return grid;
}

SweepGrid sweep_k(std::vector<double> theta_a_grid, std::vector<double> chi_grid,
                  double theta_b) {
    if (theta_a_grid.empty() || chi_grid.empty()) {
        throw std::invalid_argument("sweep grids must be non-empty");
    }
    SweepGrid grid;
    grid.theta_a = std::move(theta_a_grid);
    grid.chi = std::move(chi_grid);
    grid.theta_b = theta_b;
    grid.k.resize(grid.theta_a.size() * grid.chi.size());
    for (std::size_t i = 0; i < grid.theta_a.size(); ++i) {
        for (std::size_t j = 0; j < grid.chi.size(); ++j) {
            grid.k[i * grid.chi.size() + j] =
                correlators_analytic(grid.theta_a[i], theta_b, grid.chi[j]).k;
        }
    }
    return grid;
}

std::optional<double> violation_boundary(double theta_a) {
    if (!(theta_a > 0.0 && theta_a < kPi)) {
        throw std::invalid_argument("theta_a outside (0, pi)");
    }
    double t = std::tan(0.5 * theta_a);
    if (t > 1.0) return std::nullopt;
    return std::acos(t);
}

}  // namespace lgi
