#include "lgi/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace lgi {

TwoPathState TwoPathState::superposition(complexd amp_plus, complexd amp_minus) {
    double np = std::norm(amp_plus);
    double nm = std::norm(amp_minus);
    if (np + nm > 1.0 + 1e-12) {
        throw std::invalid_argument("superposition amplitudes exceed unit norm");
    }
    return {np, nm, amp_plus * std::conj(amp_minus)};
}

std::array<std::array<complexd, 2>, 2> TwoPathState::matrix() const {
    return {{{complexd{pop_plus, 0.0}, coherence},
             {std::conj(coherence), complexd{pop_minus, 0.0}}}};
}

std::array<double, 2> TwoPathState::eigenvalues() const {
    double mean = 0.5 * (pop_plus + pop_minus);
    double half_diff = 0.5 * (pop_plus - pop_minus);
    double radius = std::sqrt(half_diff * half_diff + std::norm(coherence));
    return {mean - radius, mean + radius};
}

bool TwoPathState::physical(double tol) const {
    auto ev = eigenvalues();
    return ev[0] >= -tol && trace() <= 1.0 + tol;
}

Beamsplitter::Beamsplitter(double theta_rad) : theta(theta_rad) {
    if (!(theta_rad >= 0.0 && theta_rad <= std::numbers::pi)) {
        throw std::invalid_argument("beamsplitter theta outside [0, pi]");
    }
}

Absorber::Absorber(double transmission, Path path)
    : transmission(transmission), path(path) {
    if (!(transmission >= 0.0 && transmission <= 1.0)) {
        throw std::invalid_argument("absorber transmission outside [0, 1]");
    }
}

Dephaser::Dephaser(double visibility) : visibility(visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw std::invalid_argument("dephaser visibility outside [0, 1]");
    }
}

TwoPathState apply(const TwoPathState& state, const Beamsplitter& bs) {
    // U rho U^dag with U = [[c, is], [is, c]].
    double c = std::cos(0.5 * bs.theta);
    double s = std::sin(0.5 * bs.theta);
    double cross = 2.0 * c * s * state.coherence.imag();
    double pp = c * c * state.pop_plus + s * s * state.pop_minus + cross;
    double mm = s * s * state.pop_plus + c * c * state.pop_minus - cross;
    complexd coh = (c * c) * state.coherence + (s * s) * std::conj(state.coherence) -
                   complexd{0.0, c * s * (state.pop_plus + state.pop_minus)};
    return {pp, mm, coh};
}

TwoPathState apply(const TwoPathState& state, const PhaseShifter& ps) {
    // amp_minus picks up e^{i chi}, so rho_{+-} rotates by e^{-i chi}.
    return {state.pop_plus, state.pop_minus,
            state.coherence * std::polar(1.0, -ps.chi)};
}

TwoPathState apply(const TwoPathState& state, const Absorber& ab) {
    double t = ab.transmission;
    double root_t = std::sqrt(t);
    if (ab.path == Path::minus) {
        return {state.pop_plus, t * state.pop_minus, root_t * state.coherence};
    }
    return {t * state.pop_plus, state.pop_minus, root_t * state.coherence};
}

TwoPathState apply(const TwoPathState& state, const Blocker& bl) {
    if (bl.path == Path::minus) {
        return {state.pop_plus, 0.0, {}};
    }
    return {0.0, state.pop_minus, {}};
}

TwoPathState apply(const TwoPathState& state, const Dephaser& dp) {
    return {state.pop_plus, state.pop_minus, dp.visibility * state.coherence};
}

TwoPathState apply(const TwoPathState& state, const Element& element) {
    return std::visit([&](const auto& e) { return apply(state, e); }, element);
}

TwoPathState propagate(TwoPathState state, const ElementChain& chain) {
    for (const auto& element : chain) {
        state = apply(state, element);
    }
    return state;
}

DetectionProbabilities detection_probabilities(const TwoPathState& state) {
    return {state.pop_plus, state.pop_minus};
}

double effective_theta(double transmission) {
    if (!(transmission >= 0.0 && transmission <= 1.0)) {
        throw std::invalid_argument("transmission outside [0, 1]");
    }
    return std::acos((1.0 - transmission) / (1.0 + transmission));
}

}  // namespace lgi
