// optics.hpp
// Two-path interferometer states and optical elements: density-operator
// representation of the path qubit and the element-by-element propagation
// used by the correlator protocol.

#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <variant>
#include <vector>

namespace lgi {

using complexd = std::complex<double>;

/// Which of the two interferometer paths an element acts on.
enum class Path { plus, minus };

constexpr Path other_path(Path p) {
    return p == Path::plus ? Path::minus : Path::plus;
}

/// Density operator of the path qubit over the ordered basis (path +, path -).
///
/// Hermiticity is structural: only the two real populations and the upper
/// off-diagonal element are stored. The trace is the survival probability;
/// it starts at 1 and is reduced only by absorbing elements. States are
/// never renormalized here, so count rates downstream can use the trace
/// deficit as the absorbed fraction.
struct TwoPathState {
    double pop_plus = 0.0;   ///< rho_{++}
    double pop_minus = 0.0;  ///< rho_{--}
    complexd coherence;      ///< rho_{+-}

    static TwoPathState path_plus() { return {1.0, 0.0, {}}; }
    static TwoPathState path_minus() { return {0.0, 1.0, {}}; }

    /// Pure state from path amplitudes (need not be normalized to 1;
    /// |a|^2 + |b|^2 must not exceed 1).
    static TwoPathState superposition(complexd amp_plus, complexd amp_minus);

    /// Equal-weight coherent superposition (|+> + |->)/sqrt(2).
    static TwoPathState equal_superposition() {
        return superposition({1.0 / std::numbers::sqrt2, 0.0},
                             {1.0 / std::numbers::sqrt2, 0.0});
    }

    double trace() const { return pop_plus + pop_minus; }
    double population(Path p) const {
        return p == Path::plus ? pop_plus : pop_minus;
    }

    /// Full 2x2 matrix, row-major over (plus, minus).
    std::array<std::array<complexd, 2>, 2> matrix() const;

    /// Eigenvalues in ascending order.
    std::array<double, 2> eigenvalues() const;

    /// Positive semidefinite with trace in [0, 1], within tol.
    bool physical(double tol = 1e-10) const;
};

/// Symmetric beamsplitter U = [[cos(t/2), i sin(t/2)], [i sin(t/2), cos(t/2)]].
/// theta outside [0, pi] is rejected.
struct Beamsplitter {
    double theta;
    explicit Beamsplitter(double theta_rad);
};

/// Relative phase chi applied to the path - amplitude. Unrestricted.
struct PhaseShifter {
    double chi;
    explicit PhaseShifter(double chi_rad) : chi(chi_rad) {}
};

/// Partial absorber on one path with intensity transmission T in [0, 1].
/// Attenuates coherently: amplitude factor sqrt(T), coherence preserved.
struct Absorber {
    double transmission;
    Path path;
    Absorber(double transmission, Path path);
};

/// Total beam block on one path (projector onto the other path).
struct Blocker {
    Path path;
    explicit Blocker(Path p) : path(p) {}
};

/// Contrast-reduction element: scales the coherence by V in [0, 1].
struct Dephaser {
    double visibility;
    explicit Dephaser(double visibility);
};

using Element = std::variant<Beamsplitter, PhaseShifter, Absorber, Blocker, Dephaser>;
using ElementChain = std::vector<Element>;

TwoPathState apply(const TwoPathState& state, const Beamsplitter& bs);
TwoPathState apply(const TwoPathState& state, const PhaseShifter& ps);
TwoPathState apply(const TwoPathState& state, const Absorber& ab);
TwoPathState apply(const TwoPathState& state, const Blocker& bl);
TwoPathState apply(const TwoPathState& state, const Dephaser& dp);
TwoPathState apply(const TwoPathState& state, const Element& element);

/// Left-fold of the element applications in chain order.
TwoPathState propagate(TwoPathState state, const ElementChain& chain);

struct DetectionProbabilities {
    double p_plus;
    double p_minus;
};

/// (rho_{++}, rho_{--}); the sum is the survival probability and the
/// deficit 1 - sum is the absorbed fraction.
DetectionProbabilities detection_probabilities(const TwoPathState& state);

/// Mixing angle of the tunable beamsplitter equivalent to a 50:50 plate
/// followed by an absorber of intensity transmission T on path -,
/// conditioned on survival: arccos((1 - T) / (1 + T)).
double effective_theta(double transmission);

}  // namespace lgi
