// fitting.hpp
// Weighted nonlinear least squares for the two measurement models:
// cosine interferograms N(chi) = A (1 + V cos(chi - chi0)) and Gaussian
// beam profiles N(x) = N0 exp(-(x - x0)^2 / (2 w^2)) + b.
//
// Counts are weighted with 1 / max(N_i, 1) (Poisson). The solver is a
// damped Gauss-Newton iteration with a multiplicative damping schedule
// (x10 on cost increase, /10 on decrease, starting at 1e-3), terminating
// when the relative cost change over an accepted step drops below 1e-10
// or after 200 iterations. The covariance is the inverse of the undamped
// normal matrix at the optimum, scaled by the reduced chi-square.

#pragma once

#include <span>
#include <string>
#include <vector>

namespace lgi {

enum class FitModel { cosine, gaussian };

struct FitResult {
    FitModel model = FitModel::cosine;
    std::vector<double> parameters;        ///< cosine: {A, V, chi0}; gaussian: {N0, x0, w, b}
    std::vector<double> parameter_sigmas;
    std::vector<double> covariance;        ///< row-major p x p
    double cost = 0.0;                     ///< weighted sum of squared residuals
    double reduced_chi_square = 0.0;
    double gradient_norm = 0.0;            ///< scaled gradient at the optimum
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> warnings;

    double parameter(std::size_t i) const { return parameters.at(i); }
    double sigma(std::size_t i) const { return parameter_sigmas.at(i); }

    // cosine accessors
    double amplitude() const { return parameters.at(0); }
    double fringe_visibility() const { return parameters.at(1); }
    double phase_origin() const { return parameters.at(2); }

    // gaussian accessors
    double peak() const { return parameters.at(0); }
    double center() const { return parameters.at(1); }
    double width() const { return parameters.at(2); }
    double background() const { return parameters.at(3); }
};

/// Model value at x for the given parameter vector.
double eval_model(FitModel model, std::span<const double> params, double x);

/// Partial derivatives of the model at x, written to out (size = #params).
void model_gradient(FitModel model, std::span<const double> params, double x,
                    std::span<double> out);

/// Deterministic starting point. Cosine: A = mean, V = (max-min)/(max+min),
/// chi0 at the maximum. Gaussian: N0 = max - min, x0 at the maximum,
/// w from the half width at half maximum, b = min.
std::vector<double> initial_guess(FitModel model, std::span<const double> x,
                                  std::span<const double> y);

FitResult fit_cosine(std::span<const double> chi, std::span<const double> counts);
FitResult fit_gaussian(std::span<const double> x, std::span<const double> counts);

/// Wrap an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace lgi
