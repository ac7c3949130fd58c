#include "lgi/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lgi {

namespace {

std::size_t param_count(FitModel model) {
    return model == FitModel::cosine ? 3u : 4u;
}

// Solve the symmetric positive-definite system M x = rhs (n <= 4) by
// Gaussian elimination with partial pivoting. Returns false if singular.
bool solve_dense(std::vector<double> m, std::vector<double> rhs,
                 std::span<double> x, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::abs(m[row * n + col]) > std::abs(m[pivot * n + col])) pivot = row;
        }
        if (std::abs(m[pivot * n + col]) < 1e-300) return false;
        if (pivot != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(m[col * n + k], m[pivot * n + k]);
            std::swap(rhs[col], rhs[pivot]);
        }
        for (std::size_t row = col + 1; row < n; ++row) {
            double f = m[row * n + col] / m[col * n + col];
            for (std::size_t k = col; k < n; ++k) m[row * n + k] -= f * m[col * n + k];
            rhs[row] -= f * rhs[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= m[i * n + k] * x[k];
        x[i] = acc / m[i * n + i];
    }
    return true;
}

// Inverse of a symmetric n x n matrix (n <= 4) by solving against unit vectors.
bool invert_dense(const std::vector<double>& m, std::vector<double>& inv, std::size_t n) {
    inv.assign(n * n, 0.0);
    std::vector<double> col(n);
    std::vector<double> e(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        if (!solve_dense(m, e, col, n)) return false;
        for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = col[i];
    }
    return true;
}

double weighted_cost(FitModel model, std::span<const double> params,
                     std::span<const double> x, std::span<const double> y) {
    double cost = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - eval_model(model, params, x[i]);
        cost += r * r / std::max(y[i], 1.0);
    }
    return cost;
}

// Gradient g = J^T W r and normal matrix N = J^T W J at params.
void normal_equations(FitModel model, std::span<const double> params,
                      std::span<const double> x, std::span<const double> y,
                      std::vector<double>& normal, std::vector<double>& grad) {
    std::size_t p = param_count(model);
    normal.assign(p * p, 0.0);
    grad.assign(p, 0.0);
    std::vector<double> jac(p);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double w = 1.0 / std::max(y[i], 1.0);
        double r = y[i] - eval_model(model, params, x[i]);
        model_gradient(model, params, x[i], jac);
        for (std::size_t a = 0; a < p; ++a) {
            grad[a] += w * jac[a] * r;
            for (std::size_t b = a; b < p; ++b) {
                normal[a * p + b] += w * jac[a] * jac[b];
            }
        }
    }
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < a; ++b) normal[a * p + b] = normal[b * p + a];
    }
}

void canonicalize(FitModel model, std::vector<double>& params) {
    if (model == FitModel::cosine) {
        if (params[0] < 0.0) {
            params[0] = -params[0];
            params[1] = -params[1];
        }
        if (params[1] < 0.0) {
            params[1] = -params[1];
            params[2] += std::numbers::pi;
        }
        params[2] = wrap_angle(params[2]);
    } else {
        params[2] = std::abs(params[2]);
    }
}

FitResult run_fit(FitModel model, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("x/y size mismatch");
    std::size_t p = param_count(model);
    if (x.size() < 5) throw std::invalid_argument("too few points to fit (need >= 5)");

    FitResult result;
    result.model = model;
    result.parameters = initial_guess(model, x, y);

    std::vector<double> normal, grad, damped, step(p), trial(p);
    double cost = weighted_cost(model, result.parameters, x, y);
    double damping = 1e-3;
    bool stalled = false;

    int iter = 0;
    for (; iter < 200 && !stalled; ++iter) {
        normal_equations(model, result.parameters, x, y, normal, grad);
        bool accepted = false;
        while (!accepted) {
            damped = normal;
            for (std::size_t a = 0; a < p; ++a) {
                damped[a * p + a] *= 1.0 + damping;
                if (damped[a * p + a] == 0.0) damped[a * p + a] = damping;
            }
            if (!solve_dense(damped, grad, step, p)) {
                stalled = true;
                break;
            }
            for (std::size_t a = 0; a < p; ++a) trial[a] = result.parameters[a] + step[a];
            double trial_cost = weighted_cost(model, trial, x, y);
            if (trial_cost <= cost) {
                double rel = (cost - trial_cost) / std::max(cost, 1e-30);
                std::copy(trial.begin(), trial.end(), result.parameters.begin());
                cost = trial_cost;
                damping = std::max(damping / 10.0, 1e-12);
                accepted = true;
                if (rel < 1e-10) stalled = true;
            } else {
                damping *= 10.0;
                if (damping > 1e12) {
                    stalled = true;
                    break;
                }
            }
        }
    }
    result.iterations = iter;

    canonicalize(model, result.parameters);
    normal_equations(model, result.parameters, x, y, normal, grad);
    cost = weighted_cost(model, result.parameters, x, y);
    result.cost = cost;
    result.reduced_chi_square = cost / static_cast<double>(x.size() - p);

    // Scale-invariant gradient norm: |g_a| * sqrt(N_aa^-1-ish) against cost scale.
    double gnorm = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
        double scale = std::sqrt(std::max(normal[a * p + a], 1e-300));
        gnorm += (grad[a] / scale) * (grad[a] / scale);
    }
    result.gradient_norm = std::sqrt(gnorm);
    result.converged = result.gradient_norm < 1e-6 * std::max(1.0, std::sqrt(cost));

    std::vector<double> inv;
    if (invert_dense(normal, inv, p)) {
        double scale = std::max(result.reduced_chi_square, 0.0);
        result.covariance.resize(p * p);
        result.parameter_sigmas.resize(p);
        for (std::size_t a = 0; a < p * p; ++a) result.covariance[a] = inv[a] * scale;
        for (std::size_t a = 0; a < p; ++a) {
            result.parameter_sigmas[a] = std::sqrt(std::max(result.covariance[a * p + a], 0.0));
        }
    } else {
        result.covariance.assign(p * p, 0.0);
        result.parameter_sigmas.assign(p, 0.0);
        result.converged = false;
        result.warnings.push_back("singular normal matrix; covariance unavailable");
    }

    if (model == FitModel::cosine) {
        if (result.parameters[1] < 2.0 * result.parameter_sigmas[1]) {
            result.warnings.push_back("fringe visibility consistent with zero; phase origin poorly determined");
        }
    } else {
        double spacing = x.size() > 1 ? std::abs(x[1] - x[0]) : 0.0;
        for (std::size_t i = 2; i < x.size(); ++i) {
            spacing = std::min(spacing, std::abs(x[i] - x[i - 1]));
        }
        if (result.parameters[2] < spacing) {
            result.warnings.push_back("fitted width below grid spacing");
        }
    }
    if (!result.converged) {
        result.warnings.push_back("fit did not converge; best parameters returned");
    }
    return result;
}

}  // namespace

double wrap_angle(double angle) {
    double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(angle, two_pi);
    if (wrapped <= -std::numbers::pi) wrapped += two_pi;
    if (wrapped > std::numbers::pi) wrapped -= two_pi;
    return wrapped;
}

double eval_model(FitModel model, std::span<const double> params, double x) {
    if (model == FitModel::cosine) {
        return params[0] * (1.0 + params[1] * std::cos(x - params[2]));
    }
    double dx = x - params[1];
    double w2 = params[2] * params[2];
    return params[0] * std::exp(-0.5 * dx * dx / w2) + params[3];
}

void model_gradient(FitModel model, std::span<const double> params, double x,
                    std::span<double> out) {
    if (model == FitModel::cosine) {
        double c = std::cos(x - params[2]);
        double s = std::sin(x - params[2]);
        out[0] = 1.0 + params[1] * c;
        out[1] = params[0] * c;
        out[2] = params[0] * params[1] * s;
        return;
    }
    double dx = x - params[1];
    double w = params[2];
    double g = std::exp(-0.5 * dx * dx / (w * w));
    out[0] = g;
    out[1] = params[0] * g * dx / (w * w);
    out[2] = params[0] * g * dx * dx / (w * w * w);
    out[3] = 1.0;
}

std::vector<double> initial_guess(FitModel model, std::span<const double> x,
                                  std::span<const double> y) {
    if (x.empty() || x.size() != y.size()) {
        throw std::invalid_argument("initial_guess needs matching non-empty data");
    }
    double ymin = y[0], ymax = y[0];
    std::size_t argmax = 0;
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        mean += y[i];
        if (y[i] > ymax) {
            ymax = y[i];
            argmax = i;
        }
        ymin = std::min(ymin, y[i]);
    }
    mean /= static_cast<double>(y.size());

    if (model == FitModel::cosine) {
        double vis = (ymax + ymin) > 0.0 ? (ymax - ymin) / (ymax + ymin) : 0.0;
        return {mean, vis, wrap_angle(x[argmax])};
    }

    double height = ymax - ymin;
    double half = ymin + 0.5 * height;
    // Half width at half maximum around the peak.
    double hwhm = 0.0;
    for (std::size_t i = argmax; i < x.size(); ++i) {
        if (y[i] <= half) {
            hwhm = std::abs(x[i] - x[argmax]);
            break;
        }
    }
    if (hwhm == 0.0) {
        for (std::size_t i = argmax + 1; i-- > 0;) {
            if (y[i] <= half) {
                hwhm = std::abs(x[argmax] - x[i]);
                break;
            }
        }
    }
    if (hwhm == 0.0) {
        hwhm = 0.25 * std::abs(x.back() - x.front());
    }
    double width = hwhm / std::sqrt(2.0 * std::numbers::ln2);
    if (width <= 0.0) width = 1.0;
    return {height, x[argmax], width, ymin};
}

FitResult fit_cosine(std::span<const double> chi, std::span<const double> counts) {
    // Require coverage of at least half a period.
    if (chi.size() >= 2) {
        auto [lo, hi] = std::minmax_element(chi.begin(), chi.end());
        if (*hi - *lo < std::numbers::pi) {
            throw std::invalid_argument("cosine fit needs at least half a period of coverage");
        }
    }
    return run_fit(FitModel::cosine, chi, counts);
}

FitResult fit_gaussian(std::span<const double> x, std::span<const double> counts) {
    return run_fit(FitModel::gaussian, x, counts);
}

}  // namespace lgi
