#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "labelcov/errors.hpp"

namespace labelcov {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizeResult {
    std::vector<double> argmin;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

inline std::vector<double> central_gradient(const Objective& f, const std::vector<double>& at,
                                            double rel_step = 1e-6) {
    const std::size_t n = at.size();
    std::vector<double> g(n);
    std::vector<double> v = at;
    for (std::size_t k = 0; k < n; ++k) {
        const double h = rel_step * (1.0 + std::abs(at[k]));
        v[k] = at[k] + h;
        const double fp = f(v);
        v[k] = at[k] - h;
        const double fm = f(v);
        v[k] = at[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Row-major n x n central-difference Hessian.
inline std::vector<double> numerical_hessian(const Objective& f, const std::vector<double>& at,
                                             double rel_step = 1e-4) {
    const std::size_t n = at.size();
    std::vector<double> hess(n * n, 0.0);
    std::vector<double> step(n);
    for (std::size_t k = 0; k < n; ++k) step[k] = rel_step * (1.0 + std::abs(at[k]));

    const double f0 = f(at);
    std::vector<double> v = at;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = at[i] + step[i];
        const double fp = f(v);
        v[i] = at[i] - step[i];
        const double fm = f(v);
        v[i] = at[i];
        hess[i * n + i] = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            v[i] = at[i] + step[i];
            v[j] = at[j] + step[j];
            const double fpp = f(v);
            v[j] = at[j] - step[j];
            const double fpm = f(v);
            v[i] = at[i] - step[i];
            const double fmm = f(v);
            v[j] = at[j] + step[j];
            const double fmp = f(v);
            v[i] = at[i];
            v[j] = at[j];
            hess[i * n + j] = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
        }
    }
    return hess;
}

namespace detail {

// In-place lower Cholesky; false when the matrix is not positive definite.
// Pivots are judged against the diagonal scale so that exactly singular
// matrices do not slip through on rounding noise.
inline bool cholesky(std::vector<double>& a, std::size_t n) {
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[j * n + j]));
    const double pivot_min = scale * 1e-10;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > pivot_min) || !std::isfinite(d)) return false;
        const double l = std::sqrt(d);
        a[j * n + j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / l;
        }
    }
    return true;
}

// Solve L L^T x = e_col given the Cholesky factor.
inline std::vector<double> cholesky_solve_unit(const std::vector<double>& l, std::size_t n,
                                               std::size_t col) {
    std::vector<double> x(n, 0.0);
    x[col] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * x[k];
        x[i] = s / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * x[k];
        x[i] = s / l[i * n + i];
    }
    return x;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

// Quasi-Newton (BFGS) with backtracking line search and central-difference
// gradients. Deterministic: identical inputs give identical outputs.
inline MinimizeResult minimize(const Objective& f, std::vector<double> start,
                               int max_iterations = 500, double gradient_tol = 1e-6) {
    const std::size_t n = start.size();
    MinimizeResult res;
    res.argmin = std::move(start);

    double fx = f(res.argmin);
    if (!std::isfinite(fx)) {
        throw non_finite_objective("objective not finite at the start point");
    }
    std::vector<double> g = central_gradient(f, res.argmin);

    // Inverse Hessian approximation, reset to identity on bad curvature.
    std::vector<double> hinv(n * n, 0.0);
    const auto reset_hinv = [&] {
        std::fill(hinv.begin(), hinv.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;
    };
    reset_hinv();

    std::vector<double> dir(n), trial(n), g_new(n), s(n), y(n);
    constexpr double armijo_c1 = 1e-4;

    for (int iter = 0; iter < max_iterations; ++iter) {
        if (detail::norm2(g) <= gradient_tol) {
            res.value = fx;
            res.converged = true;
            res.iterations = iter;
            return res;
        }

        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < n; ++j) d -= hinv[i * n + j] * g[j];
            dir[i] = d;
        }
        double slope = detail::dot(g, dir);
        if (!(slope < 0.0)) {
            reset_hinv();
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = detail::dot(g, dir);
        }

        double alpha = 1.0;
        double f_trial = fx;
        bool accepted = false;
        bool any_finite = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = res.argmin[i] + alpha * dir[i];
            f_trial = f(trial);
            if (std::isfinite(f_trial)) {
                any_finite = true;
                if (f_trial <= fx + armijo_c1 * alpha * slope) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!any_finite) {
                throw non_finite_objective("objective not finite along the search direction");
            }
            // No further progress possible at this scale.
            res.value = fx;
            res.converged = detail::norm2(g) <= gradient_tol;
            res.iterations = iter;
            return res;
        }

        for (std::size_t i = 0; i < n; ++i) s[i] = trial[i] - res.argmin[i];
        res.argmin = trial;
        fx = f_trial;
        g_new = central_gradient(f, res.argmin);
        for (std::size_t i = 0; i < n; ++i) y[i] = g_new[i] - g[i];
        g = g_new;

        const double ys = detail::dot(y, s);
        if (ys > 1e-12 * detail::norm2(y) * detail::norm2(s)) {
            // hinv <- (I - r s y^T) hinv (I - r y s^T) + r s s^T
            const double r = 1.0 / ys;
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += hinv[i * n + j] * y[j];
                hy[i] = acc;
            }
            const double yhy = detail::dot(y, hy);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    hinv[i * n + j] += r * r * yhy * s[i] * s[j] + r * s[i] * s[j] -
                                       r * (s[i] * hy[j] + hy[i] * s[j]);
                }
            }
        } else {
            reset_hinv();
        }
    }

    res.value = fx;
    res.converged = false;
    res.iterations = max_iterations;
    return res;
}

// sqrt(diag(H^-1)) with H the central-difference Hessian of nll at `at`.
inline std::vector<double> observed_information_se(const Objective& nll,
                                                   const std::vector<double>& at) {
    const std::size_t n = at.size();
    std::vector<double> hess = numerical_hessian(nll, at);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (hess[i * n + j] + hess[j * n + i]);
            hess[i * n + j] = hess[j * n + i] = m;
        }
    }
    if (!detail::cholesky(hess, n)) {
        throw singular_information("observed information matrix is not positive definite");
    }
    std::vector<double> se(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = detail::cholesky_solve_unit(hess, n, i)[i];
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw singular_information("non-positive variance for coefficient " + std::to_string(i));
        }
        se[i] = std::sqrt(v);
    }
    return se;
}

struct FitResult {
    std::vector<double> coeffs;
    std::vector<double> std_errors;
    std::vector<double> z_scores;
    std::vector<double> p_values;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Two-sided normal p-value: 2 (1 - Phi(|z|)).
inline double wald_p_value(double z) {
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

inline FitResult make_fit_result(std::vector<double> coeffs, std::vector<double> std_errors,
                                 double log_likelihood, bool converged, int iterations) {
    FitResult fit;
    fit.coeffs = std::move(coeffs);
    fit.std_errors = std::move(std_errors);
    fit.z_scores.resize(fit.coeffs.size());
    fit.p_values.resize(fit.coeffs.size());
    for (std::size_t i = 0; i < fit.coeffs.size(); ++i) {
        fit.z_scores[i] = fit.coeffs[i] / fit.std_errors[i];
        fit.p_values[i] = wald_p_value(fit.z_scores[i]);
    }
    fit.log_likelihood = log_likelihood;
    fit.converged = converged;
    fit.iterations = iterations;
    return fit;
}

struct WaldDecision {
    std::size_t coeff_index = 0;
    bool significant = false;
};

// Strict inequality: p exactly at alpha does not reject.
inline WaldDecision wald_test(const FitResult& fit, std::size_t index, double alpha = 0.05) {
    return WaldDecision{index, fit.p_values.at(index) < alpha};
}

}  // namespace labelcov
