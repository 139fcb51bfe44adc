#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "labelcov/errors.hpp"
#include "labelcov/joint_dist.hpp"

namespace labelcov {

inline constexpr double pi = 3.14159265358979323846;

inline double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
}

inline double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Standard normal quantile: Acklam's rational approximation polished by two
// Newton steps against std_normal_cdf, good to well below 1e-10.
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("std_normal_quantile: p = " + std::to_string(p) +
                                " outside (0, 1)");
    }

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    for (int step = 0; step < 2; ++step) {
        const double err = std_normal_cdf(x) - p;
        const double dens = std_normal_pdf(x);
        if (dens > 0.0) x -= err / dens;
    }
    return x;
}

namespace detail {

struct GaussLegendre {
    std::vector<double> node;
    std::vector<double> weight;
};

// Nodes and weights on [-1, 1] via Newton iteration on the Legendre recurrence.
inline GaussLegendre make_gauss_legendre(int n) {
    GaussLegendre gl;
    gl.node.resize(n);
    gl.weight.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            deriv = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / deriv;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.node[i] = -x;
        gl.node[n - 1 - i] = x;
        gl.weight[i] = gl.weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
    return gl;
}

inline const GaussLegendre& gauss_legendre(int n) {
    static const std::map<int, GaussLegendre> tables = [] {
        std::map<int, GaussLegendre> t;
        for (int m : {30, 60, 120, 240}) t.emplace(m, make_gauss_legendre(m));
        return t;
    }();
    return tables.at(n);
}

// Integral of the standard bivariate normal density over the correlation,
// reduced to theta with tau = sin(theta):
//   integral_0^{asin(tau)} exp(-((h-k)^2 + 4 h k sin^2 u) / (8 sin^2 u cos^2 u)) dtheta / (2 pi)
// with u = pi/4 - theta/2; the sin^2 u form avoids cancellation as |tau| -> 1.
inline double bivariate_correction(double h, double k, double tau, int n) {
    const auto& gl = gauss_legendre(n);
    const double theta_max = std::asin(tau);
    const double half = 0.5 * theta_max;
    const double hk_diff2 = (h - k) * (h - k);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double theta = half + half * gl.node[i];
        const double u = 0.25 * pi - 0.5 * theta;
        const double su = std::sin(u), cu = std::cos(u);
        const double s2 = su * su, c2 = cu * cu;
        const double expo = (hk_diff2 + 4.0 * h * k * s2) / (8.0 * s2 * c2);
        sum += gl.weight[i] * std::exp(-expo);
    }
    return half * sum / (2.0 * pi);
}

}  // namespace detail

// P(Z1 <= h, Z2 <= k) for standard bivariate normal with correlation tau.
// Gauss-Legendre over the correlation parameter, nodes doubled until two
// successive estimates agree to 1e-12.
inline double bivariate_normal_lower(double h, double k, double tau) {
    if (!(std::abs(tau) < 1.0)) {
        throw std::domain_error("bivariate_normal: |tau| = " + std::to_string(std::abs(tau)) +
                                " must be < 1");
    }
    if (!std::isfinite(h) || !std::isfinite(k)) {
        throw std::domain_error("bivariate_normal: bounds must be finite");
    }
    const double indep = std_normal_cdf(h) * std_normal_cdf(k);
    if (tau == 0.0) return indep;

    double prev = detail::bivariate_correction(h, k, tau, 30);
    for (int n : {60, 120, 240}) {
        const double cur = detail::bivariate_correction(h, k, tau, n);
        const bool settled = std::abs(cur - prev) < 1e-12;
        prev = cur;
        if (settled) break;
    }
    return std::clamp(indep + prev, 0.0, 1.0);
}

// P(Z1 > h, Z2 > k); equals the lower orthant of (-Z1, -Z2), same correlation.
inline double bivariate_normal_upper(double h, double k, double tau) {
    return bivariate_normal_lower(-h, -k, tau);
}

// Latent bivariate normal with unit variances: means plus correlation.
struct CopulaParams {
    double mu1, mu2, tau;

    CopulaParams(double mu1_, double mu2_, double tau_) : mu1(mu1_), mu2(mu2_), tau(tau_) {
        if (!(std::abs(tau) < 1.0)) {
            throw std::domain_error("CopulaParams: |tau| must be < 1, got " + std::to_string(tau));
        }
        if (!std::isfinite(mu1) || !std::isfinite(mu2)) {
            throw std::domain_error("CopulaParams: means must be finite");
        }
    }
};

// The four quadrant probabilities of the shifted latent normal, normalised to
// remove quadrature drift. Y_i = 1 corresponds to N_i = mu_i + Z_i > 0.
inline JointDist22 copula_cell_probs(const CopulaParams& c) {
    const double p11 = bivariate_normal_upper(-c.mu1, -c.mu2, c.tau);
    const double p10 = bivariate_normal_upper(-c.mu1, c.mu2, -c.tau);
    const double p01 = bivariate_normal_upper(c.mu1, -c.mu2, -c.tau);
    const double p00 = bivariate_normal_upper(c.mu1, c.mu2, c.tau);
    const double z = p00 + p01 + p10 + p11;
    return JointDist22(p00 / z, p01 / z, p10 / z, p11 / z);
}

// Binary covariance induced by marginals (p1, p2) and latent correlation tau.
inline double rho_from_tau(double p1, double p2, double tau) {
    const double h = -std_normal_quantile(p1);
    const double k = -std_normal_quantile(p2);
    return bivariate_normal_upper(h, k, tau) - p1 * p2;
}

// Inverse of rho_from_tau by bisection; rho_from_tau is strictly increasing
// in tau for fixed marginals. The residual tolerance alone cannot terminate
// the search: near the Frechet bounds rho(tau) flattens out, so tau itself is
// pinned as well.
inline double tau_from_rho(double p1, double p2, double rho) {
    MarginalsCov check(p1, p2, rho);  // feasibility of the triple
    (void)check;

    const double h = -std_normal_quantile(p1);
    const double k = -std_normal_quantile(p2);
    const auto residual = [&](double tau) {
        return bivariate_normal_upper(h, k, tau) - p1 * p2 - rho;
    };

    double lo = -1.0 + 1e-9, hi = 1.0 - 1e-9;
    if (residual(lo) > 0.0 || residual(hi) < 0.0) {
        throw infeasible_rho("no tau in (-1, 1) gives rho = " + std::to_string(rho) +
                             " at marginals (" + std::to_string(p1) + ", " + std::to_string(p2) + ")");
    }
    double mid = 0.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        if (std::abs(f_mid) < 1e-12 && hi - lo < 1e-9) break;
        if (f_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

// tau as a function of p2 at fixed (p1, rho); non-constant whenever rho != 0.
inline std::vector<std::pair<double, double>> tau_curve(double p1, double rho,
                                                        const std::vector<double>& p2_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(p2_grid.size());
    for (double p2 : p2_grid) {
        out.emplace_back(p2, tau_from_rho(p1, p2, rho));
    }
    return out;
}

}  // namespace labelcov
