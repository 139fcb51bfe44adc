#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "labelcov/dataset.hpp"
#include "labelcov/errors.hpp"
#include "labelcov/links.hpp"
#include "labelcov/mle.hpp"
#include "labelcov/model_fit.hpp"

namespace labelcov {

namespace detail {

struct LogisticGroup {
    double x, offset;
    double n, successes;
};

// Rows sharing (x, offset) collapse to one group; the likelihood then costs
// O(#groups) per evaluation regardless of n.
inline std::vector<LogisticGroup> group_logistic(const std::vector<int>& y,
                                                 const std::vector<double>& x,
                                                 const std::vector<double>& offset) {
    std::map<std::pair<double, double>, std::pair<double, double>> acc;
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto& slot = acc[{x[i], offset[i]}];
        slot.first += 1.0;
        slot.second += y[i];
    }
    std::vector<LogisticGroup> groups;
    groups.reserve(acc.size());
    for (const auto& [key, val] : acc) {
        groups.push_back(LogisticGroup{key.first, key.second, val.first, val.second});
    }
    return groups;
}

inline double log1p_exp(double eta) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

inline double logistic_group_nll(const std::vector<LogisticGroup>& groups, double b0, double b1) {
    double nll = 0.0;
    for (const LogisticGroup& g : groups) {
        const double eta = b0 + b1 * g.x + g.offset;
        nll += g.n * log1p_exp(eta) - g.successes * eta;
    }
    return nll;
}

// MLE at infinity: a fitted group probability pinned to 0/1 beyond working
// precision, or runaway coefficients without gradient convergence.
inline void check_separation(const std::vector<LogisticGroup>& groups,
                             const std::vector<double>& coeffs, bool converged) {
    constexpr double prob_eps = 1e-6;
    const double b1 = coeffs.size() > 1 ? coeffs[1] : 0.0;
    for (const LogisticGroup& g : groups) {
        const double p = sigmoid(coeffs[0] + b1 * g.x + g.offset);
        if (p < prob_eps || p > 1.0 - prob_eps) {
            throw separation_detected("fitted probability pinned to " +
                                      std::to_string(p < prob_eps ? 0 : 1) +
                                      " for covariate state x = " + std::to_string(g.x));
        }
    }
    for (double c : coeffs) {
        if (std::abs(c) > 30.0 && !converged) {
            throw separation_detected("coefficient diverged without gradient convergence");
        }
    }
}

}  // namespace detail

// Logistic regression of a binary response on one covariate with a fixed
// per-row offset: logit P(y=1) = b0 + b1 x + offset. When x is constant the
// slope is unidentified and only the intercept is fitted.
inline FitResult fit_logistic(const std::vector<int>& y, const std::vector<double>& x,
                              const std::vector<double>& offset) {
    if (y.size() != x.size() || y.size() != offset.size() || y.empty()) {
        throw std::invalid_argument("fit_logistic: y, x, offset must be non-empty, equal length");
    }
    double mean_y = 0.0;
    for (int v : y) mean_y += v;
    mean_y /= static_cast<double>(y.size());
    if (mean_y <= 0.0 || mean_y >= 1.0) {
        throw degenerate_data("logistic response takes a single value");
    }

    const auto groups = detail::group_logistic(y, x, offset);
    bool x_varies = false;
    for (const auto& g : groups) {
        if (g.x != groups.front().x) x_varies = true;
    }
    const std::size_t n_coef = x_varies ? 2 : 1;

    const double inv_n = 1.0 / static_cast<double>(y.size());
    const Objective scaled = [&](const std::vector<double>& v) {
        return inv_n * detail::logistic_group_nll(groups, v[0], n_coef > 1 ? v[1] : 0.0);
    };
    const Objective full = [&](const std::vector<double>& v) {
        return detail::logistic_group_nll(groups, v[0], n_coef > 1 ? v[1] : 0.0);
    };

    std::vector<double> start(n_coef, 0.0);
    start[0] = logit(detail::clamp_prob(mean_y));
    const MinimizeResult opt = minimize(scaled, std::move(start));
    detail::check_separation(groups, opt.argmin, opt.converged);
    const std::vector<double> se = observed_information_se(full, opt.argmin);
    return make_fit_result(opt.argmin, se, -opt.value / inv_n, opt.converged, opt.iterations);
}

// Sampling variance of logit(p11) - logit(p1 p2) for one covariate state,
// by the delta method on the multinomial cell frequencies. The offset fed to
// stage 2 is estimated from the same rows as the response, and the two are
// strongly positively correlated; treating the offset as fixed overstates
// this variance by a factor of about three near independence and drives the
// stage-2 Wald test far below its nominal level.
inline double staged_residual_variance(const StateCounts& c) {
    const double n = static_cast<double>(c.n());
    const double u = c.p1(), v = c.p2(), w = c.p11();
    const double gu = -(1.0 / u + v / (1.0 - u * v));
    const double gv = -(1.0 / v + u / (1.0 - u * v));
    const double gw = 1.0 / (w * (1.0 - w));
    const double cov_uv = w - u * v;
    const double cov_uw = w * (1.0 - u);
    const double cov_vw = w * (1.0 - v);
    const double quad = gu * gu * u * (1.0 - u) + gv * gv * v * (1.0 - v) +
                        gw * gw * w * (1.0 - w) +
                        2.0 * (gu * gv * cov_uv + gu * gw * cov_uw + gv * gw * cov_vw);
    return quad / n;
}

// Stage-1 marginal fits and stage-2 coefficients, with the per-row offsets
// logit(p_i(x) p_j(x)) frozen after stage 1.
struct StagedParams {
    std::array<double, 2> stage1_i{};  // intercept, slope for label 1
    std::array<double, 2> stage1_j{};
    std::array<double, 2> stage2{};
    std::vector<double> offsets;
};

struct StagedFit {
    ModelFit combined;
    StagedParams params;
    FitResult stage1_i, stage1_j, stage2;
};

// Stage 1: marginal logistic regressions for each label. Stage 2: logistic
// regression of the joint indicator y1*y2 with offset logit(p_i p_j). The
// raw stage-2 fit takes the offsets as fixed; the combined fit's Wald errors
// for beta0/beta1 use staged_residual_variance instead.
inline StagedFit fit_staged_detail(const PairDataset& data) {
    const auto counts = count_by_state(data);
    detail::require_both_classes(counts);

    const std::size_t n = data.rows.size();
    std::vector<int> y1(n), y2(n), y12(n);
    std::vector<double> x(n), zero(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        y1[i] = data.rows[i].y1;
        y2[i] = data.rows[i].y2;
        y12[i] = data.rows[i].y1 * data.rows[i].y2;
        x[i] = data.rows[i].x;
    }
    bool joint_any = false, joint_all = true;
    for (int v : y12) {
        joint_any = joint_any || v == 1;
        joint_all = joint_all && v == 1;
    }
    if (!joint_any || joint_all) {
        throw degenerate_data("joint indicator y1*y2 takes a single value");
    }
    if (counts[0].n() == 0 || counts[1].n() == 0) {
        throw degenerate_data("covariate x takes a single value");
    }

    StagedFit out;
    out.stage1_i = fit_logistic(y1, x, zero);  // two coefficients each: x varies
    out.stage1_j = fit_logistic(y2, x, zero);

    double offset_by_state[2];
    for (int s = 0; s < 2; ++s) {
        const double pi = sigmoid(out.stage1_i.coeffs[0] + out.stage1_i.coeffs[1] * s);
        const double pj = sigmoid(out.stage1_j.coeffs[0] + out.stage1_j.coeffs[1] * s);
        const double base = pi * pj;
        if (!(base > 0.0 && base < 1.0)) {
            throw degenerate_offset("independence baseline p_i p_j = " + std::to_string(base) +
                                    " at x = " + std::to_string(s));
        }
        offset_by_state[s] = logit(std::clamp(base, 1e-12, 1.0 - 1e-12));
    }
    out.params.offsets.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.params.offsets[i] = offset_by_state[data.rows[i].x];

    out.stage2 = fit_logistic(y12, x, out.params.offsets);

    out.params.stage1_i = {out.stage1_i.coeffs[0], out.stage1_i.coeffs[1]};
    out.params.stage1_j = {out.stage1_j.coeffs[0], out.stage1_j.coeffs[1]};
    out.params.stage2 = {out.stage2.coeffs[0], out.stage2.coeffs[1]};

    ModelFit& m = out.combined;
    m.model = ModelId::staged;
    m.coeff_names = {"gamma0", "gamma1", "delta0", "delta1", "beta0", "beta1"};
    std::vector<double> coeffs, ses;
    for (const FitResult* f : {&out.stage1_i, &out.stage1_j, &out.stage2}) {
        for (std::size_t i = 0; i < 2; ++i) {
            coeffs.push_back(f->coeffs[i]);
            ses.push_back(f->std_errors[i]);
        }
    }
    // Wald errors for the covariance coefficients propagate the stage-1
    // plug-in; beta1 spans two independent states, so its variances add.
    const double var0 = staged_residual_variance(counts[0]);
    const double var1 = staged_residual_variance(counts[1]);
    ses[4] = std::sqrt(var0);
    ses[5] = std::sqrt(var0 + var1);
    m.fit = make_fit_result(std::move(coeffs), std::move(ses), out.stage2.log_likelihood,
                            out.stage1_i.converged && out.stage1_j.converged && out.stage2.converged,
                            out.stage1_i.iterations + out.stage1_j.iterations + out.stage2.iterations);
    return out;
}

inline ModelFit fit_staged(const PairDataset& data) {
    return fit_staged_detail(data).combined;
}

}  // namespace labelcov
