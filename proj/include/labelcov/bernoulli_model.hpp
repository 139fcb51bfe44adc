#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "labelcov/dataset.hpp"
#include "labelcov/errors.hpp"
#include "labelcov/joint_dist.hpp"
#include "labelcov/links.hpp"
#include "labelcov/mle.hpp"
#include "labelcov/model_fit.hpp"

namespace labelcov {

// Exponential-family density over the label pair with natural parameters
// f_i, f_j, f_ij, each linear in the covariate:
//   P(y1, y2) = exp(y1 f_i + y2 f_j + y1 y2 f_ij) / Z,
//   Z = 1 + exp(f_i) + exp(f_j) + exp(f_i + f_j + f_ij).
struct BernoulliParams {
    double bi0 = 0.0, bi1 = 0.0;
    double bj0 = 0.0, bj1 = 0.0;
    double bij0 = 0.0, bij1 = 0.0;
};

// Natural parameters of one covariate state.
struct NaturalParams {
    double fi, fj, fij;
};

inline NaturalParams natural_at(const BernoulliParams& p, int x) {
    return NaturalParams{p.bi0 + p.bi1 * x, p.bj0 + p.bj1 * x, p.bij0 + p.bij1 * x};
}

// Log ratios of a strictly positive cell table:
//   f_i = log(p10/p00), f_j = log(p01/p00), f_ij = log(p11 p00 / (p01 p10)).
inline NaturalParams natural_from_cells(const JointDist22& t) {
    for (auto [cell, name] : {std::pair{t.p00, "p00"}, {t.p01, "p01"}, {t.p10, "p10"}, {t.p11, "p11"}}) {
        if (cell <= 0.0) {
            throw degenerate_cell(std::string("natural parameters undefined: cell ") + name +
                                  " is 0");
        }
    }
    return NaturalParams{std::log(t.p10 / t.p00), std::log(t.p01 / t.p00), log_odds_ratio(t)};
}

namespace detail {

// log(1 + e^fi + e^fj + e^(fi+fj+fij)) via log-sum-exp.
inline double bernoulli_log_z(const NaturalParams& f) {
    const double e[4] = {0.0, f.fj, f.fi, f.fi + f.fj + f.fij};
    const double m = std::max(std::max(e[0], e[1]), std::max(e[2], e[3]));
    double s = 0.0;
    for (double v : e) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace detail

inline JointDist22 bernoulli_cell_probs(const BernoulliParams& p, int x) {
    const NaturalParams f = natural_at(p, x);
    const double log_z = detail::bernoulli_log_z(f);
    return JointDist22(std::exp(-log_z), std::exp(f.fj - log_z), std::exp(f.fi - log_z),
                       std::exp(f.fi + f.fj + f.fij - log_z));
}

inline double bernoulli_nll(const BernoulliParams& p, const std::array<StateCounts, 2>& counts) {
    double nll = 0.0;
    for (int x = 0; x < 2; ++x) {
        const StateCounts& c = counts[x];
        if (c.n() == 0) continue;
        const NaturalParams f = natural_at(p, x);
        const double n1 = static_cast<double>(c.cell[2] + c.cell[3]);  // y1 = 1
        const double n2 = static_cast<double>(c.cell[1] + c.cell[3]);  // y2 = 1
        const double n12 = static_cast<double>(c.cell[3]);
        nll += static_cast<double>(c.n()) * detail::bernoulli_log_z(f) - n1 * f.fi - n2 * f.fj -
               n12 * f.fij;
    }
    return nll;
}

inline double bernoulli_nll(const BernoulliParams& p, const PairDataset& data) {
    return bernoulli_nll(p, count_by_state(data));
}

namespace detail {

inline BernoulliParams bernoulli_params_from(const std::vector<double>& v) {
    return BernoulliParams{v[0], v[1], v[2], v[3], v[4], v[5]};
}

}  // namespace detail

inline ModelFit fit_bernoulli(const PairDataset& data) {
    const auto counts = count_by_state(data);
    detail::require_both_classes(counts);
    StateCounts pooled = counts[0];
    pooled += counts[1];

    const double inv_n = 1.0 / static_cast<double>(pooled.n());
    const Objective scaled = [&](const std::vector<double>& v) {
        return inv_n * bernoulli_nll(detail::bernoulli_params_from(v), counts);
    };
    const Objective full = [&](const std::vector<double>& v) {
        return bernoulli_nll(detail::bernoulli_params_from(v), counts);
    };

    std::vector<double> start = {logit(detail::clamp_prob(pooled.p1())), 0.0,
                                 logit(detail::clamp_prob(pooled.p2())), 0.0, 0.0, 0.0};
    const MinimizeResult opt = minimize(scaled, std::move(start));
    const std::vector<double> se = observed_information_se(full, opt.argmin);

    ModelFit out;
    out.model = ModelId::bernoulli;
    out.coeff_names = {"bi0", "bi1", "bj0", "bj1", "bij0", "bij1"};
    out.fit = make_fit_result(opt.argmin, se, -opt.value / inv_n, opt.converged, opt.iterations);
    return out;
}

}  // namespace labelcov
