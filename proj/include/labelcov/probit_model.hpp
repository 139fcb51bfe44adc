#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "labelcov/dataset.hpp"
#include "labelcov/errors.hpp"
#include "labelcov/gaussian.hpp"
#include "labelcov/joint_dist.hpp"
#include "labelcov/links.hpp"
#include "labelcov/mle.hpp"
#include "labelcov/model_fit.hpp"

namespace labelcov {

// Latent bivariate normal with linear means and Fisher-z-linked correlation:
//   mu1(x) = gamma0 + gamma1 x,  mu2(x) = delta0 + delta1 x,
//   log((1 + tau)/(1 - tau)) = beta0 + beta1 x.
struct ProbitParams {
    double gamma0 = 0.0, gamma1 = 0.0;
    double delta0 = 0.0, delta1 = 0.0;
    double beta0 = 0.0, beta1 = 0.0;
};

inline double probit_tau(const ProbitParams& p, int x) {
    // tanh saturates to exactly +-1 for |z| >~ 38; keep tau inside the open
    // interval so wild line-search steps stay evaluable.
    constexpr double tau_cap = 1.0 - 1e-12;
    return std::clamp(fisher_z_inv(p.beta0 + p.beta1 * x), -tau_cap, tau_cap);
}

inline JointDist22 probit_cell_probs(const ProbitParams& p, int x) {
    return copula_cell_probs(CopulaParams(p.gamma0 + p.gamma1 * x, p.delta0 + p.delta1 * x,
                                          probit_tau(p, x)));
}

namespace detail {

inline ProbitParams probit_params_from(const std::vector<double>& v) {
    return ProbitParams{v[0], v[1], v[2], v[3], v[4], v[5]};
}

// Floor before log so an underflowing cell cannot produce -inf mid-search.
inline constexpr double cell_floor = 1e-300;

inline double cell_nll(const JointDist22& t, const StateCounts& c) {
    double nll = 0.0;
    const double cells[4] = {t.p00, t.p01, t.p10, t.p11};
    for (int i = 0; i < 4; ++i) {
        if (c.cell[i] > 0) {
            nll -= static_cast<double>(c.cell[i]) * std::log(std::max(cells[i], cell_floor));
        }
    }
    return nll;
}

}  // namespace detail

inline double probit_nll(const ProbitParams& p, const std::array<StateCounts, 2>& counts) {
    return detail::cell_nll(probit_cell_probs(p, 0), counts[0]) +
           detail::cell_nll(probit_cell_probs(p, 1), counts[1]);
}

inline double probit_nll(const ProbitParams& p, const PairDataset& data) {
    return probit_nll(p, count_by_state(data));
}

// Joint 6-parameter MLE over (gamma0, gamma1, delta0, delta1, beta0, beta1).
inline ModelFit fit_probit(const PairDataset& data) {
    const auto counts = count_by_state(data);
    detail::require_both_classes(counts);
    StateCounts pooled = counts[0];
    pooled += counts[1];

    const double inv_n = 1.0 / static_cast<double>(pooled.n());
    const Objective scaled = [&](const std::vector<double>& v) {
        return inv_n * probit_nll(detail::probit_params_from(v), counts);
    };
    const Objective full = [&](const std::vector<double>& v) {
        return probit_nll(detail::probit_params_from(v), counts);
    };

    std::vector<double> start = {std_normal_quantile(detail::clamp_prob(pooled.p1())), 0.0,
                                 std_normal_quantile(detail::clamp_prob(pooled.p2())), 0.0,
                                 0.0, 0.0};
    const MinimizeResult opt = minimize(scaled, std::move(start));
    const std::vector<double> se = observed_information_se(full, opt.argmin);

    ModelFit out;
    out.model = ModelId::probit;
    out.coeff_names = {"gamma0", "gamma1", "delta0", "delta1", "beta0", "beta1"};
    out.fit = make_fit_result(opt.argmin, se, -opt.value / inv_n, opt.converged, opt.iterations);
    return out;
}

}  // namespace labelcov
