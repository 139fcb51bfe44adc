#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "labelcov/dataset.hpp"
#include "labelcov/errors.hpp"
#include "labelcov/joint_dist.hpp"
#include "labelcov/rng.hpp"

namespace labelcov {

// Linear two-state schedule for the marginals and the covariance:
//   p1(x) = alpha0 + alpha1 x,  p2(x) = gamma0 + gamma1 x,  rho(x) = beta0 + beta1 x.
struct GenParams {
    double alpha0 = 0.5, alpha1 = 0.0;
    double gamma0 = 0.5, gamma1 = 0.0;
    double beta0 = 0.0, beta1 = 0.0;
    std::size_t n_per_state = 500;
};

inline JointDist22 state_joint(const GenParams& g, int x) {
    return from_marginals_cov(g.alpha0 + g.alpha1 * x, g.gamma0 + g.gamma1 * x,
                              g.beta0 + g.beta1 * x);
}

inline void validate(const GenParams& g) {
    state_joint(g, 0);
    state_joint(g, 1);
}

// n_per_state rows with x = 0 drawn i.i.d. from the state-0 table, then the
// same with x = 1. Inverse-CDF over the cells in fixed (00, 01, 10, 11) order
// keeps the output bit-exact across platforms.
inline PairDataset sample(const GenParams& g, std::uint64_t seed) {
    const JointDist22 table[2] = {state_joint(g, 0), state_joint(g, 1)};
    PairDataset data;
    data.seed = seed;
    data.rows.reserve(2 * g.n_per_state);
    SplitMix64 rng(seed);
    for (std::uint8_t x = 0; x < 2; ++x) {
        const JointDist22& t = table[x];
        const double c0 = t.p00;
        const double c1 = c0 + t.p01;
        const double c2 = c1 + t.p10;
        for (std::size_t i = 0; i < g.n_per_state; ++i) {
            const double u = rng.next_unit();
            std::uint8_t y1 = 0, y2 = 0;
            if (u >= c2) {
                y1 = 1, y2 = 1;
            } else if (u >= c1) {
                y1 = 1;
            } else if (u >= c0) {
                y2 = 1;
            }
            data.rows.push_back(PairRow{y1, y2, x});
        }
    }
    return data;
}

enum class ConfigName { Zero, Const1, Const4, Const9, Dep41, Dep49, Dep19, Dep01, Dep04, Dep09 };

inline constexpr std::array<ConfigName, 10> all_configs = {
    ConfigName::Zero,  ConfigName::Const1, ConfigName::Const4, ConfigName::Const9,
    ConfigName::Dep41, ConfigName::Dep49,  ConfigName::Dep19,  ConfigName::Dep01,
    ConfigName::Dep04, ConfigName::Dep09};

inline std::string_view to_string(ConfigName c) {
    switch (c) {
        case ConfigName::Zero: return "Zero";
        case ConfigName::Const1: return "Const1";
        case ConfigName::Const4: return "Const4";
        case ConfigName::Const9: return "Const9";
        case ConfigName::Dep41: return "Dep41";
        case ConfigName::Dep49: return "Dep49";
        case ConfigName::Dep19: return "Dep19";
        case ConfigName::Dep01: return "Dep01";
        case ConfigName::Dep04: return "Dep04";
        case ConfigName::Dep09: return "Dep09";
    }
    return "?";
}

inline ConfigName parse_config(std::string_view name) {
    for (ConfigName c : all_configs) {
        if (to_string(c) == name) return c;
    }
    throw unknown_config("unknown configuration '" + std::string(name) + "'");
}

// Per-state covariance of each named configuration.
struct ConfigRho {
    double state0, state1;
};

inline ConfigRho config_rho(ConfigName c) {
    switch (c) {
        case ConfigName::Zero: return {0.00, 0.00};
        case ConfigName::Const1: return {0.01, 0.01};
        case ConfigName::Const4: return {0.04, 0.04};
        case ConfigName::Const9: return {0.09, 0.09};
        case ConfigName::Dep41: return {0.04, 0.01};
        case ConfigName::Dep49: return {0.04, 0.09};
        case ConfigName::Dep19: return {0.01, 0.09};
        case ConfigName::Dep01: return {0.00, 0.01};
        case ConfigName::Dep04: return {0.00, 0.04};
        case ConfigName::Dep09: return {0.00, 0.09};
    }
    throw unknown_config("unknown configuration id");
}

// Every configuration fixes p1 = 0.5 in both states and sweeps p2 per state.
inline constexpr std::array<double, 5> p2_grid = {0.3, 0.4, 0.5, 0.6, 0.7};

inline GenParams make_params(ConfigName c, double p2_state0, double p2_state1,
                             std::size_t n_per_state = 500) {
    const ConfigRho rho = config_rho(c);
    GenParams g;
    g.alpha0 = 0.5;
    g.alpha1 = 0.0;
    g.gamma0 = p2_state0;
    g.gamma1 = p2_state1 - p2_state0;
    g.beta0 = rho.state0;
    g.beta1 = rho.state1 - rho.state0;
    g.n_per_state = n_per_state;
    validate(g);
    return g;
}

struct ConfigGrid {
    std::vector<GenParams> entries;        // row-major over (p2_state0, p2_state1)
    std::size_t infeasible_excluded = 0;
};

// The 25 (p2_state0, p2_state1) combinations of a named configuration.
inline ConfigGrid enumerate_configs(ConfigName c, std::size_t n_per_state = 500) {
    ConfigGrid grid;
    grid.entries.reserve(p2_grid.size() * p2_grid.size());
    for (double q0 : p2_grid) {
        for (double q1 : p2_grid) {
            try {
                grid.entries.push_back(make_params(c, q0, q1, n_per_state));
            } catch (const infeasible_parameters&) {
                ++grid.infeasible_excluded;
            }
        }
    }
    return grid;
}

}  // namespace labelcov
