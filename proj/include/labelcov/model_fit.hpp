#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "labelcov/dataset.hpp"
#include "labelcov/errors.hpp"
#include "labelcov/mle.hpp"

namespace labelcov {

enum class ModelId { probit, bernoulli, staged };

inline constexpr std::array<ModelId, 3> all_models = {ModelId::probit, ModelId::bernoulli,
                                                      ModelId::staged};

inline std::string_view to_string(ModelId m) {
    switch (m) {
        case ModelId::probit: return "probit";
        case ModelId::bernoulli: return "bernoulli";
        case ModelId::staged: return "staged";
    }
    return "?";
}

inline ModelId parse_model(std::string_view name) {
    for (ModelId m : all_models) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

// One model fitted to one dataset. The covariance coefficients (intercept and
// covariate slope of the model's dependence parameter) sit at fixed indices so
// the experiment harness can run the same Wald tests on every model.
struct ModelFit {
    ModelId model;
    std::vector<std::string> coeff_names;
    FitResult fit;
    std::size_t cov_intercept = 4;
    std::size_t cov_slope = 5;
};

namespace detail {

inline void require_both_classes(const std::array<StateCounts, 2>& counts) {
    StateCounts pooled = counts[0];
    pooled += counts[1];
    if (pooled.n() == 0) throw degenerate_data("dataset is empty");
    if (pooled.p1() <= 0.0 || pooled.p1() >= 1.0) {
        throw degenerate_data("label y1 takes a single value");
    }
    if (pooled.p2() <= 0.0 || pooled.p2() >= 1.0) {
        throw degenerate_data("label y2 takes a single value");
    }
}

// Keeps link-transformed start values finite.
inline double clamp_prob(double p) { return std::clamp(p, 1e-6, 1.0 - 1e-6); }

}  // namespace detail

}  // namespace labelcov
