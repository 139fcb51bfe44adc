#pragma once

#include <cmath>

namespace labelcov {

inline double sigmoid(double eta) {
    if (eta >= 0.0) {
        return 1.0 / (1.0 + std::exp(-eta));
    }
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// log((1 + tau) / (1 - tau)), mapping (-1, 1) onto the real line.
inline double fisher_z(double tau) { return std::log((1.0 + tau) / (1.0 - tau)); }

inline double fisher_z_inv(double z) { return std::tanh(0.5 * z); }

}  // namespace labelcov
