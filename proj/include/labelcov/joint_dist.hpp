#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "labelcov/errors.hpp"

namespace labelcov {

// Cells within [-cell_tol, 1 + cell_tol] are clamped to [0, 1]; anything
// further out rejects the table.
inline constexpr double cell_tol = 1e-12;
inline constexpr double table_sum_tol = 1e-12;

// Joint distribution of a pair of binary labels over the four states
// (00, 01, 10, 11).
struct JointDist22 {
    double p00, p01, p10, p11;

    JointDist22(double q00, double q01, double q10, double q11)
        : p00(check_cell(q00, "p00")),
          p01(check_cell(q01, "p01")),
          p10(check_cell(q10, "p10")),
          p11(check_cell(q11, "p11")) {
        const double sum = q00 + q01 + q10 + q11;
        if (!(std::abs(sum - 1.0) <= table_sum_tol)) {
            throw infeasible_parameters("joint table cells sum to " + std::to_string(sum) +
                                        ", expected 1");
        }
    }

  private:
    static double check_cell(double p, const char* name) {
        if (!(p >= -cell_tol && p <= 1.0 + cell_tol)) {
            throw infeasible_parameters(std::string("cell ") + name + " = " +
                                        std::to_string(p) + " outside [0, 1]");
        }
        return std::clamp(p, 0.0, 1.0);
    }
};

// Marginal probabilities of each label plus their covariance
// rho = P(Y1=1, Y2=1) - p1 * p2.
struct MarginalsCov {
    double p1, p2, rho;

    MarginalsCov(double p1_, double p2_, double rho_) : p1(p1_), p2(p2_), rho(rho_) {
        if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
            throw infeasible_parameters("marginals (" + std::to_string(p1) + ", " +
                                        std::to_string(p2) + ") outside [0, 1]");
        }
        induced_cells(p1, p2, rho);  // throws if any induced cell is out of range
    }

    // Cell values implied by (p1, p2, rho), in (p00, p01, p10, p11) order.
    static std::array<double, 4> induced_cells(double p1, double p2, double rho) {
        const double p11 = rho + p1 * p2;
        const double p10 = p1 - p11;
        const double p01 = p2 - p11;
        const double p00 = 1.0 - p11 - p01 - p10;
        for (auto [cell, name] : {std::pair{p00, "p00"}, {p01, "p01"}, {p10, "p10"}, {p11, "p11"}}) {
            if (!(cell >= -cell_tol && cell <= 1.0 + cell_tol)) {
                throw infeasible_parameters("infeasible (p1, p2, rho) = (" + std::to_string(p1) +
                                            ", " + std::to_string(p2) + ", " + std::to_string(rho) +
                                            "): induced cell " + name + " = " + std::to_string(cell));
            }
        }
        return {p00, p01, p10, p11};
    }
};

inline JointDist22 from_marginals_cov(const MarginalsCov& m) {
    const auto c = MarginalsCov::induced_cells(m.p1, m.p2, m.rho);
    return JointDist22(c[0], c[1], c[2], c[3]);
}

inline JointDist22 from_marginals_cov(double p1, double p2, double rho) {
    return from_marginals_cov(MarginalsCov(p1, p2, rho));
}

inline MarginalsCov to_marginals_cov(const JointDist22& d) {
    const double p1 = d.p10 + d.p11;
    const double p2 = d.p01 + d.p11;
    return MarginalsCov(p1, p2, d.p11 - p1 * p2);
}

// log(p11 p00 / (p01 p10)); zero exactly when the labels are independent.
inline double log_odds_ratio(const JointDist22& d) {
    for (auto [cell, name] : {std::pair{d.p00, "p00"}, {d.p01, "p01"}, {d.p10, "p10"}, {d.p11, "p11"}}) {
        if (cell <= 0.0) {
            throw degenerate_cell(std::string("log odds ratio undefined: cell ") + name + " is 0");
        }
    }
    return std::log((d.p11 * d.p00) / (d.p01 * d.p10));
}

// Feasible covariance interval for the given marginals.
inline double rho_lower_bound(double p1, double p2) {
    return std::max(-p1 * p2, -(1.0 - p1) * (1.0 - p2));
}

inline double rho_upper_bound(double p1, double p2) {
    return std::min(p1 * (1.0 - p2), p2 * (1.0 - p1));
}

}  // namespace labelcov
