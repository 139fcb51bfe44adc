#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "labelcov/links.hpp"
#include "labelcov/mle.hpp"
#include "labelcov/rng.hpp"
#include "test_helpers.hpp"

using Catch::Approx;
using namespace labelcov;

namespace {

// Small grouped logistic NLL used to exercise the generic optimizer.
struct LogisticProblem {
    std::vector<int> y;
    std::vector<double> x;
    std::vector<double> offset;

    double nll(const std::vector<double>& b) const {
        double total = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double eta = b[0] + b[1] * x[i] + offset[i];
            const double log1pe = eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                                            : std::log1p(std::exp(eta));
            total += log1pe - y[i] * eta;
        }
        return total;
    }
};

LogisticProblem make_logistic_problem() {
    LogisticProblem prob;
    SplitMix64 rng(510510);
    for (int i = 0; i < 400; ++i) {
        const double x = i % 2;
        const double p = sigmoid(-0.4 + 0.9 * x);
        prob.y.push_back(rng.next_unit() < p ? 1 : 0);
        prob.x.push_back(x);
        prob.offset.push_back(0.0);
    }
    return prob;
}

}  // namespace

TEST_CASE("minimize finds the quadratic bowl") {
    const Objective f = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double c : v) s += (c - 1.0) * (c - 1.0);
        return s;
    };
    const MinimizeResult res = minimize(f, std::vector<double>(4, 0.0));
    CHECK(res.converged);
    CHECK(res.value == Approx(0.0).margin(1e-10));
    for (double c : res.argmin) CHECK(c == Approx(1.0).margin(1e-5));
}

TEST_CASE("minimize recovers the closed-form Bernoulli MLE") {
    // 7 successes, 3 failures on the logit scale
    const Objective f = [](const std::vector<double>& v) {
        const double theta = v[0];
        const double log1pe = theta > 0.0 ? theta + std::log1p(std::exp(-theta))
                                          : std::log1p(std::exp(theta));
        return 10.0 * log1pe - 7.0 * theta;
    };
    const MinimizeResult res = minimize(f, {0.0});
    CHECK(res.converged);
    CHECK(res.argmin[0] == Approx(logit(0.7)).margin(1e-6));
}

TEST_CASE("minimize matches the IRLS oracle on logistic regression") {
    const LogisticProblem prob = make_logistic_problem();
    const oracle::IrlsFit irls = oracle::irls_logistic(prob.y, prob.x, prob.offset);

    const Objective f = [&](const std::vector<double>& v) { return prob.nll(v); };
    const MinimizeResult res = minimize(f, {0.0, 0.0});
    CHECK(res.converged);
    CHECK(res.argmin[0] == Approx(irls.b0).margin(1e-5));
    CHECK(res.argmin[1] == Approx(irls.b1).margin(1e-5));

    SECTION("observed-information standard errors match IRLS") {
        const auto se = observed_information_se(f, res.argmin);
        CHECK(se[0] == Approx(irls.se0).margin(1e-4));
        CHECK(se[1] == Approx(irls.se1).margin(1e-4));
    }
}

TEST_CASE("minimize is deterministic") {
    const LogisticProblem prob = make_logistic_problem();
    const Objective f = [&](const std::vector<double>& v) { return prob.nll(v); };
    const MinimizeResult a = minimize(f, {0.0, 0.0});
    const MinimizeResult b = minimize(f, {0.0, 0.0});
    REQUIRE(a.argmin.size() == b.argmin.size());
    CHECK(std::memcmp(a.argmin.data(), b.argmin.data(), a.argmin.size() * sizeof(double)) == 0);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("minimize reports an unrecoverable non-finite objective") {
    const Objective f = [](const std::vector<double>& v) {
        return v[0] == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(minimize(f, {0.0}), non_finite_objective);

    const Objective bad_start = [](const std::vector<double>&) {
        return std::numeric_limits<double>::infinity();
    };
    CHECK_THROWS_AS(minimize(bad_start, {0.0}), non_finite_objective);
}

TEST_CASE("observed_information_se closed forms") {
    SECTION("Bernoulli at p = 0.5, n = 100: SE = 0.2 on the logit scale") {
        const Objective f = [](const std::vector<double>& v) {
            const double theta = v[0];
            const double log1pe = theta > 0.0 ? theta + std::log1p(std::exp(-theta))
                                              : std::log1p(std::exp(theta));
            return 100.0 * log1pe - 50.0 * theta;
        };
        const auto se = observed_information_se(f, {0.0});
        CHECK(se[0] == Approx(0.2).margin(1e-3));
    }
    SECTION("identity Hessian gives unit standard errors") {
        const Objective f = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double c : v) s += 0.5 * c * c;
            return s;
        };
        for (double se : observed_information_se(f, {0.3, -0.7, 1.1})) {
            CHECK(se == Approx(1.0).margin(1e-6));
        }
    }
    SECTION("rank-deficient information is rejected") {
        const Objective f = [](const std::vector<double>& v) {
            const double s = v[0] + v[1];
            return s * s;
        };
        CHECK_THROWS_AS(observed_information_se(f, {0.0, 0.0}), singular_information);
    }
}

TEST_CASE("numerical Hessian is symmetric") {
    const LogisticProblem prob = make_logistic_problem();
    const Objective f = [&](const std::vector<double>& v) { return prob.nll(v); };
    const std::vector<double> at = {0.25, -0.5};
    const auto hess = numerical_hessian(f, at);
    const std::size_t n = at.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(std::abs(hess[i * n + j] - hess[j * n + i]) <=
                  1e-6 * (1.0 + std::abs(hess[i * n + j])));
        }
    }
}

TEST_CASE("wald_test decisions") {
    const auto fit_with = [](double coeff, double se) {
        return make_fit_result({coeff}, {se}, 0.0, true, 1);
    };
    SECTION("null coefficient is not significant") {
        const FitResult f = fit_with(0.0, 1.0);
        CHECK(f.p_values[0] == Approx(1.0).margin(1e-12));
        CHECK_FALSE(wald_test(f, 0).significant);
    }
    SECTION("boundary behaviour around p = 0.05 is strict") {
        // z slightly below the 0.975 quantile: p lands just above 0.05
        const FitResult just_below = fit_with(1.9599, 1.0);
        CHECK(just_below.p_values[0] == Approx(0.05).margin(1e-4));
        CHECK(just_below.p_values[0] > 0.05);
        CHECK_FALSE(wald_test(just_below, 0).significant);

        // z = 1.96 sits a hair past the quantile: p = 0.049996 rejects
        const FitResult at_196 = fit_with(1.96, 1.0);
        CHECK(at_196.p_values[0] == Approx(0.0500).margin(1e-4));
        CHECK(wald_test(at_196, 0).significant);

        // exactly at alpha does not reject
        FitResult exact = fit_with(1.0, 1.0);
        exact.p_values[0] = 0.05;
        CHECK_FALSE(wald_test(exact, 0).significant);
    }
    SECTION("z = 3 rejects") {
        const FitResult f = fit_with(3.0, 1.0);
        CHECK(f.p_values[0] == Approx(0.0027).margin(1e-4));
        CHECK(wald_test(f, 0).significant);
    }
    SECTION("index is validated") {
        const FitResult f = fit_with(1.0, 1.0);
        CHECK_THROWS_AS(wald_test(f, 5), std::out_of_range);
    }
}

TEST_CASE("fit results carry z-scores and two-sided p-values") {
    const FitResult f = make_fit_result({2.0, -1.0}, {0.5, 2.0}, -12.5, true, 17);
    CHECK(f.z_scores[0] == Approx(4.0));
    CHECK(f.z_scores[1] == Approx(-0.5));
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(f.p_values[i] >= 0.0);
        CHECK(f.p_values[i] <= 1.0);
        CHECK(f.p_values[i] ==
              Approx(2.0 * (1.0 - oracle::normal_cdf_series(std::abs(f.z_scores[i])))).margin(1e-12));
    }
    CHECK(f.log_likelihood == -12.5);
    CHECK(f.iterations == 17);
}
