#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "labelcov/datagen.hpp"
#include "labelcov/probit_model.hpp"
#include "test_helpers.hpp"

using Catch::Approx;
using namespace labelcov;

namespace {

ProbitParams worked_state0_params() {
    ProbitParams p;
    p.gamma0 = 0.0;
    p.delta0 = std_normal_quantile(0.3);
    p.beta0 = fisher_z(0.6164);
    return p;
}

}  // namespace

TEST_CASE("probit cell probabilities at the worked parameter values") {
    SECTION("p2 = 0.3, tau = 0.6164 gives p11 = 0.24") {
        CHECK(probit_cell_probs(worked_state0_params(), 0).p11 == Approx(0.24).margin(1e-3));
    }
    SECTION("symmetric means, tau = 0.5358 gives p11 = 0.34") {
        ProbitParams p;
        p.beta0 = fisher_z(0.5358);
        CHECK(probit_cell_probs(p, 0).p11 == Approx(0.34).margin(1e-3));
    }
    SECTION("tau = 0 factorises into the marginals") {
        ProbitParams p;
        p.gamma0 = 0.4;
        p.gamma1 = -0.2;
        p.delta0 = -0.8;
        p.delta1 = 0.5;
        for (int x = 0; x < 2; ++x) {
            const double mu1 = p.gamma0 + p.gamma1 * x;
            const double mu2 = p.delta0 + p.delta1 * x;
            CHECK(probit_cell_probs(p, x).p11 ==
                  Approx(std_normal_cdf(mu1) * std_normal_cdf(mu2)).margin(1e-9));
        }
    }
    SECTION("cells stay normalised for extreme coefficients") {
        ProbitParams p;
        p.gamma0 = 1.5;
        p.delta0 = -2.0;
        p.beta0 = 45.0;  // tanh saturates
        p.beta1 = -90.0;
        for (int x = 0; x < 2; ++x) {
            const JointDist22 t = probit_cell_probs(p, x);
            CHECK(t.p00 + t.p01 + t.p10 + t.p11 == Approx(1.0).margin(1e-9));
            for (double cell : {t.p00, t.p01, t.p10, t.p11}) {
                CHECK(cell >= 0.0);
                CHECK(cell <= 1.0);
            }
        }
    }
}

TEST_CASE("probit negative log-likelihood") {
    SECTION("single (1,1) row at x = 0") {
        PairDataset data;
        data.rows.push_back(PairRow{1, 1, 0});
        const ProbitParams p = worked_state0_params();
        const double nll = probit_nll(p, data);
        CHECK(nll == Approx(-std::log(probit_cell_probs(p, 0).p11)).margin(1e-12));
        CHECK(nll == Approx(1.4271).margin(0.01));
    }
    SECTION("matches a naive per-row oracle") {
        const GenParams g = make_params(ConfigName::Dep49, 0.4, 0.6, 25);
        const PairDataset data = sample(g, 31);
        SplitMix64 rng(5150);
        for (int trial = 0; trial < 5; ++trial) {
            ProbitParams p;
            p.gamma0 = rng.next_unit() - 0.5;
            p.gamma1 = rng.next_unit() - 0.5;
            p.delta0 = rng.next_unit() - 0.5;
            p.delta1 = rng.next_unit() - 0.5;
            p.beta0 = 2.0 * rng.next_unit() - 1.0;
            p.beta1 = 2.0 * rng.next_unit() - 1.0;

            double by_row = 0.0;
            for (const PairRow& r : data.rows) {
                const JointDist22 t = probit_cell_probs(p, r.x);
                const double cells[4] = {t.p00, t.p01, t.p10, t.p11};
                by_row -= std::log(cells[2 * r.y1 + r.y2]);
            }
            CHECK(probit_nll(p, data) == Approx(by_row).margin(1e-12 * std::abs(by_row)));
        }
    }
    SECTION("equals n times the table entropy on exactly matching data") {
        ProbitParams p;  // all zeros: independent, all cells 0.25
        const PairDataset data =
            oracle::exact_dataset(probit_cell_probs(p, 0), probit_cell_probs(p, 1), 400);
        CHECK(probit_nll(p, data) == Approx(800.0 * std::log(4.0)).margin(1e-9));
    }
}

TEST_CASE("fit_probit shows the latent correlation moving with p2 under constant rho") {
    // p1 = 0.5 and rho = 0.09 in both states; only p2 moves (0.3 -> 0.5)
    GenParams g;
    g.alpha0 = 0.5;
    g.gamma0 = 0.3;
    g.gamma1 = 0.2;
    g.beta0 = 0.09;
    g.beta1 = 0.0;
    g.n_per_state = 100000;
    const ModelFit fit = fit_probit(sample(g, 271828));
    REQUIRE(fit.fit.converged);
    const double beta0 = fit.fit.coeffs[fit.cov_intercept];
    const double beta1 = fit.fit.coeffs[fit.cov_slope];
    CHECK(beta0 == Approx(fisher_z(0.6164)).margin(0.05));
    CHECK(beta0 + beta1 == Approx(fisher_z(0.5358)).margin(0.05));
    // the covariate coefficient is materially non-zero despite constant rho
    CHECK(std::abs(beta1) > 3.0 * fit.fit.std_errors[fit.cov_slope]);
}

TEST_CASE("fit_probit recovers independence") {
    GenParams g = make_params(ConfigName::Zero, 0.4, 0.6);
    g.n_per_state = 20000;
    const ModelFit fit = fit_probit(sample(g, 1618));
    REQUIRE(fit.fit.converged);
    CHECK(std::abs(fit.fit.coeffs[4]) < 3.0 * fit.fit.std_errors[4]);
    CHECK(std::abs(fit.fit.coeffs[5]) < 3.0 * fit.fit.std_errors[5]);
}

TEST_CASE("fit_probit reproduces the generating tables at scale") {
    GenParams g = make_params(ConfigName::Dep19, 0.3, 0.5);
    g.n_per_state = 1000000;
    const PairDataset data = sample(g, 97);
    const ModelFit fit = fit_probit(data);
    REQUIRE(fit.fit.converged);
    ProbitParams p{fit.fit.coeffs[0], fit.fit.coeffs[1], fit.fit.coeffs[2],
                   fit.fit.coeffs[3], fit.fit.coeffs[4], fit.fit.coeffs[5]};
    for (int x = 0; x < 2; ++x) {
        const JointDist22 fitted = probit_cell_probs(p, x);
        const JointDist22 truth = state_joint(g, x);
        CHECK(fitted.p00 == Approx(truth.p00).margin(0.005));
        CHECK(fitted.p01 == Approx(truth.p01).margin(0.005));
        CHECK(fitted.p10 == Approx(truth.p10).margin(0.005));
        CHECK(fitted.p11 == Approx(truth.p11).margin(0.005));
    }

    SECTION("marginal estimates track the empirical marginals") {
        const auto counts = count_by_state(data);
        for (int x = 0; x < 2; ++x) {
            const double fitted_p1 = std_normal_cdf(p.gamma0 + p.gamma1 * x);
            const double fitted_p2 = std_normal_cdf(p.delta0 + p.delta1 * x);
            const double n = double(counts[x].n());
            const double se1 = std::sqrt(counts[x].p1() * (1.0 - counts[x].p1()) / n);
            const double se2 = std::sqrt(counts[x].p2() * (1.0 - counts[x].p2()) / n);
            CHECK(std::abs(fitted_p1 - counts[x].p1()) < std::max(3.0 * se1, 1e-4));
            CHECK(std::abs(fitted_p2 - counts[x].p2()) < std::max(3.0 * se2, 1e-4));
        }
    }
}

TEST_CASE("fit_probit flags constant covariance on a single replicate") {
    const GenParams g = make_params(ConfigName::Const9, 0.4, 0.6);
    const ModelFit fit = fit_probit(sample(g, 5));
    REQUIRE(fit.fit.converged);
    CHECK(wald_test(fit.fit, fit.cov_intercept).significant);
}

TEST_CASE("fit_probit rejects single-class labels") {
    PairDataset data;
    for (int i = 0; i < 40; ++i) {
        data.rows.push_back(PairRow{1, static_cast<std::uint8_t>(i % 2),
                                    static_cast<std::uint8_t>(i % 2)});
    }
    CHECK_THROWS_AS(fit_probit(data), degenerate_data);
}
