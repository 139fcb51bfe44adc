#pragma once

#include <stdexcept>
#include <string>

namespace labelcov {

// (p1, p2, rho) triples or cell tables that cannot form a probability distribution.
struct infeasible_parameters : std::domain_error {
    explicit infeasible_parameters(const std::string& what) : std::domain_error(what) {}
};

// A zero cell where a log-ratio is required.
struct degenerate_cell : std::domain_error {
    explicit degenerate_cell(const std::string& what) : std::domain_error(what) {}
};

// No latent correlation in (-1, 1) reaches the requested binary covariance.
struct infeasible_rho : std::domain_error {
    explicit infeasible_rho(const std::string& what) : std::domain_error(what) {}
};

struct unknown_config : std::invalid_argument {
    explicit unknown_config(const std::string& what) : std::invalid_argument(what) {}
};

// A label (or the joint indicator) carries only one class.
struct degenerate_data : std::invalid_argument {
    explicit degenerate_data(const std::string& what) : std::invalid_argument(what) {}
};

struct malformed_csv : std::runtime_error {
    explicit malformed_csv(const std::string& what) : std::runtime_error(what) {}
};

// Base for per-fit failures; the experiment harness counts these per replicate.
struct fit_failure : std::runtime_error {
    explicit fit_failure(const std::string& what) : std::runtime_error(what) {}
};

struct non_finite_objective : fit_failure {
    explicit non_finite_objective(const std::string& what) : fit_failure(what) {}
};

struct singular_information : fit_failure {
    explicit singular_information(const std::string& what) : fit_failure(what) {}
};

struct separation_detected : fit_failure {
    explicit separation_detected(const std::string& what) : fit_failure(what) {}
};

struct degenerate_offset : fit_failure {
    explicit degenerate_offset(const std::string& what) : fit_failure(what) {}
};

}  // namespace labelcov
