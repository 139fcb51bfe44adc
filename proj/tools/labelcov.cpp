// Command-line front end: dataset generation, single-dataset model fits,
// Monte Carlo experiment runs, and the conditional-covariance analyses.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "labelcov/experiment.hpp"
#include "labelcov/gaussian.hpp"
#include "labelcov/links.hpp"

namespace {

using nlohmann::json;

std::uint64_t master_seed_or_env(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    if (const char* env = std::getenv("LABELCOVAR_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file '" + out_path + "'");
    os << text;
}

std::vector<double> parse_pair_or_single(const std::string& text, const char* flag) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        vals.push_back(std::stod(field));
    }
    if (vals.size() == 1) vals.push_back(vals[0]);
    if (vals.size() != 2) {
        throw CLI::ValidationError(std::string(flag) + " expects one value or a 'state0,state1' pair");
    }
    return vals;
}

std::string fmt6(double v) { return labelcov::detail::fmt6(v); }

// ---------------------------------------------------------------------------
// generate

struct GenerateOpts {
    std::string config;
    std::string p1_text, p2_text, rho_text;
    std::size_t n = 500;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_generate(const GenerateOpts& o) {
    labelcov::GenParams params;
    params.n_per_state = o.n;
    json meta;
    if (!o.config.empty()) {
        if (o.p2_text.empty()) {
            throw CLI::ValidationError("--config requires --p2 state0,state1");
        }
        const auto p2 = parse_pair_or_single(o.p2_text, "--p2");
        params = labelcov::make_params(labelcov::parse_config(o.config), p2[0], p2[1], o.n);
        meta["config"] = o.config;
    } else {
        if (o.p1_text.empty() || o.p2_text.empty() || o.rho_text.empty()) {
            throw CLI::ValidationError("either --config or all of --p1/--p2/--rho are required");
        }
        const auto p1 = parse_pair_or_single(o.p1_text, "--p1");
        const auto p2 = parse_pair_or_single(o.p2_text, "--p2");
        const auto rho = parse_pair_or_single(o.rho_text, "--rho");
        params.alpha0 = p1[0];
        params.alpha1 = p1[1] - p1[0];
        params.gamma0 = p2[0];
        params.gamma1 = p2[1] - p2[0];
        params.beta0 = rho[0];
        params.beta1 = rho[1] - rho[0];
        labelcov::validate(params);
        meta["config"] = nullptr;
    }

    const std::uint64_t seed = master_seed_or_env(o.seed);
    const labelcov::PairDataset data = labelcov::sample(params, seed);

    std::ostringstream csv;
    labelcov::write_csv(data, csv);
    write_output(csv.str(), o.out);

    meta["seed"] = seed;
    meta["n_per_state"] = params.n_per_state;
    meta["params"] = {{"alpha0", params.alpha0}, {"alpha1", params.alpha1},
                      {"gamma0", params.gamma0}, {"gamma1", params.gamma1},
                      {"beta0", params.beta0},   {"beta1", params.beta1}};
    if (!o.out.empty()) {
        std::ofstream ms(o.out + ".meta.json", std::ios::binary);
        if (!ms) throw std::runtime_error("cannot open metadata file");
        ms << meta.dump(2) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fit

json fit_to_json(const labelcov::ModelFit& fit) {
    json coeffs = json::array();
    for (std::size_t i = 0; i < fit.fit.coeffs.size(); ++i) {
        coeffs.push_back({{"name", fit.coeff_names[i]},
                          {"estimate", fit.fit.coeffs[i]},
                          {"std_error", fit.fit.std_errors[i]},
                          {"z", fit.fit.z_scores[i]},
                          {"p_value", fit.fit.p_values[i]}});
    }
    return json{{"model", std::string(labelcov::to_string(fit.model))},
                {"coefficients", std::move(coeffs)},
                {"log_likelihood", fit.fit.log_likelihood},
                {"converged", fit.fit.converged},
                {"iterations", fit.fit.iterations}};
}

int cmd_fit(const std::string& model_name, const std::string& data_path, const std::string& out) {
    std::ifstream is(data_path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open dataset '" + data_path + "'");
    const labelcov::PairDataset data = labelcov::read_csv(is);
    const labelcov::ModelFit fit = labelcov::fit_model(labelcov::parse_model(model_name), data);
    write_output(fit_to_json(fit).dump(2) + "\n", out);
    return 0;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentOpts {
    std::vector<std::string> configs;
    std::vector<std::string> models;
    std::optional<int> replicates;
    std::size_t n_per_state = 500;
    std::optional<std::uint64_t> seed;
    std::string format = "table";
    std::string out;
    std::string profile = "desk";
    unsigned threads = 0;
};

int cmd_experiment(const ExperimentOpts& o) {
    labelcov::ExperimentPlan plan;
    if (o.configs.empty()) {
        plan.configs.assign(labelcov::all_configs.begin(), labelcov::all_configs.end());
    } else {
        for (const std::string& c : o.configs) plan.configs.push_back(labelcov::parse_config(c));
    }
    if (!o.models.empty()) {
        plan.models.clear();
        for (const std::string& m : o.models) plan.models.push_back(labelcov::parse_model(m));
    }
    plan.replicates = o.replicates ? *o.replicates : (o.profile == "paper" ? 100 : 25);
    plan.n_per_state = o.n_per_state;
    plan.master_seed = master_seed_or_env(o.seed);
    plan.threads = o.threads;

    const labelcov::ExperimentReport report = labelcov::run_experiment(plan);
    write_output(labelcov::render_report(report, labelcov::parse_format(o.format)), o.out);
    return 0;
}

// ---------------------------------------------------------------------------
// analyze

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.05, hi = 0.95, step = 0.05;
    if (!text.empty()) {
        std::stringstream ss(text);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':')) {
            throw CLI::ValidationError("--grid expects lo:hi:step");
        }
        lo = std::stod(a);
        hi = std::stod(b);
        step = std::stod(c);
        if (step <= 0.0 || lo > hi) throw CLI::ValidationError("--grid expects lo <= hi, step > 0");
    }
    std::vector<double> grid;
    for (double p = lo; p <= hi + 1e-12; p += step) grid.push_back(p);
    return grid;
}

int cmd_tau_curve(double p1, double rho, const std::string& grid_text, const std::string& out) {
    std::ostringstream csv;
    csv << "p2,tau\n";
    std::size_t skipped = 0;
    for (double p2 : parse_grid(grid_text)) {
        try {
            const double tau = labelcov::tau_from_rho(p1, p2, rho);
            csv << fmt6(p2) << ',' << fmt6(tau) << '\n';
        } catch (const std::domain_error& e) {
            ++skipped;
            std::cerr << "warning: p2 = " << fmt6(p2) << " skipped: " << e.what() << '\n';
        }
    }
    write_output(csv.str(), out);
    return 0;
}

// The quantities each model reports for a pair of states that share p1 and
// rho but differ in p2, computed from first principles.
int cmd_worked_examples(const std::string& format, const std::string& out) {
    const double p1 = 0.5, rho = 0.09;
    const double p2_state[2] = {0.3, 0.5};

    json states = json::array();
    for (int s = 0; s < 2; ++s) {
        const labelcov::JointDist22 table = labelcov::from_marginals_cov(p1, p2_state[s], rho);
        const double tau = labelcov::tau_from_rho(p1, p2_state[s], rho);
        const double residual = labelcov::logit(table.p11) - labelcov::logit(p1 * p2_state[s]);
        states.push_back({{"x", s},
                          {"p1", p1},
                          {"p2", p2_state[s]},
                          {"rho", rho},
                          {"cells", {{"p00", table.p00}, {"p01", table.p01},
                                     {"p10", table.p10}, {"p11", table.p11}}},
                          {"log_odds_ratio", labelcov::log_odds_ratio(table)},
                          {"tau", tau},
                          {"staged_residual", residual}});
    }
    const json doc = {{"states", std::move(states)}};

    if (format == "json") {
        write_output(doc.dump(2) + "\n", out);
    } else {
        std::ostringstream os;
        for (const json& st : doc["states"]) {
            os << "state x=" << st["x"].get<int>() << " (p1=" << fmt6(st["p1"].get<double>())
               << ", p2=" << fmt6(st["p2"].get<double>()) << ", rho="
               << fmt6(st["rho"].get<double>()) << "):\n"
               << "  log_odds_ratio  " << fmt6(st["log_odds_ratio"].get<double>()) << '\n'
               << "  tau             " << fmt6(st["tau"].get<double>()) << '\n'
               << "  staged_residual " << fmt6(st["staged_residual"].get<double>()) << '\n';
        }
        write_output(os.str(), out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional covariance measurement for binary label pairs"};
    app.require_subcommand(1);

    GenerateOpts gen;
    CLI::App* generate = app.add_subcommand("generate", "sample a two-state dataset to CSV");
    generate->add_option("--config", gen.config, "named configuration (Zero, Const1, ..., Dep09)");
    generate->add_option("--p1", gen.p1_text, "P(y1=1), single value or state0,state1");
    generate->add_option("--p2", gen.p2_text, "P(y2=1), single value or state0,state1");
    generate->add_option("--rho", gen.rho_text, "covariance, single value or state0,state1");
    generate->add_option("--n", gen.n, "rows per covariate state")->default_val(500);
    generate->add_option("--seed", gen.seed, "RNG seed (default: LABELCOVAR_SEED or 0)");
    generate->add_option("--out", gen.out, "output CSV path (default stdout)");

    std::string fit_model_name, fit_data, fit_out;
    CLI::App* fit = app.add_subcommand("fit", "fit one model to a dataset CSV");
    fit->add_option("--model", fit_model_name, "probit | bernoulli | staged")->required();
    fit->add_option("--data", fit_data, "dataset CSV path")->required();
    fit->add_option("--out", fit_out, "output JSON path (default stdout)");

    ExperimentOpts exp;
    CLI::App* experiment = app.add_subcommand("experiment", "run the detection experiment grid");
    experiment->add_option("--configs", exp.configs, "configurations (default: all)")->delimiter(',');
    experiment->add_option("--models", exp.models, "models (default: all)")->delimiter(',');
    experiment->add_option("--replicates", exp.replicates, "replicates per (config, p2 pair)");
    experiment->add_option("--n-per-state", exp.n_per_state, "rows per covariate state")
        ->default_val(500);
    experiment->add_option("--seed", exp.seed, "master seed (default: LABELCOVAR_SEED or 0)");
    experiment->add_option("--format", exp.format, "table | csv | json")->default_val("table");
    experiment->add_option("--out", exp.out, "output path (default stdout)");
    experiment->add_option("--profile", exp.profile, "desk (25 replicates) | paper (100)")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->default_val("desk");
    experiment->add_option("--threads", exp.threads, "worker threads (default: hardware)");

    CLI::App* analyze = app.add_subcommand("analyze", "conditional-covariance analyses");
    analyze->require_subcommand(1);

    double tc_p1 = 0.5, tc_rho = 0.04;
    std::string tc_grid, tc_out;
    CLI::App* tau_curve = analyze->add_subcommand(
        "tau-curve", "latent correlation vs p2 at fixed (p1, rho), as CSV");
    tau_curve->add_option("--p1", tc_p1, "fixed P(y1=1)")->default_val(0.5);
    tau_curve->add_option("--rho", tc_rho, "fixed covariance")->required();
    tau_curve->add_option("--grid", tc_grid, "p2 grid as lo:hi:step (default 0.05:0.95:0.05)");
    tau_curve->add_option("--out", tc_out, "output path (default stdout)");

    std::string we_format = "table", we_out;
    CLI::App* worked = analyze->add_subcommand(
        "worked-examples", "per-state model quantities under constant rho with moving p2");
    worked->add_option("--format", we_format, "table | json")
        ->check(CLI::IsMember({"table", "json"}))
        ->default_val("table");
    worked->add_option("--out", we_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(gen);
        if (fit->parsed()) return cmd_fit(fit_model_name, fit_data, fit_out);
        if (experiment->parsed()) return cmd_experiment(exp);
        if (analyze->parsed()) {
            if (tau_curve->parsed()) return cmd_tau_curve(tc_p1, tc_rho, tc_grid, tc_out);
            if (worked->parsed()) return cmd_worked_examples(we_format, we_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
