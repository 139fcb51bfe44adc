#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "labelcov/bernoulli_model.hpp"
#include "labelcov/datagen.hpp"
#include "labelcov/errors.hpp"
#include "labelcov/model_fit.hpp"
#include "labelcov/probit_model.hpp"
#include "labelcov/staged_logit_model.hpp"

namespace labelcov {

inline ModelFit fit_model(ModelId model, const PairDataset& data) {
    switch (model) {
        case ModelId::probit: return fit_probit(data);
        case ModelId::bernoulli: return fit_bernoulli(data);
        case ModelId::staged: return fit_staged(data);
    }
    throw std::invalid_argument("unknown model id");
}

struct ExperimentPlan {
    std::vector<ConfigName> configs;
    std::vector<ModelId> models{ModelId::probit, ModelId::bernoulli, ModelId::staged};
    int replicates = 25;
    std::size_t n_per_state = 500;
    std::uint64_t master_seed = 0;
    double alpha = 0.05;
    unsigned threads = 0;  // 0: hardware concurrency
};

inline void validate(const ExperimentPlan& plan) {
    if (plan.configs.empty()) throw std::invalid_argument("plan has no configurations");
    if (plan.models.empty()) throw std::invalid_argument("plan has no models");
    if (plan.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (plan.n_per_state < 1) throw std::invalid_argument("n_per_state must be >= 1");
    if (!(plan.alpha > 0.0 && plan.alpha < 1.0)) throw std::invalid_argument("alpha outside (0, 1)");
}

// Wald rejection counts for one (configuration, p2 pair, model).
struct PairCell {
    double p2_state0 = 0.0, p2_state1 = 0.0;
    int completed = 0;
    int failures = 0;
    int reject_intercept = 0;
    int reject_slope = 0;

    double prop_intercept() const {
        return completed > 0 ? static_cast<double>(reject_intercept) / completed : 0.0;
    }
    double prop_slope() const {
        return completed > 0 ? static_cast<double>(reject_slope) / completed : 0.0;
    }
};

// Detection proportions of one (configuration, model) across the p2 pairs.
struct ReportRow {
    ConfigName config;
    ModelId model;
    std::vector<PairCell> cells;
    double mean_intercept = 0.0, sd_intercept = 0.0;
    double mean_slope = 0.0, sd_slope = 0.0;
    int failures = 0;
};

struct ExperimentReport {
    ExperimentPlan plan;
    std::vector<ReportRow> rows;  // config-major, model order as in the plan
};

// Replicate datasets are shared across models: each replicate is sampled once
// from its derived seed and every model is fitted to it. Failed fits
// (non-convergence, separation, singular information, degenerate data) are
// excluded from the denominator and counted.
inline std::vector<PairCell> run_cell(ConfigName config, std::size_t pair_index,
                                      const GenParams& params, const std::vector<ModelId>& models,
                                      int replicates, double alpha, std::uint64_t master_seed) {
    std::vector<PairCell> cells(models.size());
    for (PairCell& c : cells) {
        c.p2_state0 = params.gamma0;
        c.p2_state1 = params.gamma0 + params.gamma1;
    }
    for (int rep = 0; rep < replicates; ++rep) {
        const std::uint64_t seed = derive_seed(master_seed, to_string(config), pair_index,
                                               static_cast<std::uint64_t>(rep));
        const PairDataset data = sample(params, seed);
        for (std::size_t m = 0; m < models.size(); ++m) {
            try {
                const ModelFit fit = fit_model(models[m], data);
                if (!fit.fit.converged) {
                    ++cells[m].failures;
                    continue;
                }
                ++cells[m].completed;
                if (wald_test(fit.fit, fit.cov_intercept, alpha).significant) {
                    ++cells[m].reject_intercept;
                }
                if (wald_test(fit.fit, fit.cov_slope, alpha).significant) {
                    ++cells[m].reject_slope;
                }
            } catch (const fit_failure&) {
                ++cells[m].failures;
            } catch (const degenerate_data&) {
                ++cells[m].failures;
            }
        }
    }
    return cells;
}

namespace detail {

struct PairStats {
    double mean_i, sd_i, mean_s, sd_s;
};

// Mean and population standard deviation over the per-pair proportions.
inline PairStats pair_stats(const std::vector<PairCell>& cells) {
    double mi = 0.0, ms = 0.0, qi = 0.0, qs = 0.0;
    const double n = static_cast<double>(cells.size());
    for (const PairCell& c : cells) {
        mi += c.prop_intercept();
        ms += c.prop_slope();
        qi += c.prop_intercept() * c.prop_intercept();
        qs += c.prop_slope() * c.prop_slope();
    }
    mi /= n;
    ms /= n;
    const double vi = std::max(0.0, qi / n - mi * mi);
    const double vs = std::max(0.0, qs / n - ms * ms);
    return PairStats{mi, std::sqrt(vi), ms, std::sqrt(vs)};
}

}  // namespace detail

// Cells (configuration x p2 pair) are independent work units; workers pull
// them from a shared index and write to preassigned slots, so the report is
// identical for any thread count.
inline ExperimentReport run_experiment(const ExperimentPlan& plan) {
    validate(plan);

    struct Task {
        std::size_t config_idx;
        std::size_t pair_idx;
        GenParams params;
    };
    std::vector<Task> tasks;
    std::vector<std::size_t> pairs_per_config(plan.configs.size());
    for (std::size_t c = 0; c < plan.configs.size(); ++c) {
        const ConfigGrid grid = enumerate_configs(plan.configs[c], plan.n_per_state);
        pairs_per_config[c] = grid.entries.size();
        for (std::size_t p = 0; p < grid.entries.size(); ++p) {
            tasks.push_back(Task{c, p, grid.entries[p]});
        }
    }

    // results[task][model]
    std::vector<std::vector<PairCell>> results(tasks.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            results[t] = run_cell(plan.configs[tasks[t].config_idx], tasks[t].pair_idx,
                                  tasks[t].params, plan.models, plan.replicates, plan.alpha,
                                  plan.master_seed);
        }
    };
    unsigned n_threads = plan.threads != 0 ? plan.threads : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, tasks.size()));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    ExperimentReport report;
    report.plan = plan;
    std::size_t task_base = 0;
    for (std::size_t c = 0; c < plan.configs.size(); ++c) {
        for (std::size_t m = 0; m < plan.models.size(); ++m) {
            ReportRow row;
            row.config = plan.configs[c];
            row.model = plan.models[m];
            for (std::size_t p = 0; p < pairs_per_config[c]; ++p) {
                const PairCell& cell = results[task_base + p][m];
                row.cells.push_back(cell);
                row.failures += cell.failures;
            }
            const detail::PairStats stats = detail::pair_stats(row.cells);
            row.mean_intercept = stats.mean_i;
            row.sd_intercept = stats.sd_i;
            row.mean_slope = stats.mean_s;
            row.sd_slope = stats.sd_s;
            report.rows.push_back(std::move(row));
        }
        task_base += pairs_per_config[c];
    }
    return report;
}

enum class ReportFormat { table, csv, json };

inline ReportFormat parse_format(std::string_view name) {
    if (name == "table") return ReportFormat::table;
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

namespace detail {

inline std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string_view config_family(ConfigName c) {
    switch (c) {
        case ConfigName::Zero: return "no covariance";
        case ConfigName::Const1:
        case ConfigName::Const4:
        case ConfigName::Const9: return "constant covariance";
        case ConfigName::Dep41:
        case ConfigName::Dep49:
        case ConfigName::Dep19: return "changing covariance, nonzero base";
        default: return "changing covariance, zero base";
    }
}

inline const ReportRow& find_row(const ExperimentReport& r, ConfigName c, ModelId m) {
    for (const ReportRow& row : r.rows) {
        if (row.config == c && row.model == m) return row;
    }
    throw std::out_of_range("report row not found");
}

inline std::string render_table(const ExperimentReport& r) {
    std::ostringstream os;
    const auto block = [&](const char* title, auto prop, auto sd) {
        os << title << '\n';
        os << "config";
        for (ModelId m : r.plan.models) os << '\t' << to_string(m);
        os << '\n';
        std::string_view family;
        for (ConfigName c : r.plan.configs) {
            if (config_family(c) != family) {
                family = config_family(c);
                os << "-- " << family << '\n';
            }
            os << to_string(c);
            for (ModelId m : r.plan.models) {
                const ReportRow& row = find_row(r, c, m);
                os << '\t' << fmt6(prop(row)) << " (" << fmt6(sd(row)) << ")";
            }
            os << '\n';
        }
    };
    block("detection of the constant covariance coefficient (beta0)",
          [](const ReportRow& x) { return x.mean_intercept; },
          [](const ReportRow& x) { return x.sd_intercept; });
    os << '\n';
    block("detection of the covariate-dependent coefficient (beta1)",
          [](const ReportRow& x) { return x.mean_slope; },
          [](const ReportRow& x) { return x.sd_slope; });
    int failures = 0;
    for (const ReportRow& row : r.rows) failures += row.failures;
    if (failures > 0) {
        os << "\nfailed fits excluded from the proportions: " << failures << '\n';
    }
    return os.str();
}

inline std::string render_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os << "config,model,coefficient,proportion,sd,failures\n";
    for (const ReportRow& row : r.rows) {
        os << to_string(row.config) << ',' << to_string(row.model) << ",beta0,"
           << fmt6(row.mean_intercept) << ',' << fmt6(row.sd_intercept) << ',' << row.failures
           << '\n';
        os << to_string(row.config) << ',' << to_string(row.model) << ",beta1,"
           << fmt6(row.mean_slope) << ',' << fmt6(row.sd_slope) << ',' << row.failures << '\n';
    }
    return os.str();
}

inline nlohmann::json report_json(const ExperimentReport& r) {
    nlohmann::json plan;
    plan["replicates"] = r.plan.replicates;
    plan["n_per_state"] = r.plan.n_per_state;
    plan["master_seed"] = r.plan.master_seed;
    plan["alpha"] = r.plan.alpha;
    for (ConfigName c : r.plan.configs) plan["configs"].push_back(std::string(to_string(c)));
    for (ModelId m : r.plan.models) plan["models"].push_back(std::string(to_string(m)));

    nlohmann::json rows = nlohmann::json::array();
    for (const ReportRow& row : r.rows) {
        nlohmann::json jr;
        jr["config"] = std::string(to_string(row.config));
        jr["model"] = std::string(to_string(row.model));
        jr["beta0"] = {{"proportion", row.mean_intercept}, {"sd", row.sd_intercept}};
        jr["beta1"] = {{"proportion", row.mean_slope}, {"sd", row.sd_slope}};
        jr["failures"] = row.failures;
        nlohmann::json cells = nlohmann::json::array();
        for (const PairCell& c : row.cells) {
            cells.push_back({{"p2_state0", c.p2_state0},
                             {"p2_state1", c.p2_state1},
                             {"completed", c.completed},
                             {"failures", c.failures},
                             {"reject_beta0", c.reject_intercept},
                             {"reject_beta1", c.reject_slope}});
        }
        jr["pairs"] = std::move(cells);
        rows.push_back(std::move(jr));
    }
    return nlohmann::json{{"plan", std::move(plan)}, {"rows", std::move(rows)}};
}

}  // namespace detail

inline std::string render_report(const ExperimentReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::table: return detail::render_table(r);
        case ReportFormat::csv: return detail::render_csv(r);
        case ReportFormat::json: return detail::report_json(r).dump(2) + "\n";
    }
    throw std::invalid_argument("unknown report format");
}

}  // namespace labelcov
