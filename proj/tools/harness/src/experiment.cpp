#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <thread>

#include "lao/errors.hpp"
#include "lao/harness/commands.hpp"
#include "lao/harness/trace_io.hpp"

namespace lao::harness {

namespace {

std::vector<std::string> curve_labels(const std::vector<AlgorithmEntry>& entries) {
    std::map<std::string, int> count;
    for (const auto& e : entries) ++count[std::string(to_string(e.algorithm))];
    std::map<std::string, int> seen;
    std::vector<std::string> out;
    for (const auto& e : entries) {
        const std::string name(to_string(e.algorithm));
        const int n = ++seen[name];
        out.push_back(count[name] > 1 ? name + "_" + std::to_string(n) : name);
    }
    return out;
}

std::vector<FitResult> run_trial(const ExperimentConfig& config, const Dataset& raw, std::size_t trial) {
    std::vector<FitResult> fits;
    for (const auto& entry : config.algorithms) {
        const auto [train, test] = trial_split(raw, config, entry.algorithm, trial);
        fits.push_back(fit(entry.algorithm, train, learner_config(config, entry, trial), &test));
        fits.back().w_bar.clear();
        fits.back().w_bar.shrink_to_fit();
    }
    return fits;
}

} // namespace

double interpolate_trace(const std::vector<TraceRecord>& trace, double attributes) {
    if (trace.empty()) throw InvalidInput("cannot interpolate an empty trace");
    if (attributes <= static_cast<double>(trace.front().cumulative_attributes)) return trace.front().test_error;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double a0 = static_cast<double>(trace[i - 1].cumulative_attributes);
        const double a1 = static_cast<double>(trace[i].cumulative_attributes);
        if (attributes <= a1) {
            if (a1 == a0) return trace[i].test_error;
            const double s = (attributes - a0) / (a1 - a0);
            return trace[i - 1].test_error + s * (trace[i].test_error - trace[i - 1].test_error);
        }
    }
    return trace.back().test_error;
}

ExperimentResult cmd_experiment(const ExperimentConfig& config) {
    return cmd_experiment(config, load_source(config.data, config.bound));
}

ExperimentResult cmd_experiment(const ExperimentConfig& config, const Dataset& raw) {
    if (config.algorithms.size() < 2) {
        throw ConfigError("experiment compares algorithms: give at least two (e.g. --algo aelr,eg)");
    }
    if (!config.attribute_budget) throw ConfigError("experiment needs a shared attribute budget (--budget)");
    if (config.trials == 0) throw ConfigError("trials must be at least 1");
    if (config.checkpoints == 0) throw ConfigError("checkpoints must be at least 1");

    // Trials run concurrently in batches; results are collected in trial order.
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::vector<FitResult>> per_trial(config.trials);
    for (std::size_t first = 0; first < config.trials; first += workers) {
        const std::size_t last = std::min(config.trials, first + workers);
        std::vector<std::future<std::vector<FitResult>>> jobs;
        for (std::size_t t = first; t < last; ++t) {
            jobs.push_back(std::async(std::launch::async, run_trial, std::cref(config), std::cref(raw), t));
        }
        for (std::size_t t = first; t < last; ++t) per_trial[t] = jobs[t - first].get();
    }

    ExperimentResult result;
    const double budget = static_cast<double>(*config.attribute_budget);
    for (std::size_t c = 0; c <= config.checkpoints; ++c) {
        result.checkpoints.push_back(budget * static_cast<double>(c) / static_cast<double>(config.checkpoints));
    }
    const auto labels = curve_labels(config.algorithms);
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
        Curve curve;
        curve.label = labels[a];
        curve.mean_test_mse.assign(result.checkpoints.size(), 0.0);
        for (std::size_t t = 0; t < config.trials; ++t) {
            const auto& f = per_trial[t][a];
            for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
                curve.mean_test_mse[c] += interpolate_trace(f.trace, result.checkpoints[c]) /
                                          static_cast<double>(config.trials);
            }
            curve.final_test_mse.push_back(f.trace.back().test_error);
            curve.examples_used.push_back(f.examples_used);
            curve.attributes_used.push_back(f.ledger_total);
            curve.max_norm_ratio.push_back(f.max_norm_ratio);
        }
        result.curves.push_back(std::move(curve));
    }
    return result;
}

void write_experiment_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << "attributes";
    for (const auto& c : result.curves) out << ',' << c.label;
    out << '\n';
    for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
        out << format_number(result.checkpoints[i]);
        for (const auto& c : result.curves) out << ',' << format_number(c.mean_test_mse[i]);
        out << '\n';
    }
    if (!out) throw ConfigError("write to " + path + " failed");
}

std::string gnuplot_script(const ExperimentResult& result, const std::string& csv_path) {
    std::string s = "set datafile separator ','\n"
                    "set key autotitle columnhead\n"
                    "set xlabel 'attributes seen'\n"
                    "set ylabel 'test MSE'\n"
                    "set logscale y\n";
    s += "plot for [i=2:" + std::to_string(result.curves.size() + 1) + "] '" + csv_path +
         "' using 1:i with lines lw 2\n";
    return s;
}

} // namespace lao::harness
