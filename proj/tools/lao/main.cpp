#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lao/errors.hpp"
#include "lao/harness/commands.hpp"
#include "lao/harness/config.hpp"
#include "lao/harness/trace_io.hpp"
#include "lao/harness/verify.hpp"

using namespace lao;
using namespace lao::harness;

namespace {

struct Flags {
    std::string config;
    std::string algo;
    int k = 1;
    double bound = 1.0;
    std::string eta;
    double delta = 0.0;
    double epsilon = 0.1;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::string data;
    std::string labels;
    std::string format;
    std::string task;
    std::uint64_t budget = 0;
    std::string out;
    std::string generator;
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t sparsity = 0;
    double noise = 0.0;
    std::string geometry;
    double lb_epsilon = 0.0;
    std::uint64_t data_seed = 0;
    double train_fraction = 0.0;
    std::string eta_grid;
    std::string bound_grid;
    std::size_t folds = 0;
    std::size_t checkpoints = 0;
    std::string plot;
    std::size_t trace_every = 0;
    std::size_t planned = 0;
    std::string suite = "all";
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool given(const CLI::App& app, const char* name) { return app.count(name) > 0; }

/// defaults < config file < flags given on the command line.
ExperimentConfig resolve(const CLI::App& app, const Flags& f) {
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (given(app, "--algo")) {
        c.algorithms.clear();
        for (const auto& name : split_list(f.algo)) {
            auto a = parse_algorithm(name);
            if (!a) throw ConfigError("unknown algorithm '" + name + "' (expected aerr, aelr, aesvr, ogd or eg)");
            c.algorithms.push_back({*a, {}, {}, {}});
        }
        if (c.algorithms.empty()) throw ConfigError("--algo needs at least one algorithm");
    }
    if (given(app, "--k")) c.k = f.k;
    if (given(app, "--B")) c.bound = f.bound;
    if (given(app, "--eta")) c.eta = parse_eta(f.eta);
    if (given(app, "--delta")) c.delta = f.delta;
    if (given(app, "--epsilon")) c.epsilon = f.epsilon;
    if (given(app, "--seed")) c.seed = f.seed;
    if (given(app, "--trials")) c.trials = f.trials;
    if (given(app, "--budget")) c.attribute_budget = f.budget;
    if (given(app, "--out")) c.trace_out = f.out;
    if (given(app, "--planned")) c.planned_examples = f.planned;
    if (given(app, "--trace-every")) c.trace_every = f.trace_every;
    if (given(app, "--data")) {
        c.data.path = f.data;
        c.data.source = given(app, "--labels") ? "idx" : "csv";
    }
    if (given(app, "--labels")) c.data.labels = f.labels;
    if (given(app, "--format") && given(app, "--data")) c.data.source = f.format;
    if (given(app, "--task")) c.data.task = f.task;
    if (given(app, "--synth")) {
        c.data.source = "synth";
        c.data.generator = f.generator;
    }
    if (given(app, "--d")) c.data.d = f.d;
    if (given(app, "--m")) c.data.m = f.m;
    if (given(app, "--sparsity")) c.data.sparsity = f.sparsity;
    if (given(app, "--noise")) c.data.noise_sd = f.noise;
    if (given(app, "--geometry")) c.data.geometry = f.geometry;
    if (given(app, "--lb-epsilon")) c.data.lb_epsilon = f.lb_epsilon;
    if (given(app, "--data-seed")) c.data.seed = f.data_seed;
    if (given(app, "--train-fraction")) c.data.train_fraction = f.train_fraction;
    if (given(app, "--eta-grid")) {
        c.eta_grid.clear();
        for (const auto& e : split_list(f.eta_grid)) c.eta_grid.push_back(parse_eta(e));
    }
    if (given(app, "--B-grid")) {
        c.bound_grid.clear();
        for (const auto& b : split_list(f.bound_grid)) {
            try {
                c.bound_grid.push_back(std::stod(b));
            } catch (const std::exception&) {
                throw ConfigError("bad --B-grid entry '" + b + "'");
            }
        }
    }
    if (given(app, "--folds")) c.folds = f.folds;
    if (given(app, "--checkpoints")) c.checkpoints = f.checkpoints;
    if (given(app, "--plot")) c.plot_out = f.plot;
    return c;
}

void print_fit(std::size_t trial, const FitResult& r) {
    std::printf("trial %zu: %s examples=%zu attributes=%llu eta=%.6g test_mse=%s%s\n", trial,
                std::string(to_string(r.algorithm)).c_str(), r.examples_used,
                static_cast<unsigned long long>(r.ledger_total), r.eta,
                format_number(r.trace.back().test_error).c_str(), r.budget_exhausted ? " (budget exhausted)" : "");
}

int run_train(const ExperimentConfig& c) {
    const auto res = cmd_train(c);
    for (std::size_t t = 0; t < res.fits.size(); ++t) print_fit(t, res.fits[t]);
    if (c.trace_out.empty()) std::fputs(format_trace_csv(res.fits.front().trace).c_str(), stdout);
    for (const auto& f : res.trace_files) std::printf("wrote %s\n", f.c_str());
    return kExitOk;
}

int run_experiment(const ExperimentConfig& c) {
    const auto res = cmd_experiment(c);
    for (const auto& curve : res.curves) {
        for (std::size_t t = 0; t < curve.final_test_mse.size(); ++t) {
            std::printf("%s trial %zu: examples=%zu attributes=%llu final_test_mse=%s\n", curve.label.c_str(), t,
                        curve.examples_used[t], static_cast<unsigned long long>(curve.attributes_used[t]),
                        format_number(curve.final_test_mse[t]).c_str());
        }
    }
    const std::string out = c.trace_out.empty() ? "experiment.csv" : c.trace_out;
    write_experiment_csv(res, out);
    std::printf("wrote %s\n", out.c_str());
    if (!c.plot_out.empty()) {
        std::ofstream(c.plot_out) << gnuplot_script(res, out);
        std::printf("wrote %s\n", c.plot_out.c_str());
    }
    return kExitOk;
}

int run_cv(const ExperimentConfig& c) {
    const auto res = cmd_cv(c);
    for (std::size_t i = 0; i < res.table.size(); ++i) {
        const auto& r = res.table[i];
        std::printf("%s eta=%s B=%g resolved_eta=%.6g mean_mse=%s\n", i == res.best ? "*" : " ",
                    format_eta(r.eta).c_str(), r.bound, r.resolved_eta, format_number(r.mean_mse).c_str());
    }
    if (!c.trace_out.empty()) {
        write_cv_csv(res, c.trace_out);
        std::printf("wrote %s\n", c.trace_out.c_str());
    }
    return kExitOk;
}

int run_verify(const ExperimentConfig& c, const std::string& suite) {
    std::vector<std::string> suites;
    if (suite == "all") {
        suites.assign(std::begin(kSuites), std::end(kSuites));
    } else {
        suites = split_list(suite);
    }
    bool ok = true;
    for (const auto& s : suites) {
        const auto rep = run_suite(s, c.seed);
        for (const auto& check : rep.checks) {
            std::printf("%s [%s] %s: margin %.3g; %s\n", check.passed ? "PASS" : "FAIL", s.c_str(),
                        check.name.c_str(), check.margin, check.detail.c_str());
        }
        std::printf("%s: %zu checks, %zu failed\n", s.c_str(), rep.checks.size(), rep.failures());
        ok = ok && rep.passed();
    }
    return ok ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lao: attribute-efficient linear regression"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "JSON config file; flags given on the command line take precedence");
    app.add_option("--algo", f.algo, "aerr, aelr, aesvr, ogd or eg; comma-separated for experiment");
    app.add_option("--k", f.k, "attributes sampled per example");
    app.add_option("--B", f.bound, "norm bound of the regressor");
    app.add_option("--eta", f.eta, "step size: auto, <s>*auto or a number");
    app.add_option("--delta", f.delta, "SVR insensitivity width");
    app.add_option("--epsilon", f.epsilon, "SVR smoothing accuracy");
    app.add_option("--seed", f.seed, "base seed; trial t uses seed + t");
    app.add_option("--trials", f.trials, "repetitions");
    app.add_option("--data", f.data, "data file (csv, or idx images)");
    app.add_option("--labels", f.labels, "idx labels file");
    app.add_option("--format", f.format, "idx or csv")->check(CLI::IsMember({"idx", "csv"}));
    app.add_option("--task", f.task, "binary digit task, e.g. 3vs5");
    app.add_option("--budget", f.budget, "global attribute budget");
    app.add_option("--out", f.out, "output file");
    app.add_option("--synth", f.generator, "synthetic data: linear, surrogate or lowerbound");
    app.add_option("--d", f.d, "synthetic dimension");
    app.add_option("--m", f.m, "synthetic instance count");
    app.add_option("--sparsity", f.sparsity, "nonzeros of the planted regressor (linear)");
    app.add_option("--noise", f.noise, "label noise standard deviation (linear)");
    app.add_option("--geometry", f.geometry, "l2 or linf (linear)");
    app.add_option("--lb-epsilon", f.lb_epsilon, "accuracy parameter of the lower-bound instance");
    app.add_option("--data-seed", f.data_seed, "seed of the synthetic generator");
    app.add_option("--train-fraction", f.train_fraction, "share of instances used for training");
    app.add_option("--eta-grid", f.eta_grid, "cv: comma-separated step sizes");
    app.add_option("--B-grid", f.bound_grid, "cv: comma-separated bounds");
    app.add_option("--folds", f.folds, "cv folds");
    app.add_option("--checkpoints", f.checkpoints, "experiment: budget checkpoints");
    app.add_option("--plot", f.plot, "experiment: also write a gnuplot script");
    app.add_option("--trace-every", f.trace_every, "trace row interval in examples");
    app.add_option("--planned", f.planned, "planned example count m (0: all)");

    auto* train = app.add_subcommand("train", "fit one algorithm and write its trace");
    auto* experiment = app.add_subcommand("experiment", "compare algorithms under a shared attribute budget");
    auto* cv = app.add_subcommand("cv", "k-fold cross-validation over eta and B grids");
    auto* verify = app.add_subcommand("verify", "run a property suite");
    verify->add_option("suite", f.suite, "unbiased, variance, genest, clip, mwregret, smoothing, budget or all");
    auto* synth = app.add_subcommand("synth", "write a synthetic data set");
    for (auto* sub : {train, experiment, cv, verify, synth}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        const auto config = resolve(app, f);
        if (*train) return run_train(config);
        if (*experiment) return run_experiment(config);
        if (*cv) return run_cv(config);
        if (*verify) return run_verify(config, f.suite);
        if (*synth) {
            for (const auto& p : cmd_synth(config, given(app, "--format") ? f.format : "csv")) {
                std::printf("wrote %s\n", p.c_str());
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "data format error: %s\n", e.what());
        return kExitFormat;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}
