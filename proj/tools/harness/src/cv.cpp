#include <cmath>
#include <fstream>
#include <limits>

#include "lao/errors.hpp"
#include "lao/harness/commands.hpp"
#include "lao/harness/trace_io.hpp"

namespace lao::harness {

std::size_t select_best(const std::vector<CvRow>& table) {
    if (table.empty()) throw ConfigError("empty cross-validation grid");
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& a = table[i];
        const auto& b = table[best];
        if (a.mean_mse != b.mean_mse) {
            if (a.mean_mse < b.mean_mse) best = i;
        } else if (a.resolved_eta != b.resolved_eta) {
            if (a.resolved_eta < b.resolved_eta) best = i;
        } else if (a.bound < b.bound) {
            best = i;
        }
    }
    return best;
}

CvResult cmd_cv(const ExperimentConfig& config) {
    return cmd_cv(config, load_source(config.data, config.bound));
}

CvResult cmd_cv(const ExperimentConfig& config, const Dataset& raw) {
    if (config.algorithms.empty()) throw ConfigError("no algorithm given");
    if (config.folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    const auto& entry = config.algorithms.front();
    const std::vector<StepSize> etas = config.eta_grid.empty() ? std::vector{entry.eta.value_or(config.eta)}
                                                               : config.eta_grid;
    const std::vector<double> bounds = config.bound_grid.empty() ? std::vector{entry.bound.value_or(config.bound)}
                                                                 : config.bound_grid;

    const Dataset train = trial_split(raw, config, entry.algorithm, 0).first;
    if (config.folds > train.size()) throw ConfigError("more folds than training instances");
    const FoldPlan plan = kfold(train, config.folds, config.seed);
    std::vector<Dataset> fold_train, fold_valid;
    for (std::size_t f = 0; f < config.folds; ++f) {
        fold_train.push_back(train.subset(plan.training_indices(f)));
        fold_valid.push_back(train.subset(plan.validation_indices(f)));
    }

    CvResult result;
    result.algorithm = entry.algorithm;
    for (const auto& eta : etas) {
        for (double bound : bounds) {
            AlgorithmEntry point = entry;
            point.eta = eta;
            point.bound = bound;
            LearnerConfig lc = learner_config(config, point, 0);
            lc.attribute_budget.reset();
            lc.planned_examples = 0;

            CvRow row;
            row.eta = eta;
            row.bound = bound;
            row.resolved_eta = resolve_eta(entry.algorithm, lc, train.dim(), train.size());
            for (std::size_t f = 0; f < config.folds; ++f) {
                lc.seed = trial_seed(config.seed, f);
                const auto r = fit(entry.algorithm, fold_train[f], lc);
                double mse = mean_squared_error(r.w_bar, fold_valid[f]);
                if (!std::isfinite(mse)) mse = std::numeric_limits<double>::infinity();
                row.fold_mse.push_back(mse);
                row.mean_mse += mse / static_cast<double>(config.folds);
            }
            result.table.push_back(std::move(row));
        }
    }
    result.best = select_best(result.table);
    return result;
}

void write_cv_csv(const CvResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << "eta,B,resolved_eta,mean_mse,selected\n";
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        const auto& r = result.table[i];
        out << format_eta(r.eta) << ',' << format_number(r.bound) << ',' << format_number(r.resolved_eta) << ','
            << format_number(r.mean_mse) << ',' << (i == result.best ? 1 : 0) << '\n';
    }
    if (!out) throw ConfigError("write to " + path + " failed");
}

} // namespace lao::harness
