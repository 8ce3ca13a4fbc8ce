#include "lao/errors.hpp"
#include "lao/harness/commands.hpp"
#include "lao/harness/trace_io.hpp"

namespace lao::harness {

TrainResult cmd_train(const ExperimentConfig& config) {
    return cmd_train(config, load_source(config.data, config.bound));
}

TrainResult cmd_train(const ExperimentConfig& config, const Dataset& raw) {
    if (config.algorithms.empty()) throw ConfigError("no algorithm given");
    if (config.trials == 0) throw ConfigError("trials must be at least 1");
    const auto& entry = config.algorithms.front();

    TrainResult result;
    for (std::size_t t = 0; t < config.trials; ++t) {
        const auto [train, test] = trial_split(raw, config, entry.algorithm, t);
        result.fits.push_back(fit(entry.algorithm, train, learner_config(config, entry, t), &test));
        if (!config.trace_out.empty()) {
            result.trace_files.push_back(trial_path(config.trace_out, t, config.trials));
            write_trace_csv(result.fits.back().trace, result.trace_files.back());
        }
    }
    return result;
}

} // namespace lao::harness
