#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lao/core_model.hpp"
#include "lao/learners.hpp"

namespace lao::harness {

/// Parses "auto", "<s>*auto" or a positive number. Throws ConfigError.
StepSize parse_eta(const std::string& text);
std::string format_eta(const StepSize& eta);

/// Where instances come from. File sources need `path` (and `labels` for IDX);
/// synthetic sources are regenerated from `seed`.
struct DataSource {
    std::string source = "synth";      // idx | csv | synth
    std::string path;
    std::string labels;
    std::string task;                  // "" or "<a>vs<b>": digit a -> -1, digit b -> +1 (3vs5 as in the MNIST task)
    std::string generator = "linear";  // linear | surrogate | lowerbound
    std::size_t d = 20;
    std::size_t m = 1000;              // instances to generate
    std::size_t sparsity = 0;          // 0 means d
    double noise_sd = 0.0;
    std::string geometry = "l2";       // l2 | linf (linear generator)
    double lb_epsilon = 0.25;          // support size ceil(1/eps^2) for the lower-bound generator
    std::uint64_t seed = 1;
    double train_fraction = 0.8;

    friend bool operator==(const DataSource&, const DataSource&) = default;
};

/// One algorithm entry; unset fields fall back to the shared values.
struct AlgorithmEntry {
    Algorithm algorithm = Algorithm::Aerr;
    std::optional<int> k;
    std::optional<double> bound;
    std::optional<StepSize> eta;

    friend bool operator==(const AlgorithmEntry&, const AlgorithmEntry&) = default;
};

struct ExperimentConfig {
    std::vector<AlgorithmEntry> algorithms{AlgorithmEntry{}};
    int k = 1;
    double bound = 1.0;
    StepSize eta = StepSize::automatic();
    double delta = 0.0;
    double epsilon = 0.1;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::optional<std::uint64_t> attribute_budget;
    std::size_t planned_examples = 0;
    std::size_t trace_every = 0;
    DataSource data;
    std::string trace_out;

    // cv
    std::vector<StepSize> eta_grid;
    std::vector<double> bound_grid;
    std::size_t folds = 10;

    // experiment
    std::size_t checkpoints = 50;
    std::string plot_out;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Rejects unknown keys at every level and values of the wrong type.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Learner settings for one entry on one trial.
LearnerConfig learner_config(const ExperimentConfig& config, const AlgorithmEntry& entry, std::size_t trial);

} // namespace lao::harness
