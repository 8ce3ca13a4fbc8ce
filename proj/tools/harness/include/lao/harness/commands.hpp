#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lao/dataset.hpp"
#include "lao/harness/config.hpp"
#include "lao/learners.hpp"

namespace lao::harness {

/// Exit codes of the `lao` executable.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitFormat = 3,
    kExitVerification = 4,
};

/// Raw instances described by the data source, not normalized. A task such as
/// "3vs5" relabels digit 3 as -1 and digit 5 as +1. `bound` scales the planted
/// regressor of the linear generator.
Dataset load_source(const DataSource& source, double bound = 1.0);

/// Train/test split for one trial (split seed = config.seed + trial) of the data
/// normalized for the geometry of `algo` (one global scale for both parts).
std::pair<Dataset, Dataset> trial_split(const Dataset& raw, const ExperimentConfig& config, Algorithm algo,
                                        std::size_t trial);

/// Path of trial t's trace file: `out` itself for a single trial, otherwise
/// "<stem>.trial<t><ext>".
std::string trial_path(const std::string& out, std::size_t trial, std::size_t trials);

// ---------------------------------------------------------------------------

struct TrainResult {
    std::vector<FitResult> fits;  // one per trial
    std::vector<std::string> trace_files;
};

/// Fits the first algorithm entry once per trial and writes its trace(s).
TrainResult cmd_train(const ExperimentConfig& config);
TrainResult cmd_train(const ExperimentConfig& config, const Dataset& raw);

// ---------------------------------------------------------------------------

struct Curve {
    std::string label;
    std::vector<double> mean_test_mse;            // per checkpoint, averaged over trials
    std::vector<double> final_test_mse;           // per trial, at the end of the run
    std::vector<std::size_t> examples_used;       // per trial
    std::vector<std::uint64_t> attributes_used;   // per trial
    std::vector<double> max_norm_ratio;           // per trial
};

struct ExperimentResult {
    std::vector<double> checkpoints;  // attribute counts 0 .. budget
    std::vector<Curve> curves;        // one per algorithm entry, in config order
};

/// Value of the trace's test error at `attributes`, interpolating linearly
/// between rows and holding the last row beyond the end.
double interpolate_trace(const std::vector<TraceRecord>& trace, double attributes);

/// Runs every algorithm entry under the shared global budget on each trial
/// and averages the curves at aligned checkpoints.
ExperimentResult cmd_experiment(const ExperimentConfig& config);
ExperimentResult cmd_experiment(const ExperimentConfig& config, const Dataset& raw);

void write_experiment_csv(const ExperimentResult& result, const std::string& path);
std::string gnuplot_script(const ExperimentResult& result, const std::string& csv_path);

// ---------------------------------------------------------------------------

struct CvRow {
    StepSize eta = StepSize::automatic();
    double bound = 1.0;
    double resolved_eta = 0.0;        // eta with the full training m
    std::vector<double> fold_mse;
    double mean_mse = 0.0;            // +inf when a fold diverged
};

struct CvResult {
    Algorithm algorithm = Algorithm::Aerr;
    std::vector<CvRow> table;  // grid order: eta major, B minor
    std::size_t best = 0;
};

/// Index of the best row: smallest mean MSE, ties to the smaller resolved eta,
/// then the smaller B, then the earlier row.
std::size_t select_best(const std::vector<CvRow>& table);

/// k-fold cross-validation of the first algorithm entry over eta_grid x
/// bound_grid on trial 0's training split.
CvResult cmd_cv(const ExperimentConfig& config);
CvResult cmd_cv(const ExperimentConfig& config, const Dataset& raw);

void write_cv_csv(const CvResult& result, const std::string& path);

// ---------------------------------------------------------------------------

/// Writes the configured data source to `config.trace_out`: IDX pair
/// (`<out>` images, `<out>.labels`) for pixel data with format idx, else CSV.
std::vector<std::string> cmd_synth(const ExperimentConfig& config, const std::string& format);

} // namespace lao::harness
