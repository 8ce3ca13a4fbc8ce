#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lao/core_model.hpp"
#include "lao/dataset.hpp"
#include "lao/estimators.hpp"
#include "lao/smoothing.hpp"

namespace lao {

enum class Algorithm {
    Aerr,   // attribute-efficient ridge: OGD on the L2 ball with sampled gradients
    Aelr,   // attribute-efficient lasso: EG on the L1 ball with clipped sampled gradients
    Aesvr,  // attribute-efficient smoothed SVR: AERR with GenEst residual derivatives
    Ogd,    // full-information OGD baseline (d reads per example)
    Eg,     // full-information EG baseline (d reads per example)
};

std::string_view to_string(Algorithm algo) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;
NormKind norm_kind_of(Algorithm algo) noexcept;
bool is_full_information(Algorithm algo) noexcept;

/// One online step, kept when LearnerConfig::record_steps is set.
struct StepRecord {
    std::vector<double> w;  // iterate the gradient was evaluated at
    SparseVector g;         // gradient (estimate) used for the update
};

struct FitResult {
    Algorithm algorithm = Algorithm::Aerr;
    std::vector<double> w_bar;          // (1/m) sum_t w_t over processed examples
    std::vector<TraceRecord> trace;
    std::uint64_t ledger_total = 0;     // training attribute reads
    std::uint64_t evaluation_reads = 0; // test-set reads, kept on a separate ledger
    std::size_t examples_used = 0;
    std::uint64_t fallback_steps = 0;   // steps where w_t = 0 and the residual cost no read
    double eta = 0.0;
    double max_norm_ratio = 0.0;        // max_t ||w_t|| / B over every iterate
    bool budget_exhausted = false;
    std::vector<StepRecord> steps;
};

/// sqrt(k / (2 d m))
double default_eta_aerr(int k, std::size_t d, std::size_t m);

/// (1/(2B)) sqrt(k log(2d) / (10 d m)), i.e. (1/G) sqrt(log(2d) / (5m)) with
/// G = 2B sqrt(2d/k). Throws ConfigError when m < log(2d).
double default_eta_aelr(double bound, int k, std::size_t d, std::size_t m);

/// Same scale as AERR: sqrt(k / (2 d m)).
double default_eta_aesvr(int k, std::size_t d, std::size_t m);

/// Gradient-scale bound 2B sqrt(2d/k) of the sampled gradients.
double gradient_scale(double bound, int k, std::size_t d);

/// Number of examples a run will process: planned_examples (or the data
/// size), further capped by what the attribute budget can pay for.
std::size_t planned_examples(Algorithm algo, const LearnerConfig& config, std::size_t available, std::size_t d);

/// Step size the learner will use for m planned examples in dimension d.
double resolve_eta(Algorithm algo, const LearnerConfig& config, std::size_t d, std::size_t m);

FitResult aerr_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test = nullptr);
FitResult aelr_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test = nullptr);
FitResult aesvr_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test = nullptr);
FitResult ogd_full_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test = nullptr);
FitResult eg_full_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test = nullptr);

FitResult fit(Algorithm algo, const Dataset& train, const LearnerConfig& config, const Dataset* test = nullptr);

/// w.x without touching any ledger.
double predict(std::span<const double> w, const LabeledInstance& instance);

/// Mean loss of w over the dataset. When `ledger` is given it is charged d
/// reads per instance; training ledgers are never passed here.
double evaluate(std::span<const double> w, const Dataset& ds, const LossSpec& loss, BudgetLedger* ledger = nullptr);

/// Mean of (w.x - y)^2 (no 1/2 factor).
double mean_squared_error(std::span<const double> w, const Dataset& ds, BudgetLedger* ledger = nullptr);

/// Both sides of the projected-OGD regret bound
///   sum_t g_t.(w_t - w*) <= 2B^2/eta + (eta/2) sum_t ||g_t||^2
/// evaluated on recorded steps.
struct RegretCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const noexcept { return lhs <= rhs; }
};

RegretCheck ogd_regret_check(std::span<const StepRecord> steps, std::span<const double> w_star, double eta,
                             double bound);

} // namespace lao
