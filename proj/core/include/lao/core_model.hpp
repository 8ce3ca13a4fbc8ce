#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "lao/errors.hpp"

namespace lao {

using Rng = std::mt19937_64;

/// Per-trial seed derivation: trial t of a run seeded with s uses s + t.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
    return seed + trial;
}

// ---------------------------------------------------------------------------
// Attribute accounting
// ---------------------------------------------------------------------------

/// Counts attribute reads. Every call to observe() charges exactly one read,
/// including repeated reads of the same index.
///
/// An optional cap turns the ledger into a hard budget: a charge that would
/// push the total above the cap throws BudgetExhausted and leaves the ledger
/// untouched.
class BudgetLedger {
public:
    BudgetLedger() = default;
    explicit BudgetLedger(std::optional<std::uint64_t> cap) : cap_(cap) {}

    void charge(std::uint64_t reads = 1) {
        if (cap_ && total_ + reads > *cap_) throw BudgetExhausted(*cap_, total_ + reads);
        total_ += reads;
        current_ += reads;
    }

    /// Resets the per-example counter; the total is never reset.
    void begin_example() noexcept { current_ = 0; }

    bool can_afford(std::uint64_t reads) const noexcept {
        return !cap_ || total_ + reads <= *cap_;
    }

    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t current_example() const noexcept { return current_; }
    std::optional<std::uint64_t> cap() const noexcept { return cap_; }

private:
    std::uint64_t total_ = 0;
    std::uint64_t current_ = 0;
    std::optional<std::uint64_t> cap_;
};

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// Tag for code paths that legitimately bypass the budget (evaluation,
/// preprocessing, I/O). Learners never use it on training data.
struct Unmetered {
    explicit constexpr Unmetered() = default;
};
inline constexpr Unmetered unmetered{};

class LabeledInstance;

/// Reads attribute i of x and charges one read to the ledger.
/// Throws InvalidInput if i >= d.
double observe(const LabeledInstance& instance, std::size_t i, BudgetLedger& ledger);

/// Reads every attribute, charging d reads. Used by full-information baselines.
std::span<const double> observe_all(const LabeledInstance& instance, BudgetLedger& ledger);

/// An attribute vector plus its target. The target is always free to read;
/// attributes go through observe() unless the caller holds the Unmetered tag.
class LabeledInstance {
public:
    LabeledInstance(std::vector<double> attributes, double target);

    std::size_t dim() const noexcept { return attributes_.size(); }
    double target() const noexcept { return target_; }

    std::span<const double> attributes(Unmetered) const noexcept { return attributes_; }

private:
    friend double observe(const LabeledInstance&, std::size_t, BudgetLedger&);
    friend std::span<const double> observe_all(const LabeledInstance&, BudgetLedger&);

    std::vector<double> attributes_;
    double target_;
};

// ---------------------------------------------------------------------------
// Norms and regressors
// ---------------------------------------------------------------------------

enum class NormKind { L1, L2 };

std::string_view to_string(NormKind kind) noexcept;

double dot(std::span<const double> a, std::span<const double> b);
double l1_norm(std::span<const double> v) noexcept;
double l2_norm(std::span<const double> v) noexcept;
double linf_norm(std::span<const double> v) noexcept;
double norm(std::span<const double> v, NormKind kind) noexcept;

/// Euclidean projection onto {w : ||w||_2 <= bound}: v * bound / max(||v||_2, bound).
std::vector<double> project_l2_ball(std::span<const double> v, double bound);

/// In-place variant used inside learner loops.
void project_l2_ball_inplace(std::span<double> v, double bound);

/// Relative slack used by every feasibility assertion.
inline constexpr double kFeasibilityTolerance = 1e-12;

struct RegressorState {
    std::vector<double> weights;
    NormKind norm_kind = NormKind::L2;
    double bound = 1.0;

    bool feasible() const noexcept {
        return norm(weights, norm_kind) <= bound * (1.0 + kFeasibilityTolerance);
    }
};

// ---------------------------------------------------------------------------
// Configuration and traces
// ---------------------------------------------------------------------------

/// Step size: either a fixed value or the learner's documented default,
/// optionally multiplied by a scale (so "10*auto" is expressible).
class StepSize {
public:
    static StepSize automatic(double scale = 1.0) { return StepSize(true, scale); }
    static StepSize fixed(double eta) { return StepSize(false, eta); }

    bool is_auto() const noexcept { return auto_; }
    /// Fixed value, or the multiplier applied to the default when automatic.
    double value() const noexcept { return value_; }

    double resolve(double default_eta) const noexcept { return auto_ ? value_ * default_eta : value_; }

    friend bool operator==(const StepSize&, const StepSize&) = default;

private:
    StepSize(bool is_auto, double value) : auto_(is_auto), value_(value) {}
    bool auto_;
    double value_;
};

struct LearnerConfig {
    int k = 1;                                  // attributes sampled per example for x~
    StepSize eta = StepSize::automatic();
    double bound = 1.0;                         // B
    std::size_t planned_examples = 0;           // m; 0 means "the whole training set"
    double delta = 0.0;                         // SVR insensitivity width
    double epsilon = 0.1;                       // SVR smoothing accuracy
    std::uint64_t seed = 0;
    std::size_t trace_every = 0;                // 0 means ceil(m / 200)
    std::optional<std::uint64_t> attribute_budget;
    bool record_steps = false;                  // keep (w_t, g~_t) for post-hoc regret checks
};

struct TraceRecord {
    std::size_t example_index = 0;
    std::uint64_t cumulative_attributes = 0;
    double test_error = 0.0;           // mean squared error of the running average on the test set
    double train_loss_estimate = 0.0;  // running mean of the per-example loss estimates

    /// NaN fields (no test set, no loss estimate) compare equal to each other.
    friend bool operator==(const TraceRecord& a, const TraceRecord& b) noexcept {
        auto same = [](double x, double y) { return x == y || (x != x && y != y); };
        return a.example_index == b.example_index && a.cumulative_attributes == b.cumulative_attributes &&
               same(a.test_error, b.test_error) && same(a.train_loss_estimate, b.train_loss_estimate);
    }
};

} // namespace lao
