#include "lao/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lao {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kDefaultTracePoints = 200;

double squared_mass(std::span<const double> w) noexcept {
    double s = 0.0;
    for (double v : w) s += v * v;
    return s;
}

void validate_common(Algorithm algo, const Dataset& train, const LearnerConfig& config, const Dataset* test) {
    if (config.k < 1) throw ConfigError("k must be at least 1");
    if (!(config.bound > 0.0) || !std::isfinite(config.bound)) throw ConfigError("B must be positive and finite");
    if (!(config.eta.value() > 0.0) || !std::isfinite(config.eta.value())) {
        throw ConfigError("step size (or its auto multiplier) must be positive and finite");
    }
    require_normalized(train, norm_kind_of(algo), config.bound);
    if (config.planned_examples > train.size()) {
        throw ConfigError("planned examples m = " + std::to_string(config.planned_examples) +
                          " exceeds the training set size " + std::to_string(train.size()));
    }
    if (test && !test->empty() && test->dim() != train.dim()) {
        throw InvalidInput("test set dimension differs from the training set");
    }
}

/// Running average of iterates plus trace emission.
class Recorder {
public:
    Recorder(const LearnerConfig& config, std::size_t m, std::size_t d, const Dataset* test, FitResult& result)
        : test_(test), result_(result), sum_(d, 0.0),
          every_(config.trace_every > 0 ? config.trace_every
                                        : std::max<std::size_t>(1, (m + kDefaultTracePoints - 1) / kDefaultTracePoints)),
          m_(m), bound_(config.bound) {}

    void start(std::span<const double> w1) { emit(0, 0, w1, 0.0); }

    /// Called with w_t before the update of example t (1-based count after the call).
    void add_iterate(std::span<const double> w, NormKind kind) {
        const double ratio = norm(w, kind) / bound_;
        result_.max_norm_ratio = std::max(result_.max_norm_ratio, ratio);
        if (ratio > 1.0 + kFeasibilityTolerance) {
            throw std::logic_error("iterate left the feasible ball: ||w|| / B = " + std::to_string(ratio));
        }
        for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += w[i];
        ++count_;
    }

    void add_loss(double loss) { loss_sum_ += loss; }

    /// Drops the last add_iterate (used when a random-cost example is aborted).
    void retract_iterate(std::span<const double> w) {
        for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] -= w[i];
        --count_;
    }

    void after_example(std::uint64_t cumulative) {
        if (count_ % every_ == 0 || count_ == m_) emit_average(cumulative);
    }

    void finish(std::uint64_t cumulative) {
        if (result_.trace.empty() || result_.trace.back().example_index != count_) emit_average(cumulative);
        result_.w_bar = average();
        result_.examples_used = count_;
    }

    std::size_t count() const noexcept { return count_; }

private:
    std::vector<double> average() const {
        std::vector<double> avg(sum_.size(), 0.0);
        if (count_ == 0) return avg;
        for (std::size_t i = 0; i < sum_.size(); ++i) avg[i] = sum_[i] / static_cast<double>(count_);
        return avg;
    }

    void emit_average(std::uint64_t cumulative) {
        const auto avg = average();
        const double loss = count_ > 0 ? loss_sum_ / static_cast<double>(count_) : 0.0;
        emit(count_, cumulative, avg, loss);
    }

    void emit(std::size_t index, std::uint64_t cumulative, std::span<const double> w, double loss) {
        TraceRecord rec;
        rec.example_index = index;
        rec.cumulative_attributes = cumulative;
        rec.test_error = (test_ && !test_->empty()) ? mean_squared_error(w, *test_, &eval_ledger_) : kNaN;
        rec.train_loss_estimate = loss;
        result_.trace.push_back(rec);
        result_.evaluation_reads = eval_ledger_.total();
    }

    const Dataset* test_;
    FitResult& result_;
    std::vector<double> sum_;
    std::size_t every_;
    std::size_t m_;
    double bound_;
    std::size_t count_ = 0;
    double loss_sum_ = 0.0;
    BudgetLedger eval_ledger_;
};

std::vector<double> initial_l2_iterate(std::size_t d, double bound) {
    std::vector<double> w(d, 0.0);
    w[0] = 0.5 * bound;
    return w;
}

void apply_sparse_step(std::vector<double>& w, const SparseVector& g, double eta) {
    for (std::size_t n = 0; n < g.nnz(); ++n) w[g.index[n]] -= eta * g.value[n];
}

/// Shared loop for the L2-ball learners (AERR, AESVR, OGD). `step` computes
/// the gradient for the current example and returns it with its loss estimate.
template <typename CostFn, typename StepFn>
FitResult run_l2_learner(Algorithm algo, const Dataset& train, const LearnerConfig& config, const Dataset* test,
                         CostFn&& exact_cost, StepFn&& step) {
    const std::size_t d = train.dim();
    const std::size_t m = planned_examples(algo, config, train.size(), d);
    if (m == 0) throw ConfigError("attribute budget too small for a single example");

    FitResult result;
    result.algorithm = algo;
    result.eta = resolve_eta(algo, config, d, m);

    BudgetLedger ledger(config.attribute_budget);
    Rng rng(config.seed);
    Recorder rec(config, m, d, test, result);

    auto w = initial_l2_iterate(d, config.bound);
    rec.start(w);

    for (std::size_t t = 0; t < m; ++t) {
        const auto& inst = train[t];
        ledger.begin_example();
        if (auto cost = exact_cost(w); cost && !ledger.can_afford(*cost)) {
            result.budget_exhausted = true;
            break;
        }
        rec.add_iterate(w, NormKind::L2);
        SparseVector g;
        double loss = 0.0;
        try {
            std::tie(g, loss) = step(w, inst, ledger, rng, result.eta);
        } catch (const BudgetExhausted&) {
            rec.retract_iterate(w);
            result.budget_exhausted = true;
            break;
        }
        if (squared_mass(w) == 0.0 && !is_full_information(algo)) ++result.fallback_steps;
        if (config.record_steps) result.steps.push_back({w, g});
        rec.add_loss(loss);

        apply_sparse_step(w, g, result.eta);
        project_l2_ball_inplace(w, config.bound);
        rec.after_example(ledger.total());
    }
    rec.finish(ledger.total());
    result.ledger_total = ledger.total();
    return result;
}

/// Shared loop for the L1-ball learners (AELR, EG): multiplicative updates on
/// (z+, z-) with gradients clipped at 1/eta.
template <typename CostFn, typename StepFn>
FitResult run_l1_learner(Algorithm algo, const Dataset& train, const LearnerConfig& config, const Dataset* test,
                         CostFn&& exact_cost, StepFn&& step) {
    const std::size_t d = train.dim();
    const std::size_t m = planned_examples(algo, config, train.size(), d);
    if (m == 0) throw ConfigError("attribute budget too small for a single example");
    if (static_cast<double>(m) < std::log(2.0 * static_cast<double>(d))) {
        throw ConfigError("the lasso learner needs m >= log(2d) examples (m = " + std::to_string(m) +
                          ", log(2d) = " + std::to_string(std::log(2.0 * static_cast<double>(d))) + ")");
    }

    FitResult result;
    result.algorithm = algo;
    result.eta = resolve_eta(algo, config, d, m);
    const double clip_at = 1.0 / result.eta;

    BudgetLedger ledger(config.attribute_budget);
    Rng rng(config.seed);
    Recorder rec(config, m, d, test, result);

    std::vector<double> z_plus(d, 1.0);
    std::vector<double> z_minus(d, 1.0);
    std::vector<double> w(d, 0.0);
    auto refresh_w = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < d; ++i) total += z_plus[i] + z_minus[i];
        for (std::size_t i = 0; i < d; ++i) w[i] = (z_plus[i] - z_minus[i]) * config.bound / total;
        return total;
    };
    refresh_w();
    rec.start(w);

    for (std::size_t t = 0; t < m; ++t) {
        const auto& inst = train[t];
        ledger.begin_example();
        if (!ledger.can_afford(exact_cost(w))) {
            result.budget_exhausted = true;
            break;
        }
        rec.add_iterate(w, NormKind::L1);
        auto [g, loss] = step(w, inst, ledger, rng);
        if (l1_norm(w) == 0.0 && !is_full_information(algo)) ++result.fallback_steps;
        const SparseVector g_bar = clip_entries(g, clip_at);
        if (config.record_steps) result.steps.push_back({w, g_bar});
        rec.add_loss(loss);

        for (std::size_t n = 0; n < g_bar.nnz(); ++n) {
            const std::size_t i = g_bar.index[n];
            z_plus[i] *= std::exp(-result.eta * g_bar.value[n]);
            z_minus[i] *= std::exp(result.eta * g_bar.value[n]);
        }
        const double total = refresh_w();
        if (total > 1e150 || total < 1e-150) {
            const double s = static_cast<double>(2 * d) / total;
            for (std::size_t i = 0; i < d; ++i) {
                z_plus[i] *= s;
                z_minus[i] *= s;
            }
            refresh_w();
        }
        rec.after_example(ledger.total());
    }
    rec.finish(ledger.total());
    result.ledger_total = ledger.total();
    return result;
}

/// Exact gradient (w.x - y) x of the squared loss, charging d reads.
std::pair<SparseVector, double> full_gradient(std::span<const double> w, const LabeledInstance& inst,
                                              BudgetLedger& ledger) {
    const auto x = observe_all(inst, ledger);
    const double r = dot(w, x) - inst.target();
    SparseVector g;
    g.dim = x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) {
            g.index.push_back(i);
            g.value.push_back(r * x[i]);
        }
    }
    return {std::move(g), 0.5 * r * r};
}

} // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Algorithm algo) noexcept {
    switch (algo) {
    case Algorithm::Aerr: return "aerr";
    case Algorithm::Aelr: return "aelr";
    case Algorithm::Aesvr: return "aesvr";
    case Algorithm::Ogd: return "ogd";
    case Algorithm::Eg: return "eg";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
    for (auto a : {Algorithm::Aerr, Algorithm::Aelr, Algorithm::Aesvr, Algorithm::Ogd, Algorithm::Eg}) {
        if (to_string(a) == name) return a;
    }
    return std::nullopt;
}

NormKind norm_kind_of(Algorithm algo) noexcept {
    return (algo == Algorithm::Aelr || algo == Algorithm::Eg) ? NormKind::L1 : NormKind::L2;
}

bool is_full_information(Algorithm algo) noexcept {
    return algo == Algorithm::Ogd || algo == Algorithm::Eg;
}

double default_eta_aerr(int k, std::size_t d, std::size_t m) {
    if (k < 1 || d < 1 || m < 1) throw ConfigError("step size needs k, d, m >= 1");
    return std::sqrt(static_cast<double>(k) / (2.0 * static_cast<double>(d) * static_cast<double>(m)));
}

double default_eta_aelr(double bound, int k, std::size_t d, std::size_t m) {
    if (k < 1 || d < 1 || m < 1 || !(bound > 0.0)) throw ConfigError("step size needs k, d, m >= 1 and B > 0");
    const double log2d = std::log(2.0 * static_cast<double>(d));
    if (static_cast<double>(m) < log2d) {
        throw ConfigError("lasso step size requires m >= log(2d) (m = " + std::to_string(m) +
                          ", log(2d) = " + std::to_string(log2d) + ")");
    }
    return (1.0 / (2.0 * bound)) *
           std::sqrt(static_cast<double>(k) * log2d / (10.0 * static_cast<double>(d) * static_cast<double>(m)));
}

double default_eta_aesvr(int k, std::size_t d, std::size_t m) {
    return default_eta_aerr(k, d, m);
}

double gradient_scale(double bound, int k, std::size_t d) {
    return 2.0 * bound * std::sqrt(2.0 * static_cast<double>(d) / static_cast<double>(k));
}

std::size_t planned_examples(Algorithm algo, const LearnerConfig& config, std::size_t available, std::size_t d) {
    std::size_t m = config.planned_examples > 0 ? config.planned_examples : available;
    if (config.attribute_budget) {
        const std::uint64_t per_example =
            is_full_information(algo) ? d : static_cast<std::uint64_t>(config.k) + 1;
        m = std::min<std::size_t>(m, static_cast<std::size_t>(*config.attribute_budget / per_example));
    }
    return m;
}

double resolve_eta(Algorithm algo, const LearnerConfig& config, std::size_t d, std::size_t m) {
    if (!config.eta.is_auto()) return config.eta.value();
    const int full_k = static_cast<int>(d);
    switch (algo) {
    case Algorithm::Aerr: return config.eta.resolve(default_eta_aerr(config.k, d, m));
    case Algorithm::Aelr: return config.eta.resolve(default_eta_aelr(config.bound, config.k, d, m));
    case Algorithm::Aesvr: return config.eta.resolve(default_eta_aesvr(config.k, d, m));
    case Algorithm::Ogd: return config.eta.resolve(default_eta_aerr(full_k, d, m));
    case Algorithm::Eg: return config.eta.resolve(default_eta_aelr(config.bound, full_k, d, m));
    }
    return 0.0;
}

FitResult aerr_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test) {
    validate_common(Algorithm::Aerr, train, config, test);
    const auto k = static_cast<std::uint64_t>(config.k);
    return run_l2_learner(
        Algorithm::Aerr, train, config, test,
        [k](std::span<const double> w) -> std::optional<std::uint64_t> {
            return k + (squared_mass(w) > 0.0 ? 1 : 0);
        },
        [&](std::span<const double> w, const LabeledInstance& inst, BudgetLedger& ledger, Rng& rng, double) {
            auto x_tilde = sample_sparse_instance(inst, config.k, ledger, rng);
            const double theta = residual_estimate_l2(w, inst, ledger, rng);
            return std::pair{gradient_estimate(theta, x_tilde), 0.5 * theta * theta};
        });
}

FitResult aesvr_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test) {
    validate_common(Algorithm::Aesvr, train, config, test);
    if (!(config.epsilon > 0.0)) throw ConfigError("AESVR needs epsilon > 0");
    if (config.delta < 0.0 || config.delta > config.bound) throw ConfigError("AESVR needs 0 <= delta <= B");

    const double inv_eps = 1.0 / config.epsilon;
    const double b_eff = std::max(1.0, 2.0 * config.bound / config.epsilon);
    const TaylorCoefficients coeffs = erf_taylor_coeff;
    const auto k = static_cast<std::uint64_t>(config.k);
    return run_l2_learner(
        Algorithm::Aesvr, train, config, test,
        // Random cost: only the x~ part is known up front; the ledger cap covers the rest.
        [k](std::span<const double>) -> std::optional<std::uint64_t> { return k; },
        [&](std::span<const double> w, const LabeledInstance& inst, BudgetLedger& ledger, Rng& rng, double) {
            auto x_tilde = sample_sparse_instance(inst, config.k, ledger, rng);
            const double y = inst.target();
            const ResidualView upper{inv_eps, (y + config.delta) * inv_eps};
            const ResidualView lower{inv_eps, (y - config.delta) * inv_eps};
            const double theta = 0.5 * (gen_est(w, inst, coeffs, b_eff, ledger, rng, upper).theta_hat +
                                        gen_est(w, inst, coeffs, b_eff, ledger, rng, lower).theta_hat);
            return std::pair{gradient_estimate(theta, x_tilde), kNaN};
        });
}

FitResult ogd_full_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test) {
    validate_common(Algorithm::Ogd, train, config, test);
    const std::uint64_t d = train.dim();
    return run_l2_learner(
        Algorithm::Ogd, train, config, test,
        [d](std::span<const double>) -> std::optional<std::uint64_t> { return d; },
        [](std::span<const double> w, const LabeledInstance& inst, BudgetLedger& ledger, Rng&, double) {
            return full_gradient(w, inst, ledger);
        });
}

FitResult aelr_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test) {
    validate_common(Algorithm::Aelr, train, config, test);
    const auto k = static_cast<std::uint64_t>(config.k);
    return run_l1_learner(
        Algorithm::Aelr, train, config, test,
        [k](std::span<const double> w) { return k + (l1_norm(w) > 0.0 ? 1 : 0); },
        [&](std::span<const double> w, const LabeledInstance& inst, BudgetLedger& ledger, Rng& rng) {
            auto x_tilde = sample_sparse_instance(inst, config.k, ledger, rng);
            const double theta = residual_estimate_l1(w, inst, ledger, rng);
            return std::pair{gradient_estimate(theta, x_tilde), 0.5 * theta * theta};
        });
}

FitResult eg_full_fit(const Dataset& train, const LearnerConfig& config, const Dataset* test) {
    validate_common(Algorithm::Eg, train, config, test);
    const std::uint64_t d = train.dim();
    return run_l1_learner(
        Algorithm::Eg, train, config, test, [d](std::span<const double>) { return d; },
        [](std::span<const double> w, const LabeledInstance& inst, BudgetLedger& ledger, Rng&) {
            return full_gradient(w, inst, ledger);
        });
}

FitResult fit(Algorithm algo, const Dataset& train, const LearnerConfig& config, const Dataset* test) {
    switch (algo) {
    case Algorithm::Aerr: return aerr_fit(train, config, test);
    case Algorithm::Aelr: return aelr_fit(train, config, test);
    case Algorithm::Aesvr: return aesvr_fit(train, config, test);
    case Algorithm::Ogd: return ogd_full_fit(train, config, test);
    case Algorithm::Eg: return eg_full_fit(train, config, test);
    }
    throw InvalidInput("unknown algorithm");
}

double predict(std::span<const double> w, const LabeledInstance& instance) {
    return dot(w, instance.attributes(unmetered));
}

double evaluate(std::span<const double> w, const Dataset& ds, const LossSpec& loss, BudgetLedger* ledger) {
    if (ds.empty()) throw InvalidInput("cannot evaluate on an empty dataset");
    if (w.size() != ds.dim()) throw InvalidInput("regressor dimension differs from the dataset");
    double sum = 0.0;
    for (const auto& inst : ds) {
        if (ledger) ledger->charge(inst.dim());
        sum += loss_value(loss, predict(w, inst), inst.target());
    }
    return sum / static_cast<double>(ds.size());
}

double mean_squared_error(std::span<const double> w, const Dataset& ds, BudgetLedger* ledger) {
    return 2.0 * evaluate(w, ds, LossSpec::squared(), ledger);
}

RegretCheck ogd_regret_check(std::span<const StepRecord> steps, std::span<const double> w_star, double eta,
                             double bound) {
    RegretCheck out;
    double g_sq = 0.0;
    for (const auto& s : steps) {
        for (std::size_t n = 0; n < s.g.nnz(); ++n) {
            const std::size_t i = s.g.index[n];
            out.lhs += s.g.value[n] * (s.w[i] - w_star[i]);
        }
        g_sq += s.g.squared_norm();
    }
    out.rhs = 2.0 * bound * bound / eta + 0.5 * eta * g_sq;
    return out;
}

} // namespace lao
