#include "lao/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lao/smoothing.hpp"

namespace lao {

namespace {

void require_finite(std::span<const double> w) {
    for (double v : w) {
        if (!std::isfinite(v)) throw InvalidInput("non-finite regressor entry");
    }
}

double view_target(const LabeledInstance& instance, const ResidualView& view) {
    return view.target ? *view.target : instance.target();
}

double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

} // namespace

double SparseVector::at(std::size_t i) const noexcept {
    auto it = std::lower_bound(index.begin(), index.end(), i);
    if (it == index.end() || *it != i) return 0.0;
    return value[static_cast<std::size_t>(it - index.begin())];
}

double SparseVector::squared_norm() const noexcept {
    double s = 0.0;
    for (double v : value) s += v * v;
    return s;
}

std::vector<double> SparseVector::to_dense() const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t n = 0; n < index.size(); ++n) out[index[n]] = value[n];
    return out;
}

ImportanceSampler ImportanceSampler::l2(std::span<const double> w) {
    require_finite(w);
    ImportanceSampler s;
    s.cumulative_.reserve(w.size());
    double acc = 0.0;
    for (double v : w) {
        acc += v * v;
        s.cumulative_.push_back(acc);
    }
    s.total_ = acc;
    return s;
}

ImportanceSampler ImportanceSampler::l1(std::span<const double> w) {
    require_finite(w);
    ImportanceSampler s;
    s.cumulative_.reserve(w.size());
    double acc = 0.0;
    for (double v : w) {
        acc += std::abs(v);
        s.cumulative_.push_back(acc);
    }
    s.total_ = acc;
    return s;
}

double ImportanceSampler::probability(std::size_t j) const {
    if (j >= cumulative_.size()) throw InvalidInput("coordinate out of range");
    if (empty()) return 0.0;
    const double lo = j == 0 ? 0.0 : cumulative_[j - 1];
    return (cumulative_[j] - lo) / total_;
}

std::size_t ImportanceSampler::sample(Rng& rng) const {
    if (empty()) throw InvalidInput("cannot sample from a zero regressor");
    std::uniform_real_distribution<double> u(0.0, total_);
    const double r = u(rng);
    // First index whose cumulative mass exceeds r; zero-mass coordinates are never hit.
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    if (it == cumulative_.end()) {
        // r == total_ after rounding: take the last coordinate with positive mass.
        it = std::lower_bound(cumulative_.begin(), cumulative_.end(), total_);
    }
    return static_cast<std::size_t>(it - cumulative_.begin());
}

SparseVector sparse_instance_from_draws(const LabeledInstance& instance, std::span<const std::size_t> draws,
                                        BudgetLedger& ledger) {
    if (draws.empty()) throw InvalidInput("need at least one draw (k >= 1)");
    const std::size_t d = instance.dim();
    const double scale = static_cast<double>(d) / static_cast<double>(draws.size());

    std::vector<std::pair<std::size_t, double>> entries;
    entries.reserve(draws.size());
    for (std::size_t i : draws) entries.emplace_back(i, scale * observe(instance, i, ledger));
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SparseVector out;
    out.dim = d;
    for (const auto& [i, v] : entries) {
        if (!out.index.empty() && out.index.back() == i) {
            out.value.back() += v;
        } else {
            out.index.push_back(i);
            out.value.push_back(v);
        }
    }
    return out;
}

SparseVector sample_sparse_instance(const LabeledInstance& instance, int k, BudgetLedger& ledger, Rng& rng) {
    if (k < 1) throw InvalidInput("k must be at least 1, got " + std::to_string(k));
    std::uniform_int_distribution<std::size_t> pick(0, instance.dim() - 1);
    std::vector<std::size_t> draws(static_cast<std::size_t>(k));
    for (auto& i : draws) i = pick(rng);
    return sparse_instance_from_draws(instance, draws, ledger);
}

namespace {

// squared_norm is ||w||_2^2, passed in so repeated draws stay O(1).
double residual_l2_with_mass(std::span<const double> w, double squared_norm, const LabeledInstance& instance,
                             std::size_t j, BudgetLedger& ledger, const ResidualView& view) {
    if (w.size() != instance.dim()) throw InvalidInput("regressor and instance dimensions differ");
    if (j >= w.size() || w[j] == 0.0) throw InvalidInput("residual coordinate must carry nonzero weight");
    const double xj = view.x_scale * observe(instance, j, ledger);
    return squared_norm * xj / w[j] - view_target(instance, view);
}

} // namespace

double residual_l2_at(std::span<const double> w, const LabeledInstance& instance, std::size_t j,
                      BudgetLedger& ledger, const ResidualView& view) {
    double sq = 0.0;
    for (double v : w) sq += v * v;
    return residual_l2_with_mass(w, sq, instance, j, ledger, view);
}

double residual_l1_at(std::span<const double> w, const LabeledInstance& instance, std::size_t j,
                      BudgetLedger& ledger, const ResidualView& view) {
    if (w.size() != instance.dim()) throw InvalidInput("regressor and instance dimensions differ");
    if (j >= w.size() || w[j] == 0.0) throw InvalidInput("residual coordinate must carry nonzero weight");
    const double l1 = l1_norm(w);
    const double xj = view.x_scale * observe(instance, j, ledger);
    return l1 * sign(w[j]) * xj - view_target(instance, view);
}

double residual_estimate_l2(std::span<const double> w, const LabeledInstance& instance, BudgetLedger& ledger,
                            Rng& rng, const ResidualView& view) {
    require_finite(w);
    const auto sampler = ImportanceSampler::l2(w);
    if (sampler.empty()) return -view_target(instance, view);
    return residual_l2_with_mass(w, sampler.total_mass(), instance, sampler.sample(rng), ledger, view);
}

double residual_estimate_l1(std::span<const double> w, const LabeledInstance& instance, BudgetLedger& ledger,
                            Rng& rng, const ResidualView& view) {
    require_finite(w);
    const auto sampler = ImportanceSampler::l1(w);
    if (sampler.empty()) return -view_target(instance, view);
    return residual_l1_at(w, instance, sampler.sample(rng), ledger, view);
}

SparseVector gradient_estimate(double theta, const SparseVector& x_tilde) {
    SparseVector g = x_tilde;
    for (double& v : g.value) v *= theta;
    return g;
}

SparseVector clip_entries(const SparseVector& g, double c) {
    SparseVector out = g;
    for (double& v : out.value) v = clip(v, c);
    return out;
}

double gen_est_product(int degree, double coefficient, std::span<const double> factors) noexcept {
    if (coefficient == 0.0) return 0.0;
    if (degree <= 50) {
        double p = std::ldexp(coefficient, degree + 1);
        for (double s : factors) p *= s;
        return p;
    }
    double log_mag = (degree + 1) * std::numbers::ln2 + std::log(std::abs(coefficient));
    bool negative = coefficient < 0.0;
    for (double s : factors) {
        if (s == 0.0) return 0.0;
        log_mag += std::log(std::abs(s));
        if (s < 0.0) negative = !negative;
    }
    const double mag = std::exp(log_mag);
    return negative ? -mag : mag;
}

GenEstSample gen_est(std::span<const double> w, const LabeledInstance& instance, const TaylorCoefficients& coeffs,
                     double b_eff, BudgetLedger& ledger, Rng& rng, const ResidualView& view) {
    if (!(b_eff >= 1.0)) throw InvalidInput("GenEst needs an effective bound >= 1");
    require_finite(w);

    const double big_n = std::ceil(4.0 * b_eff * b_eff);
    const auto samples_per_factor = static_cast<std::uint64_t>(big_n);

    GenEstSample out;
    std::geometric_distribution<int> degree_dist(0.5);
    out.degree = degree_dist(rng);

    const double a_n = coeffs(out.degree);
    if (a_n == 0.0) return out;

    const std::uint64_t start = ledger.total();
    const auto sampler = ImportanceSampler::l2(w);
    const double y = view_target(instance, view);
    auto one_residual = [&]() {
        if (sampler.empty()) return -y;
        return residual_l2_with_mass(w, sampler.total_mass(), instance, sampler.sample(rng), ledger, view);
    };

    const bool single = static_cast<double>(out.degree) <= 2.0 * std::log2(big_n);
    out.s_values.reserve(static_cast<std::size_t>(out.degree));
    for (int r = 0; r < out.degree; ++r) {
        if (single) {
            out.s_values.push_back(one_residual());
        } else {
            double acc = 0.0;
            for (std::uint64_t s = 0; s < samples_per_factor; ++s) acc += one_residual();
            out.s_values.push_back(acc / big_n);
        }
    }
    out.attribute_reads = ledger.total() - start;
    out.theta_hat = gen_est_product(out.degree, a_n, out.s_values);
    return out;
}

} // namespace lao
