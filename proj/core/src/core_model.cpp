#include "lao/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lao {

LabeledInstance::LabeledInstance(std::vector<double> attributes, double target)
    : attributes_(std::move(attributes)), target_(target) {
    if (attributes_.empty()) throw InvalidInput("instance must have at least one attribute");
}

double observe(const LabeledInstance& instance, std::size_t i, BudgetLedger& ledger) {
    if (i >= instance.attributes_.size()) {
        throw InvalidInput("attribute index " + std::to_string(i) + " out of range for d=" +
                           std::to_string(instance.attributes_.size()));
    }
    ledger.charge(1);
    return instance.attributes_[i];
}

std::span<const double> observe_all(const LabeledInstance& instance, BudgetLedger& ledger) {
    ledger.charge(instance.attributes_.size());
    return instance.attributes_;
}

std::string_view to_string(NormKind kind) noexcept {
    return kind == NormKind::L1 ? "l1" : "l2";
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidInput("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l1_norm(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double l2_norm(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double linf_norm(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

double norm(std::span<const double> v, NormKind kind) noexcept {
    return kind == NormKind::L1 ? l1_norm(v) : l2_norm(v);
}

void project_l2_ball_inplace(std::span<double> v, double bound) {
    if (!(bound > 0.0) || !std::isfinite(bound)) throw InvalidInput("projection bound must be positive and finite");
    for (double x : v) {
        if (!std::isfinite(x)) throw InvalidInput("non-finite entry in vector to project");
    }
    const double n = l2_norm(v);
    if (n <= bound) return;
    const double scale = bound / n;
    for (double& x : v) x *= scale;
    // Rounding can leave the result a few ulps outside.
    while (l2_norm(v) > bound) {
        for (double& x : v) x = std::nextafter(x, 0.0);
    }
}

std::vector<double> project_l2_ball(std::span<const double> v, double bound) {
    std::vector<double> out(v.begin(), v.end());
    project_l2_ball_inplace(out, bound);
    return out;
}

} // namespace lao
