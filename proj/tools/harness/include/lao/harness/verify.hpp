#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lao/core_model.hpp"

namespace lao::harness {

/// One property check. `margin` is how far inside its bound the check landed
/// (bound minus observed); negative means it failed.
struct CheckResult {
    std::string name;
    bool passed = false;
    double margin = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool passed() const noexcept;
    std::size_t failures() const noexcept;
    double worst_margin() const noexcept;
};

inline constexpr const char* kSuites[] = {"unbiased", "variance", "genest", "clip", "mwregret", "smoothing", "budget"};

/// Throws ConfigError for an unknown suite.
VerifyReport run_suite(const std::string& suite, std::uint64_t seed = 0);

// Exact moments of the sampled gradient, by enumerating every draw sequence
// (d^k of them) and every residual coordinate. Independent of the learners'
// sampling code: probabilities are computed here, only the deterministic
// building blocks are reused.
struct GradientMoments {
    std::vector<double> mean;         // E[g~]
    std::vector<double> second;       // E[g~_i^2]
    double mean_squared_norm = 0.0;   // E ||g~||_2^2
};

GradientMoments enumerate_gradient_moments(std::span<const double> w, std::span<const double> x, double y, int k,
                                           NormKind kind);

/// E[clip(X, c)] - E[X] for a finite distribution.
double clip_bias(std::span<const double> values, std::span<const double> probs, double c);

} // namespace lao::harness
