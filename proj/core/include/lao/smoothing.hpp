#pragma once

#include <span>
#include <vector>

namespace lao {

enum class LossKind { Squared, DeltaInsensitive, SmoothedSvr };

struct LossSpec {
    LossKind kind = LossKind::Squared;
    double delta = 0.0;    // insensitivity width, DeltaInsensitive and SmoothedSvr
    double epsilon = 0.1;  // smoothing accuracy, SmoothedSvr only

    static LossSpec squared() { return {}; }
    static LossSpec delta_insensitive(double delta) { return {LossKind::DeltaInsensitive, delta, 0.0}; }
    static LossSpec smoothed_svr(double delta, double epsilon) { return {LossKind::SmoothedSvr, delta, epsilon}; }
};

/// 1/2 (prediction - target)^2
double squared_loss(double prediction, double target) noexcept;

/// max{0, |prediction - target| - delta}
double delta_insensitive_loss(double prediction, double target, double delta) noexcept;

/// Loss of a single prediction under `spec`.
double loss_value(const LossSpec& spec, double prediction, double target);

/// max{min{x, c}, -c}
double clip(double x, double c) noexcept;

/// rho(x) = x erf(x) + exp(-x^2)/sqrt(pi). Even, convex, rho' = erf.
/// Returns |x| once exp(-x^2) underflows.
double rho(double x) noexcept;

/// Taylor coefficient a_n of rho'(x) = erf(x) = sum_n a_n x^n:
/// a_{2j+1} = (2/sqrt(pi)) (-1)^j / (j! (2j+1)), even coefficients are zero.
double erf_taylor_coeff(int n) noexcept;

/// sum_{n <= max_degree} a_n x^n with the coefficients above.
double erf_taylor_partial(double x, int max_degree) noexcept;

/// Analytic surrogate of |x|_delta:
/// (eps/2) rho((x - delta)/eps) + (eps/2) rho((x + delta)/eps) - delta.
double f_eps(double x, double delta, double eps) noexcept;

/// Derivative of f_eps: (erf((x - delta)/eps) + erf((x + delta)/eps)) / 2.
double f_eps_derivative(double x, double delta, double eps) noexcept;

/// Both sides of the second-order multiplicative-weights regret inequality
///   sum_t p_t.c_t <= min_i sum_t c_t[i] + log(n)/eta + eta sum_t p_t.c_t^2
/// where z_1 = 1, z_{t+1}[i] = z_t[i] exp(-eta c_t[i]) and p_t = z_t / |z_t|_1.
struct MwRegretCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const noexcept { return lhs <= rhs; }
    double margin() const noexcept { return rhs - lhs; }
};

/// Throws InvalidInput if any entry is below -1/eta, or if rows differ in length.
MwRegretCheck mw_second_order_bound(std::span<const std::vector<double>> costs, double eta);

/// Convenience wrapper returning only whether the inequality holds.
bool mw_second_order_check(std::span<const std::vector<double>> costs, double eta);

} // namespace lao
