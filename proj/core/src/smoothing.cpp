#include "lao/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lao/errors.hpp"

namespace lao {

namespace {

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

// exp(-x^2) < 1e-300 beyond this, so rho(x) == |x| to double precision.
constexpr double kRhoAsymptote = 26.3;

} // namespace

double squared_loss(double prediction, double target) noexcept {
    const double r = prediction - target;
    return 0.5 * r * r;
}

double delta_insensitive_loss(double prediction, double target, double delta) noexcept {
    return std::max(0.0, std::abs(prediction - target) - delta);
}

double loss_value(const LossSpec& spec, double prediction, double target) {
    switch (spec.kind) {
    case LossKind::Squared:
        return squared_loss(prediction, target);
    case LossKind::DeltaInsensitive:
        return delta_insensitive_loss(prediction, target, spec.delta);
    case LossKind::SmoothedSvr:
        if (!(spec.epsilon > 0.0)) throw InvalidInput("smoothed SVR loss needs epsilon > 0");
        return f_eps(prediction - target, spec.delta, spec.epsilon);
    }
    return 0.0;
}

double clip(double x, double c) noexcept {
    return std::max(std::min(x, c), -c);
}

double rho(double x) noexcept {
    const double ax = std::abs(x);
    if (ax > kRhoAsymptote) return ax;
    return x * std::erf(x) + kInvSqrtPi * std::exp(-x * x);
}

double erf_taylor_coeff(int n) noexcept {
    if (n < 0 || n % 2 == 0) return 0.0;
    const int j = (n - 1) / 2;
    // (2/sqrt(pi)) / (j! (2j+1)) in log space so large j underflows to 0 cleanly.
    const double log_mag = std::log(2.0 * kInvSqrtPi) - std::lgamma(j + 1.0) - std::log(2.0 * j + 1.0);
    const double mag = std::exp(log_mag);
    return (j % 2 == 0) ? mag : -mag;
}

double erf_taylor_partial(double x, int max_degree) noexcept {
    double sum = 0.0;
    double power = x;  // x^n for odd n
    const double x2 = x * x;
    for (int n = 1; n <= max_degree; n += 2) {
        sum += erf_taylor_coeff(n) * power;
        power *= x2;
    }
    return sum;
}

double f_eps(double x, double delta, double eps) noexcept {
    return 0.5 * eps * rho((x - delta) / eps) + 0.5 * eps * rho((x + delta) / eps) - delta;
}

double f_eps_derivative(double x, double delta, double eps) noexcept {
    return 0.5 * (std::erf((x - delta) / eps) + std::erf((x + delta) / eps));
}

MwRegretCheck mw_second_order_bound(std::span<const std::vector<double>> costs, double eta) {
    if (!(eta > 0.0)) throw InvalidInput("multiplicative weights needs eta > 0");
    if (costs.empty()) return {0.0, 0.0};
    const std::size_t n = costs.front().size();
    if (n == 0) throw InvalidInput("cost vectors must be non-empty");

    std::vector<double> z(n, 1.0);
    std::vector<double> cumulative(n, 0.0);
    MwRegretCheck out;
    double second_order = 0.0;

    for (const auto& c : costs) {
        if (c.size() != n) throw InvalidInput("cost vectors must share one length");
        for (double v : c) {
            if (v < -1.0 / eta) throw InvalidInput("cost entry below -1/eta");
        }
        double z_sum = 0.0;
        for (double zi : z) z_sum += zi;
        double first = 0.0;
        double second = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = z[i] / z_sum;
            first += p * c[i];
            second += p * c[i] * c[i];
        }
        out.lhs += first;
        second_order += second;
        double z_max = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cumulative[i] += c[i];
            z[i] *= std::exp(-eta * c[i]);
            z_max = std::max(z_max, z[i]);
        }
        // p_t is scale-invariant; keep z representable.
        for (double& zi : z) zi /= z_max;
    }

    const double best = *std::min_element(cumulative.begin(), cumulative.end());
    out.rhs = best + std::log(static_cast<double>(n)) / eta + eta * second_order;
    return out;
}

bool mw_second_order_check(std::span<const std::vector<double>> costs, double eta) {
    return mw_second_order_bound(costs, eta).holds();
}

} // namespace lao
