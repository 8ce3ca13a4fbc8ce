#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "lao/dataset.hpp"

namespace lao {

namespace {

std::vector<double> gaussian_vector(std::size_t n, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    return v;
}

std::vector<double> uniform_in_l2_ball(std::size_t d, Rng& rng) {
    auto v = gaussian_vector(d, rng);
    const double n = l2_norm(v);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double radius = std::pow(u(rng), 1.0 / static_cast<double>(d));
    for (double& x : v) x *= radius / n;
    return v;
}

std::vector<double> uniform_in_cube(std::size_t d, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(d);
    for (double& x : v) x = u(rng);
    return v;
}

struct Point {
    double x;
    double y;
};

double segment_distance(Point p, Point a, Point b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = a.x + t * dx - p.x;
    const double ey = a.y + t * dy - p.y;
    return std::sqrt(ex * ex + ey * ey);
}

// Polyline skeletons on a 28x28 canvas, (column, row).
const std::vector<Point> kThree = {{9, 7},   {14, 5},  {19, 7},  {19, 11}, {14, 14},
                                   {20, 17}, {20, 21}, {14, 24}, {8, 22}};
const std::vector<Point> kFive = {{19, 5},  {10, 5},  {9, 13},  {15, 12},
                                  {20, 16}, {19, 22}, {13, 24}, {8, 22}};

} // namespace

SyntheticTask synth_linear(std::size_t d, std::size_t m, std::size_t sparsity, double noise_sd,
                           NormCertificate norm_target, std::uint64_t seed, double bound) {
    if (d == 0 || m == 0) throw ConfigError("synthetic task needs d >= 1 and m >= 1");
    if (sparsity < 1 || sparsity > d) throw ConfigError("sparsity must be in 1..d");
    if (norm_target == NormCertificate::None) throw ConfigError("synthetic task needs an L2 or Linf geometry");
    if (!(bound > 0.0) || noise_sd < 0.0) throw ConfigError("need bound > 0 and noise_sd >= 0");

    Rng rng(seed);
    std::vector<std::size_t> coords(d);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    std::shuffle(coords.begin(), coords.end(), rng);

    std::vector<double> w_star(d, 0.0);
    const auto values = gaussian_vector(sparsity, rng);
    for (std::size_t s = 0; s < sparsity; ++s) w_star[coords[s]] = values[s];
    const double wn = norm_target == NormCertificate::L2 ? l2_norm(w_star) : l1_norm(w_star);
    for (double& v : w_star) v *= bound / wn;

    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<LabeledInstance> out;
    out.reserve(m);
    for (std::size_t t = 0; t < m; ++t) {
        auto x = norm_target == NormCertificate::L2 ? uniform_in_l2_ball(d, rng) : uniform_in_cube(d, rng);
        double y = dot(w_star, x);
        if (noise_sd > 0.0) y += noise_sd * noise(rng);
        out.emplace_back(std::move(x), std::clamp(y, -bound, bound));
    }
    return {Dataset(std::move(out), norm_target), std::move(w_star)};
}

LowerBoundGenerator::LowerBoundGenerator(std::size_t d, double epsilon, std::uint64_t seed)
    : d_(d), epsilon_(epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("lower-bound instance needs 0 < epsilon <= 1");
    const auto size = static_cast<std::size_t>(std::ceil(1.0 / (epsilon * epsilon) - 1e-9));
    if (size > d) {
        throw ConfigError("support size ceil(1/eps^2) = " + std::to_string(size) + " exceeds d = " +
                          std::to_string(d) + "; need eps >= 1/sqrt(d)");
    }
    Rng rng(seed);
    std::vector<std::size_t> coords(d);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    std::shuffle(coords.begin(), coords.end(), rng);
    support_.assign(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(support_.begin(), support_.end());
    std::bernoulli_distribution coin(0.5);
    signs_.resize(size);
    for (double& r : signs_) r = coin(rng) ? 1.0 : -1.0;
}

std::vector<double> LowerBoundGenerator::w_star() const {
    std::vector<double> w(d_, 0.0);
    for (std::size_t s = 0; s < support_.size(); ++s) w[support_[s]] = epsilon_ * signs_[s];
    return w;
}

LabeledInstance LowerBoundGenerator::draw(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, support_.size() - 1);
    const std::size_t s = pick(rng);
    std::vector<double> x(d_, 0.0);
    x[support_[s]] = signs_[s];
    return LabeledInstance(std::move(x), 1.0);
}

Dataset LowerBoundGenerator::sample(std::size_t m, std::uint64_t seed) const {
    Rng rng(seed);
    std::vector<LabeledInstance> out;
    out.reserve(m);
    for (std::size_t t = 0; t < m; ++t) out.push_back(draw(rng));
    return Dataset(std::move(out), NormCertificate::L2);
}

LowerBoundGenerator synth_lower_bound(std::size_t d, double epsilon, std::uint64_t seed) {
    return LowerBoundGenerator(d, epsilon, seed);
}

Dataset synth_digit_surrogate(std::size_t n, std::uint64_t seed) {
    constexpr std::size_t side = 28;
    constexpr double centre = 14.0;
    Rng rng(seed);
    std::bernoulli_distribution which(0.5);
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    std::uniform_real_distribution<double> angle(-0.3, 0.3);
    std::uniform_real_distribution<double> zoom(0.8, 1.15);
    std::uniform_real_distribution<double> width(0.8, 2.0);
    std::uniform_real_distribution<double> strength(0.7, 1.0);
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.08);

    std::vector<LabeledInstance> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const bool is_five = which(rng);
        const auto& skeleton = is_five ? kFive : kThree;
        const double dx = shift(rng);
        const double dy = shift(rng);
        const double a = angle(rng);
        const double z = zoom(rng);
        const double w = width(rng);
        const double ink = strength(rng);

        std::vector<Point> pts;
        pts.reserve(skeleton.size());
        for (const auto& p : skeleton) {
            const double u = (p.x - centre) * z;
            const double v = (p.y - centre) * z;
            pts.push_back({centre + dx + u * std::cos(a) - v * std::sin(a) + jitter(rng),
                           centre + dy + u * std::sin(a) + v * std::cos(a) + jitter(rng)});
        }

        std::vector<double> x(side * side, 0.0);
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t c = 0; c < side; ++c) {
                const Point p{c + 0.5, r + 0.5};
                double dist = 1e9;
                for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
                    dist = std::min(dist, segment_distance(p, pts[k], pts[k + 1]));
                }
                double v = ink * std::exp(-dist * dist / (2.0 * w * w)) + noise(rng);
                if (v < 0.15) v = 0.0;
                x[r * side + c] = std::round(255.0 * std::min(v, 1.0));
            }
        }
        out.emplace_back(std::move(x), is_five ? 5.0 : 3.0);
    }
    return Dataset(std::move(out), NormCertificate::None, true);
}

} // namespace lao
