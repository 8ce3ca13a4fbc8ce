#include "lao/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "lao/dataset.hpp"
#include "lao/errors.hpp"
#include "lao/estimators.hpp"
#include "lao/learners.hpp"
#include "lao/smoothing.hpp"

namespace lao::harness {

bool VerifyReport::passed() const noexcept { return failures() == 0 && !checks.empty(); }

std::size_t VerifyReport::failures() const noexcept {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

double VerifyReport::worst_margin() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::min(m, c.margin);
    return m;
}

GradientMoments enumerate_gradient_moments(std::span<const double> w, std::span<const double> x, double y, int k,
                                           NormKind kind) {
    const std::size_t d = x.size();
    if (w.size() != d || d == 0 || k < 1) throw InvalidInput("bad enumeration input");
    const LabeledInstance inst(std::vector<double>(x.begin(), x.end()), y);
    BudgetLedger ledger;

    // Residual coordinate distribution, computed here rather than by the sampler.
    double mass = 0.0;
    for (double v : w) mass += kind == NormKind::L2 ? v * v : std::abs(v);
    std::vector<std::pair<double, double>> residuals;  // (probability, theta~)
    if (mass == 0.0) {
        residuals.emplace_back(1.0, -y);
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            if (w[j] == 0.0) continue;
            const double p = (kind == NormKind::L2 ? w[j] * w[j] : std::abs(w[j])) / mass;
            const double theta =
                kind == NormKind::L2 ? residual_l2_at(w, inst, j, ledger) : residual_l1_at(w, inst, j, ledger);
            residuals.emplace_back(p, theta);
        }
    }

    GradientMoments out;
    out.mean.assign(d, 0.0);
    out.second.assign(d, 0.0);
    std::size_t sequences = 1;
    for (int r = 0; r < k; ++r) sequences *= d;
    const double p_seq = 1.0 / static_cast<double>(sequences);
    std::vector<std::size_t> draws(static_cast<std::size_t>(k));
    for (std::size_t code = 0; code < sequences; ++code) {
        std::size_t c = code;
        for (auto& i : draws) {
            i = c % d;
            c /= d;
        }
        const auto x_tilde = sparse_instance_from_draws(inst, draws, ledger).to_dense();
        for (const auto& [p_j, theta] : residuals) {
            const double p = p_seq * p_j;
            double sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double g = theta * x_tilde[i];
                out.mean[i] += p * g;
                out.second[i] += p * g * g;
                sq += g * g;
            }
            out.mean_squared_norm += p * sq;
        }
    }
    return out;
}

double clip_bias(std::span<const double> values, std::span<const double> probs, double c) {
    double clipped = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        clipped += probs[i] * clip(values[i], c);
        mean += probs[i] * values[i];
    }
    return clipped - mean;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

CheckResult check_le(std::string name, double observed, double bound, std::string detail = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.margin = bound - observed;
    r.passed = observed <= bound;
    r.detail = detail.empty() ? "observed " + fmt(observed) + " <= bound " + fmt(bound) : std::move(detail);
    return r;
}

/// Random vector with the given norm at most `radius` (L2 ball or Linf cube);
/// some coordinates are zeroed so the samplers see sparse regressors.
std::vector<double> random_point(std::size_t d, double radius, NormKind ball, Rng& rng, bool allow_zeros) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(d);
    for (double& e : v) e = g(rng);
    if (allow_zeros && d > 1) {
        for (double& e : v) {
            if (u(rng) < 0.25) e = 0.0;
        }
    }
    const double n = ball == NormKind::L2 ? l2_norm(v) : l1_norm(v);
    if (n == 0.0) return v;
    const double r = radius * u(rng);
    for (double& e : v) e *= r / n;
    return v;
}

std::vector<double> random_instance(std::size_t d, NormKind kind, Rng& rng) {
    if (kind == NormKind::L2) return random_point(d, 1.0, NormKind::L2, rng, false);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(d);
    for (double& e : x) e = u(rng);
    return x;
}

/// Runs `body` on every (kind, d, k, draw) of the small enumeration grid.
void for_each_small_case(std::uint64_t seed,
                         const std::function<void(NormKind, std::size_t, int, double, std::span<const double>,
                                                  std::span<const double>, double)>& body) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (NormKind kind : {NormKind::L2, NormKind::L1}) {
        for (std::size_t d = 1; d <= 4; ++d) {
            for (int k = 1; k <= 2; ++k) {
                for (int draw = 0; draw < 50; ++draw) {
                    const double bound = std::array{0.5, 1.0, 2.0}[static_cast<std::size_t>(draw) % 3];
                    auto w = draw == 0 ? std::vector<double>(d, 0.0) : random_point(d, bound, kind, rng, true);
                    const auto x = random_instance(d, kind, rng);
                    const double y = bound * u(rng);
                    body(kind, d, k, bound, w, x, y);
                }
            }
        }
    }
}

VerifyReport suite_unbiased(std::uint64_t seed) {
    VerifyReport rep{"unbiased", {}};
    std::map<std::string, double> worst;  // per (kind, d, k): max |E g~ - grad|
    for_each_small_case(seed, [&](NormKind kind, std::size_t d, int k, double, std::span<const double> w,
                                  std::span<const double> x, double y) {
        const auto mom = enumerate_gradient_moments(w, x, y, k, kind);
        const double r = dot(w, x) - y;
        double err = 0.0;
        for (std::size_t i = 0; i < d; ++i) err = std::max(err, std::abs(mom.mean[i] - r * x[i]));
        const std::string key = std::string(to_string(kind)) + " d=" + std::to_string(d) + " k=" + std::to_string(k);
        worst[key] = std::max(worst[key], err);
    });
    for (const auto& [key, err] : worst) {
        rep.checks.push_back(check_le("E[g~] = (w.x - y) x, " + key + ", 50 draws", err, 1e-12,
                                      "max deviation " + fmt(err) + " (tolerance 1e-12)"));
    }
    return rep;
}

VerifyReport suite_variance(std::uint64_t seed) {
    VerifyReport rep{"variance", {}};
    std::map<std::string, double> worst_ratio;  // observed / bound, max over draws
    for_each_small_case(seed, [&](NormKind kind, std::size_t d, int k, double bound, std::span<const double> w,
                                  std::span<const double> x, double y) {
        const auto mom = enumerate_gradient_moments(w, x, y, k, kind);
        const double limit = 8.0 * bound * bound * static_cast<double>(d) / k;
        const double observed =
            kind == NormKind::L2 ? mom.mean_squared_norm : *std::max_element(mom.second.begin(), mom.second.end());
        const std::string key = std::string(to_string(kind)) + " d=" + std::to_string(d) + " k=" + std::to_string(k);
        worst_ratio[key] = std::max(worst_ratio[key], observed / limit);
    });
    for (const auto& [key, ratio] : worst_ratio) {
        const bool l2 = key.rfind("l2", 0) == 0 || key.rfind("L2", 0) == 0;
        rep.checks.push_back(check_le(std::string(l2 ? "E||g~||^2" : "max_i E[g~_i^2]") + " <= 8B^2d/k, " + key,
                                      ratio, 1.0, "worst observed/bound ratio " + fmt(ratio)));
    }
    return rep;
}

VerifyReport suite_genest(std::uint64_t seed) {
    VerifyReport rep{"genest", {}};
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    constexpr std::size_t d = 5;
    constexpr int draws = 200000;
    std::uint64_t reads = 0;
    std::uint64_t calls = 0;
    for (int cfg = 0; cfg < 20; ++cfg) {
        const auto w = random_point(d, 1.0, NormKind::L2, rng, cfg % 2 == 1);
        const LabeledInstance inst(random_point(d, 1.0, NormKind::L2, rng, false), u(rng));
        const double target = std::erf(predict(w, inst) - inst.target());
        BudgetLedger ledger;
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int t = 0; t < draws; ++t) {
            const auto s = gen_est(w, inst, erf_taylor_coeff, 1.0, ledger, rng);
            sum += s.theta_hat;
            sum_sq += s.theta_hat * s.theta_hat;
        }
        reads += ledger.total();
        calls += draws;
        const double mean = sum / draws;
        const double se = std::sqrt(std::max(0.0, sum_sq / draws - mean * mean) / draws);
        rep.checks.push_back(check_le("config " + std::to_string(cfg) + ": |mean - erf(w.x - y)| <= 4 se",
                                      std::abs(mean - target), 4.0 * se,
                                      "mean " + fmt(mean) + ", erf " + fmt(target) + ", se " + fmt(se)));
    }
    const double mean_reads = static_cast<double>(reads) / static_cast<double>(calls);
    rep.checks.push_back(check_le("mean attribute reads per call <= 3", mean_reads, 3.0,
                                  "mean reads " + fmt(mean_reads) + " over " + std::to_string(calls) + " calls"));
    return rep;
}

VerifyReport suite_clip(std::uint64_t seed) {
    VerifyReport rep{"clip", {}};
    Rng rng(seed);
    std::uniform_int_distribution<int> support(1, 6);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int c = 0; c < 1000; ++c) {
        const int n = support(rng);
        std::vector<double> vals(static_cast<std::size_t>(n)), probs(static_cast<std::size_t>(n));
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            vals[static_cast<std::size_t>(i)] = value(rng) * (unit(rng) < 0.2 ? 10.0 : 1.0);
            probs[static_cast<std::size_t>(i)] = unit(rng) + 1e-3;
            total += probs[static_cast<std::size_t>(i)];
        }
        double mean = 0.0;
        for (int i = 0; i < n; ++i) {
            probs[static_cast<std::size_t>(i)] /= total;
            mean += probs[static_cast<std::size_t>(i)] * vals[static_cast<std::size_t>(i)];
        }
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dv = vals[static_cast<std::size_t>(i)] - mean;
            var += probs[static_cast<std::size_t>(i)] * dv * dv;
        }
        const double cap = 2.0 * std::abs(mean) * (1.0 + 3.0 * unit(rng)) + 1e-9;  // |E X| <= C/2
        const double bias = std::abs(clip_bias(vals, probs, cap));
        const double bound = 2.0 * var / cap + 1e-12;
        worst = std::min(worst, bound - bias);
        if (bias > bound) ++violations;
    }
    rep.checks.push_back(check_le("|E clip(X,C) - E X| <= 2 var(X)/C on 1000 distributions",
                                  static_cast<double>(violations), 0.0,
                                  std::to_string(violations) + " violations, smallest slack " + fmt(worst)));
    rep.checks.back().margin = worst;
    return rep;
}

VerifyReport suite_mwregret(std::uint64_t seed) {
    VerifyReport rep{"mwregret", {}};
    Rng rng(seed);
    std::uniform_int_distribution<int> experts(2, 6);
    std::uniform_int_distribution<int> rounds(1, 25);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t violations = 0;
    std::size_t disagreements = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int c = 0; c < 1000; ++c) {
        const auto n = static_cast<std::size_t>(experts(rng));
        const int T = rounds(rng);
        const double eta = 0.02 + unit(rng);
        std::uniform_real_distribution<double> cost(-1.0 / eta, 3.0);
        std::vector<std::vector<double>> costs(static_cast<std::size_t>(T), std::vector<double>(n));
        for (auto& row : costs) {
            for (double& v : row) v = cost(rng);
        }
        const auto lib = mw_second_order_bound(costs, eta);

        // Independent recursion: p_t[i] proportional to exp(-eta sum_{s<t} c_s[i]).
        std::vector<double> cum(n, 0.0);
        double lhs = 0.0;
        double second = 0.0;
        for (const auto& row : costs) {
            const double lo = *std::min_element(cum.begin(), cum.end());
            double z = 0.0;
            for (double v : cum) z += std::exp(-eta * (v - lo));
            for (std::size_t i = 0; i < n; ++i) {
                const double p = std::exp(-eta * (cum[i] - lo)) / z;
                lhs += p * row[i];
                second += p * row[i] * row[i];
            }
            for (std::size_t i = 0; i < n; ++i) cum[i] += row[i];
        }
        const double rhs =
            *std::min_element(cum.begin(), cum.end()) + std::log(static_cast<double>(n)) / eta + eta * second;
        const double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
        if (std::abs(lhs - lib.lhs) > 1e-9 * scale || std::abs(rhs - lib.rhs) > 1e-9 * scale) ++disagreements;
        worst = std::min(worst, rhs - lhs);
        if (lhs > rhs) ++violations;
    }
    rep.checks.push_back(check_le("regret <= log(n)/eta + eta sum p.c^2 on 1000 cases",
                                  static_cast<double>(violations), 0.0,
                                  std::to_string(violations) + " violations, smallest slack " + fmt(worst)));
    rep.checks.back().margin = worst;
    rep.checks.push_back(check_le("library recursion matches reference", static_cast<double>(disagreements), 0.0,
                                  std::to_string(disagreements) + " disagreements above 1e-9"));
    return rep;
}

VerifyReport suite_smoothing(std::uint64_t) {
    VerifyReport rep{"smoothing", {}};
    for (double eps : {0.1, 0.01}) {
        for (double delta : {0.0, 0.5}) {
            double worst = 0.0;
            for (int i = 0; i < 10000; ++i) {
                const double x = -10.0 + 20.0 * i / 9999.0;
                const double target = std::max(0.0, std::abs(x) - delta);
                worst = std::max(worst, std::abs(f_eps(x, delta, eps) - target));
            }
            rep.checks.push_back(check_le("max |f_eps - |x|_delta| <= eps, eps=" + fmt(eps) + " delta=" + fmt(delta),
                                          worst, eps));
        }
    }
    double series = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double x = -1.0 + i / 1000.0;
        series = std::max(series, std::abs(erf_taylor_partial(x, 41) - std::erf(x)));
    }
    rep.checks.push_back(check_le("truncated erf series (degree 41) vs erf on [-1, 1]", series, 1e-10));
    double deriv = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = -2.0 + i / 100.0;
        const double h = 1e-5;
        const double fd = (f_eps(x + h, 0.3, 0.2) - f_eps(x - h, 0.3, 0.2)) / (2 * h);
        deriv = std::max(deriv, std::abs(fd - f_eps_derivative(x, 0.3, 0.2)));
    }
    rep.checks.push_back(check_le("f_eps' matches central differences", deriv, 1e-6));
    return rep;
}

VerifyReport suite_budget(std::uint64_t seed) {
    VerifyReport rep{"budget", {}};
    for (Algorithm algo : {Algorithm::Aerr, Algorithm::Aelr}) {
        const auto geometry = algo == Algorithm::Aerr ? NormCertificate::L2 : NormCertificate::Linf;
        const auto data = synth_linear(12, 600, 4, 0.05, geometry, seed + 11).data;
        for (int k : {1, 2, 4}) {
            for (bool capped : {false, true}) {
                LearnerConfig c;
                c.k = k;
                c.seed = seed + static_cast<std::uint64_t>(k);
                c.record_steps = true;
                if (capped) c.attribute_budget = 1000 + 7 * static_cast<std::uint64_t>(k);
                const auto r = fit(algo, data, c);
                std::uint64_t expected = 0;
                for (const auto& s : r.steps) {
                    const bool zero = std::all_of(s.w.begin(), s.w.end(), [](double v) { return v == 0.0; });
                    expected += static_cast<std::uint64_t>(k) + (zero ? 0 : 1);
                }
                const std::string name = std::string(to_string(algo)) + " k=" + std::to_string(k) +
                                         (capped ? " capped" : "");
                auto diff = static_cast<double>(r.ledger_total > expected ? r.ledger_total - expected
                                                                          : expected - r.ledger_total);
                rep.checks.push_back(check_le(name + ": ledger = sum_t (k+1, or k at w=0)", diff, 0.0,
                                              "ledger " + std::to_string(r.ledger_total) + ", expected " +
                                                  std::to_string(expected)));
                if (capped) {
                    rep.checks.push_back(check_le(name + ": ledger <= cap", static_cast<double>(r.ledger_total),
                                                  static_cast<double>(*c.attribute_budget)));
                }
            }
        }
    }
    const auto data = synth_linear(10, 10000, 10, 0.1, NormCertificate::L2, seed + 23).data;
    for (int k : {1, 4}) {
        LearnerConfig c;
        c.k = k;
        c.seed = seed + 5;
        c.delta = 0.1;
        c.epsilon = 0.1;
        const auto r = aesvr_fit(data, c);
        const double mean = static_cast<double>(r.ledger_total) / static_cast<double>(r.examples_used);
        rep.checks.push_back(check_le("aesvr k=" + std::to_string(k) + ": mean reads per example <= k+6", mean,
                                      k + 6.0, "mean " + fmt(mean) + " over " + std::to_string(r.examples_used) +
                                                   " examples"));
    }
    return rep;
}

} // namespace

VerifyReport run_suite(const std::string& suite, std::uint64_t seed) {
    if (suite == "unbiased") return suite_unbiased(seed);
    if (suite == "variance") return suite_variance(seed);
    if (suite == "genest") return suite_genest(seed);
    if (suite == "clip") return suite_clip(seed);
    if (suite == "mwregret") return suite_mwregret(seed);
    if (suite == "smoothing") return suite_smoothing(seed);
    if (suite == "budget") return suite_budget(seed);
    throw ConfigError("unknown verify suite '" + suite +
                      "' (expected unbiased, variance, genest, clip, mwregret, smoothing or budget)");
}

} // namespace lao::harness
