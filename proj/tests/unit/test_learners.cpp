#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lao/learners.hpp"

using namespace lao;

namespace {

LearnerConfig base(int k, std::uint64_t seed = 7) {
    LearnerConfig c;
    c.k = k;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("algorithm names") {
    for (auto a : {Algorithm::Aerr, Algorithm::Aelr, Algorithm::Aesvr, Algorithm::Ogd, Algorithm::Eg}) {
        CHECK(parse_algorithm(to_string(a)) == a);
    }
    CHECK_FALSE(parse_algorithm("lasso"));
    CHECK(norm_kind_of(Algorithm::Aelr) == NormKind::L1);
    CHECK(norm_kind_of(Algorithm::Eg) == NormKind::L1);
    CHECK(norm_kind_of(Algorithm::Aesvr) == NormKind::L2);
    CHECK(is_full_information(Algorithm::Ogd));
    CHECK_FALSE(is_full_information(Algorithm::Aerr));
}

TEST_CASE("default step sizes") {
    CHECK(default_eta_aerr(4, 100, 50) == doctest::Approx(std::sqrt(4.0 / (2 * 100 * 50))));
    CHECK(default_eta_aesvr(4, 100, 50) == doctest::Approx(default_eta_aerr(4, 100, 50)));
    CHECK(default_eta_aelr(2.0, 4, 100, 50) ==
          doctest::Approx(std::sqrt(4 * std::log(200.0) / (10.0 * 100 * 50)) / 4.0));
    CHECK(gradient_scale(2.0, 4, 100) == doctest::Approx(4.0 * std::sqrt(50.0)));
    // m must be at least log(2d)
    CHECK_THROWS_AS(default_eta_aelr(1.0, 1, 784, 7), ConfigError);
    CHECK_NOTHROW(default_eta_aelr(1.0, 1, 784, 8));

    auto c = base(2);
    c.eta = StepSize::automatic(3.0);
    CHECK(resolve_eta(Algorithm::Aerr, c, 10, 40) == doctest::Approx(3 * default_eta_aerr(2, 10, 40)));
    c.eta = StepSize::fixed(0.25);
    CHECK(resolve_eta(Algorithm::Aelr, c, 10, 40) == 0.25);
}

TEST_CASE("learners reject data that is not normalized") {
    const Dataset raw({LabeledInstance({3.0, 0.0}, 0.5), LabeledInstance({0.0, 1.0}, 0.1)});
    CHECK_THROWS_AS(aerr_fit(raw, base(1)), ConfigError);
    CHECK_THROWS_AS(aelr_fit(raw, base(1)), ConfigError);
    auto c = base(0);
    const auto task = synth_linear(5, 20, 5, 0.0, NormCertificate::L2, 1);
    CHECK_THROWS(aerr_fit(task.data, c));
}

TEST_CASE("runs are deterministic and iterates stay feasible") {
    const auto l2 = synth_linear(30, 400, 30, 0.05, NormCertificate::L2, 3);
    const auto linf = synth_linear(30, 400, 5, 0.05, NormCertificate::Linf, 3);
    for (auto algo : {Algorithm::Aerr, Algorithm::Aelr, Algorithm::Aesvr, Algorithm::Ogd, Algorithm::Eg}) {
        CAPTURE(to_string(algo));
        const auto& data = norm_kind_of(algo) == NormKind::L2 ? l2.data : linf.data;
        auto c = base(3);
        c.bound = 2.0;
        c.eta = StepSize::automatic(5.0);
        const auto a = fit(algo, data, c, &data);
        const auto b = fit(algo, data, c, &data);
        CHECK(a.w_bar == b.w_bar);
        CHECK(a.trace == b.trace);
        CHECK(a.examples_used == data.size());
        CHECK(a.max_norm_ratio <= 1.0 + 1e-12);
        CHECK(norm(a.w_bar, norm_kind_of(algo)) <= 2.0 * (1 + 1e-12));
        c.seed = 8;
        if (!is_full_information(algo)) CHECK(fit(algo, data, c).w_bar != a.w_bar);
    }
}

TEST_CASE("read accounting") {
    const auto task = synth_linear(12, 300, 12, 0.0, NormCertificate::L2, 4);
    const auto linf = synth_linear(12, 300, 12, 0.0, NormCertificate::Linf, 4);
    SUBCASE("AERR: k reads for x~ plus one for the residual unless w_t = 0") {
        const auto r = aerr_fit(task.data, base(3));
        CHECK(r.fallback_steps == 0);  // w_1 = B e_1 / 2
        CHECK(r.ledger_total == 300u * 4);
    }
    SUBCASE("AELR starts at w = 0 so its first step is free of the residual read") {
        const auto r = aelr_fit(linf.data, base(3));
        CHECK(r.fallback_steps >= 1);
        CHECK(r.ledger_total == 300u * 4 - r.fallback_steps);
    }
    SUBCASE("full-information baselines read everything") {
        CHECK(ogd_full_fit(task.data, base(1)).ledger_total == 300u * 12);
        CHECK(eg_full_fit(linf.data, base(1)).ledger_total == 300u * 12);
    }
    SUBCASE("test-set evaluation uses its own ledger") {
        const auto r = aerr_fit(task.data, base(2), &task.data);
        CHECK(r.ledger_total == 300u * 3);
        CHECK(r.evaluation_reads > 0);
    }
    SUBCASE("trace attributes are nondecreasing and end at the ledger total") {
        const auto r = aelr_fit(linf.data, base(2), &linf.data);
        REQUIRE(!r.trace.empty());
        CHECK(r.trace.front().example_index == 0);
        CHECK(r.trace.front().cumulative_attributes == 0);
        for (std::size_t i = 1; i < r.trace.size(); ++i) {
            CHECK(r.trace[i].cumulative_attributes >= r.trace[i - 1].cumulative_attributes);
            CHECK(r.trace[i].example_index > r.trace[i - 1].example_index);
        }
        CHECK(r.trace.back().cumulative_attributes == r.ledger_total);
        CHECK(r.trace.back().example_index == r.examples_used);
    }
}

TEST_CASE("attribute budget stops the run before the cap is crossed") {
    const auto task = synth_linear(10, 500, 10, 0.0, NormCertificate::L2, 5);
    auto c = base(4);
    c.attribute_budget = 103;
    const auto r = aerr_fit(task.data, c, &task.data);
    CHECK(r.ledger_total <= 103);
    CHECK(r.examples_used == 20);

    const auto linf = synth_linear(784, 100, 784, 0.0, NormCertificate::Linf, 5);
    auto e = base(1);
    e.attribute_budget = 62 * 784;
    const auto eg = eg_full_fit(linf.data, e);
    CHECK(eg.examples_used == 62);
    CHECK(eg.ledger_total == 62u * 784);
}

TEST_CASE("recorded steps reproduce the ledger and satisfy the OGD regret bound") {
    const auto task = synth_linear(8, 400, 8, 0.1, NormCertificate::L2, 6);
    auto c = base(2);
    c.record_steps = true;
    const auto r = aerr_fit(task.data, c);
    REQUIRE(r.steps.size() == 400);
    const auto check = ogd_regret_check(r.steps, task.w_star, r.eta, c.bound);
    CHECK(check.holds());
    // running average matches the recorded iterates
    std::vector<double> mean(8, 0.0);
    for (const auto& s : r.steps)
        for (std::size_t i = 0; i < 8; ++i) mean[i] += s.w[i] / 400.0;
    for (std::size_t i = 0; i < 8; ++i) CHECK(r.w_bar[i] == doctest::Approx(mean[i]).epsilon(1e-12));
}

TEST_CASE("with d = 1 the sampled learner coincides with full-information OGD") {
    // one attribute: x~ = x exactly and the residual estimate is exact when w != 0
    const auto task = synth_linear(1, 200, 1, 0.2, NormCertificate::L2, 9);
    auto c = base(1);
    c.eta = StepSize::fixed(0.1);
    const auto a = aerr_fit(task.data, c);
    const auto o = ogd_full_fit(task.data, c);
    REQUIRE(a.w_bar.size() == 1);
    CHECK(std::abs(a.w_bar[0] - o.w_bar[0]) <= 1e-12);
}

TEST_CASE("evaluation helpers") {
    const Dataset ds({LabeledInstance({1.0, 0.0}, 0.5), LabeledInstance({0.0, 1.0}, -1.0)});
    const std::vector<double> w{1.0, 1.0};
    CHECK(predict(w, ds[0]) == 1.0);
    CHECK(mean_squared_error(w, ds) == doctest::Approx((0.25 + 4.0) / 2));
    CHECK(mean_squared_error(w, ds) == doctest::Approx(2 * evaluate(w, ds, LossSpec::squared())));
    BudgetLedger ledger;
    evaluate(w, ds, LossSpec::delta_insensitive(0.1), &ledger);
    CHECK(ledger.total() == 4);
    CHECK(evaluate(w, ds, LossSpec::delta_insensitive(0.1)) == doctest::Approx((0.4 + 1.9) / 2));
}

TEST_CASE("learners reduce test error on a clean linear task") {
    const auto l2 = synth_linear(20, 20000, 20, 0.0, NormCertificate::L2, 10);
    const auto linf = synth_linear(20, 20000, 3, 0.0, NormCertificate::Linf, 10);
    const std::vector<double> zero(20, 0.0);
    for (auto algo : {Algorithm::Aerr, Algorithm::Aelr}) {
        CAPTURE(to_string(algo));
        const auto& t = norm_kind_of(algo) == NormKind::L2 ? l2 : linf;
        const auto r = fit(algo, t.data, base(4));
        CHECK(mean_squared_error(r.w_bar, t.data) < 0.75 * mean_squared_error(zero, t.data));
    }
}
