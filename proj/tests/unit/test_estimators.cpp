#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lao/estimators.hpp"

using namespace lao;

TEST_CASE("sparse vectors") {
    SparseVector v{5, {1, 3}, {2.0, -1.0}};
    CHECK(v.nnz() == 2);
    CHECK(v.at(3) == -1.0);
    CHECK(v.at(0) == 0.0);
    CHECK(v.squared_norm() == 5.0);
    CHECK(v.to_dense() == std::vector<double>{0.0, 2.0, 0.0, -1.0, 0.0});
}

TEST_CASE("importance samplers") {
    const std::vector<double> w{0.0, 3.0, -4.0};
    const auto l2 = ImportanceSampler::l2(w);
    CHECK(l2.total_mass() == doctest::Approx(25.0));
    CHECK(l2.probability(0) == 0.0);
    CHECK(l2.probability(1) == doctest::Approx(9.0 / 25.0));
    CHECK(l2.probability(2) == doctest::Approx(16.0 / 25.0));
    const auto l1 = ImportanceSampler::l1(w);
    CHECK(l1.total_mass() == doctest::Approx(7.0));
    CHECK(l1.probability(2) == doctest::Approx(4.0 / 7.0));
    CHECK(ImportanceSampler::l2(std::vector<double>(3, 0.0)).empty());
    Rng rng(1);
    CHECK_THROWS_AS(ImportanceSampler::l1(std::vector<double>(2, 0.0)).sample(rng), InvalidInput);
    CHECK_THROWS_AS(ImportanceSampler::l2(std::vector<double>{1.0, NAN}), InvalidInput);
}

TEST_CASE("sampler frequencies match their probabilities") {
    const std::vector<double> w{0.5, -0.1, 0.0, 0.3, 0.8};
    for (const auto& s : {ImportanceSampler::l2(w), ImportanceSampler::l1(w)}) {
        Rng rng(11);
        constexpr int n = 200000;
        std::vector<int> count(w.size(), 0);
        for (int t = 0; t < n; ++t) ++count[s.sample(rng)];
        CHECK(count[2] == 0);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double p = s.probability(j);
            const double se = std::sqrt(p * (1 - p) / n);
            CHECK(std::abs(count[j] / double(n) - p) <= 4 * se + 1e-12);
        }
    }
}

TEST_CASE("x~ from explicit draws") {
    const LabeledInstance inst({1.0, 2.0, 3.0, 4.0}, 0.0);
    BudgetLedger ledger;
    const std::vector<std::size_t> draws{1, 3, 1};
    const auto xt = sparse_instance_from_draws(inst, draws, ledger);
    CHECK(ledger.total() == 3);
    // (1/k) sum_r d x[i_r] e_{i_r} with d = 4, k = 3
    CHECK(xt.to_dense() == std::vector<double>{0.0, 2 * 4 * 2.0 / 3, 0.0, 4 * 4.0 / 3});
    CHECK_THROWS_AS(sparse_instance_from_draws(inst, std::vector<std::size_t>{}, ledger), InvalidInput);
    Rng rng(2);
    CHECK_THROWS_AS(sample_sparse_instance(inst, 0, ledger, rng), InvalidInput);
}

TEST_CASE("sampled x~ is unbiased (Monte Carlo)") {
    const LabeledInstance inst({0.2, -0.5, 0.1}, 0.0);
    BudgetLedger ledger;
    Rng rng(5);
    constexpr int n = 100000;
    std::vector<double> sum(3, 0.0);
    for (int t = 0; t < n; ++t) {
        const auto xt = sample_sparse_instance(inst, 2, ledger, rng);
        for (std::size_t i = 0; i < xt.nnz(); ++i) sum[xt.index[i]] += xt.value[i];
    }
    CHECK(ledger.total() == 2u * n);
    const auto x = inst.attributes(unmetered);
    for (int i = 0; i < 3; ++i) CHECK(sum[i] / n == doctest::Approx(x[i]).epsilon(0.03));
}

TEST_CASE("residual estimates") {
    const std::vector<double> w{0.5, -0.25};
    const LabeledInstance inst({0.4, 0.6}, 0.1);
    BudgetLedger ledger;
    // ||w||^2 x_j / w_j - y
    CHECK(residual_l2_at(w, inst, 0, ledger) == doctest::Approx(0.3125 * 0.4 / 0.5 - 0.1));
    // ||w||_1 sign(w_j) x_j - y
    CHECK(residual_l1_at(w, inst, 1, ledger) == doctest::Approx(-0.75 * 0.6 - 0.1));
    CHECK(ledger.total() == 2);
    CHECK(residual_l2_at(w, inst, 0, ledger, {2.0, 0.7}) == doctest::Approx(0.3125 * 0.8 / 0.5 - 0.7));
    CHECK_THROWS_AS(residual_l2_at(std::vector<double>{0.0, 1.0}, inst, 0, ledger), InvalidInput);

    SUBCASE("zero regressor falls back to -y without reads") {
        BudgetLedger fresh;
        Rng rng(1);
        const std::vector<double> zero(2, 0.0);
        CHECK(residual_estimate_l2(zero, inst, fresh, rng) == -0.1);
        CHECK(residual_estimate_l1(zero, inst, fresh, rng) == -0.1);
        CHECK(fresh.total() == 0);
    }
    SUBCASE("one read per estimate otherwise") {
        BudgetLedger fresh;
        Rng rng(1);
        residual_estimate_l2(w, inst, fresh, rng);
        residual_estimate_l1(w, inst, fresh, rng);
        CHECK(fresh.total() == 2);
    }
}

TEST_CASE("gradient and clipping") {
    const SparseVector xt{3, {0, 2}, {2.0, -6.0}};
    const auto g = gradient_estimate(0.5, xt);
    CHECK(g.to_dense() == std::vector<double>{1.0, 0.0, -3.0});
    CHECK(clip_entries(g, 2.0).to_dense() == std::vector<double>{1.0, 0.0, -2.0});
}

TEST_CASE("GenEst product and degenerate draws") {
    CHECK(gen_est_product(0, 0.7, {}) == doctest::Approx(2 * 0.7));
    const std::vector<double> f{0.5, -2.0};
    CHECK(gen_est_product(2, 0.25, f) == doctest::Approx(8 * 0.25 * -1.0));
    // log-magnitude path: 2^61 a 0.5^60 = 2a
    const std::vector<double> halves(60, 0.5);
    CHECK(gen_est_product(60, 0.3, halves) == doctest::Approx(0.6).epsilon(1e-12));
    const std::vector<double> with_zero{1.0, 0.0};
    CHECK(gen_est_product(2, 1.0, with_zero) == 0.0);

    const std::vector<double> w{0.3, 0.4};
    const LabeledInstance inst({0.5, 0.5}, 0.2);
    BudgetLedger ledger;
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const auto s = gen_est(w, inst, [](int) { return 0.0; }, 1.0, ledger, rng);
        CHECK(s.theta_hat == 0.0);
        CHECK(s.attribute_reads == 0);
    }
    CHECK(ledger.total() == 0);
    CHECK_THROWS_AS(gen_est(w, inst, [](int) { return 1.0; }, 0.5, ledger, rng), InvalidInput);
}

TEST_CASE("GenEst is unbiased for the exponential series") {
    // f'(z) = e^z, a_n = 1/n!  (|a_n| <= 2^n).
    auto coeff = [](int n) { return std::exp(-std::lgamma(n + 1.0)); };
    const std::vector<double> w{0.3, -0.2, 0.5};
    const LabeledInstance inst({0.4, 0.1, -0.6}, 0.25);
    const double z = 0.3 * 0.4 - 0.2 * 0.1 - 0.5 * 0.6 - 0.25;
    BudgetLedger ledger;
    Rng rng(9);
    constexpr int n = 200000;
    double sum = 0.0, sq = 0.0;
    std::uint64_t reads = 0;
    for (int t = 0; t < n; ++t) {
        const auto s = gen_est(w, inst, coeff, 1.0, ledger, rng);
        CHECK(s.degree >= 0);
        reads += s.attribute_reads;
        sum += s.theta_hat;
        sq += s.theta_hat * s.theta_hat;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - std::exp(z)) <= 4 * se);
    CHECK(reads == ledger.total());
    CHECK(double(reads) / n <= 3.0);
}
