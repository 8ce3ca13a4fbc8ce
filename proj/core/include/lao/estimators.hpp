#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lao/core_model.hpp"

namespace lao {

/// Sparse vector with sorted, distinct indices.
struct SparseVector {
    std::size_t dim = 0;
    std::vector<std::size_t> index;
    std::vector<double> value;

    std::size_t nnz() const noexcept { return index.size(); }
    double at(std::size_t i) const noexcept;
    double squared_norm() const noexcept;
    std::vector<double> to_dense() const;
};

/// Importance distribution over coordinates of a regressor: proportional to
/// w[j]^2 (L2) or |w[j]| (L1). Empty when w = 0.
class ImportanceSampler {
public:
    static ImportanceSampler l2(std::span<const double> w);
    static ImportanceSampler l1(std::span<const double> w);

    bool empty() const noexcept { return total_ <= 0.0; }
    /// ||w||_2^2 for l2(), ||w||_1 for l1().
    double total_mass() const noexcept { return total_; }
    double probability(std::size_t j) const;
    std::size_t sample(Rng& rng) const;

private:
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

/// x~ = (1/k) sum_r d x[i_r] e_{i_r} for an explicit list of draws i_1..i_k.
/// Charges one read per draw, repeats included.
SparseVector sparse_instance_from_draws(const LabeledInstance& instance, std::span<const std::size_t> draws,
                                        BudgetLedger& ledger);

/// Draws k indices uniformly with replacement and builds x~; E[x~] = x.
SparseVector sample_sparse_instance(const LabeledInstance& instance, int k, BudgetLedger& ledger, Rng& rng);

/// Affine view of an instance for residual estimation: attributes are read as
/// x_scale * x[j], and `target` replaces y when set. AESVR queries x/eps and
/// (y +- delta)/eps through this.
struct ResidualView {
    double x_scale = 1.0;
    std::optional<double> target;
};

/// ||w||_2^2 x[j] / w[j] - y for a fixed coordinate j (one read).
double residual_l2_at(std::span<const double> w, const LabeledInstance& instance, std::size_t j,
                      BudgetLedger& ledger, const ResidualView& view = {});

/// ||w||_1 sign(w[j]) x[j] - y for a fixed coordinate j (one read).
double residual_l1_at(std::span<const double> w, const LabeledInstance& instance, std::size_t j,
                      BudgetLedger& ledger, const ResidualView& view = {});

/// Importance-sampled estimate of w.x - y with j ~ w[j]^2. Returns -y with no
/// read when w = 0.
double residual_estimate_l2(std::span<const double> w, const LabeledInstance& instance, BudgetLedger& ledger,
                            Rng& rng, const ResidualView& view = {});

/// Importance-sampled estimate of w.x - y with j ~ |w[j]|. Returns -y with no
/// read when w = 0.
double residual_estimate_l1(std::span<const double> w, const LabeledInstance& instance, BudgetLedger& ledger,
                            Rng& rng, const ResidualView& view = {});

/// g~ = theta~ x~, componentwise.
SparseVector gradient_estimate(double theta, const SparseVector& x_tilde);

/// Entrywise clip(g[i], c).
SparseVector clip_entries(const SparseVector& g, double c);

struct SparseGradientEstimate {
    SparseVector x_tilde;
    double theta_tilde = 0.0;
    SparseVector g_tilde;
    std::optional<SparseVector> g_bar;
};

/// Taylor coefficients n -> a_n of f'.
using TaylorCoefficients = std::function<double(int)>;

struct GenEstSample {
    int degree = 0;                  // sampled n
    std::vector<double> s_values;    // residual estimates s~_1..s~_n (empty when a_n = 0)
    double theta_hat = 0.0;          // 2^{n+1} a_n prod s~_r
    std::uint64_t attribute_reads = 0;
};

/// Unbiased estimate of f'(w.x - y) from the Taylor coefficients of f'.
/// Degree n is drawn with P[n] = 2^{-(n+1)}; each factor is one importance
/// sampled residual when n <= 2 log2 N, else the mean of N of them, with
/// N = ceil(4 b_eff^2). A zero coefficient skips all reads.
GenEstSample gen_est(std::span<const double> w, const LabeledInstance& instance, const TaylorCoefficients& coeffs,
                     double b_eff, BudgetLedger& ledger, Rng& rng, const ResidualView& view = {});

/// Exact product 2^{n+1} a_n prod s for the given factors, via log-magnitude
/// once n > 50.
double gen_est_product(int degree, double coefficient, std::span<const double> factors) noexcept;

} // namespace lao
