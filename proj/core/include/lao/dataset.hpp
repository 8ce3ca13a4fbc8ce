#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lao/core_model.hpp"

namespace lao {

/// Which norm bound a dataset has been scaled to satisfy.
enum class NormCertificate { None, L2, Linf };

/// Ordered, immutable collection of instances sharing one dimension.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<LabeledInstance> instances, NormCertificate certificate = NormCertificate::None,
                     bool pixel_data = false);

    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }
    std::size_t dim() const noexcept { return dim_; }

    const LabeledInstance& operator[](std::size_t t) const { return instances_[t]; }
    auto begin() const noexcept { return instances_.begin(); }
    auto end() const noexcept { return instances_.end(); }

    NormCertificate norm_certificate() const noexcept { return certificate_; }
    /// Raw 0..255 pixel intensities (as loaded from IDX, before normalization).
    bool pixel_data() const noexcept { return pixel_data_; }
    /// max_t |y_t|
    double label_bound() const noexcept;

    Dataset subset(std::span<const std::size_t> indices) const;
    Dataset prefix(std::size_t n) const;

private:
    std::vector<LabeledInstance> instances_;
    std::size_t dim_ = 0;
    NormCertificate certificate_ = NormCertificate::None;
    bool pixel_data_ = false;
};

/// Largest ||x_t|| over the dataset in the given geometry (L2 or Linf).
double max_instance_norm(const Dataset& ds, NormCertificate geometry);

/// Full scan: every ||x_t|| <= 1 + 1e-12 in the requested geometry.
bool satisfies_certificate(const Dataset& ds, NormCertificate geometry);

/// Throws ConfigError unless ||x_t|| <= 1 in the norm matching `kind`
/// (L2 for NormKind::L2, Linf for NormKind::L1) and |y_t| <= bound for all t.
void require_normalized(const Dataset& ds, NormKind kind, double bound);

/// Scales attributes so the dataset satisfies `target`. Pixel data goes to
/// [0, 1] by x/255 under Linf; otherwise one global scale factor is used
/// (1 / max_t ||x_t||). Labels are left alone. A dataset already carrying a
/// verified certificate for `target` is returned unchanged.
Dataset normalize(const Dataset& ds, NormCertificate target);

/// Keeps instances whose raw label is pos_digit (-> +1) or neg_digit (-> -1).
Dataset make_binary_task(const Dataset& ds, int pos_digit, int neg_digit);

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

/// Seeded assignment of instance indices to folds; sizes differ by at most one.
struct FoldPlan {
    std::size_t fold_count = 0;
    std::vector<std::size_t> assignment;  // instance index -> fold id

    std::vector<std::size_t> validation_indices(std::size_t fold) const;
    std::vector<std::size_t> training_indices(std::size_t fold) const;
    std::vector<std::size_t> fold_sizes() const;
};

FoldPlan kfold(const Dataset& ds, std::size_t folds, std::uint64_t seed);

/// Random train/test split; the training part gets round(train_fraction * n)
/// instances, at least one on each side.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Reads an IDX image/label pair (big-endian headers, magic 2051 / 2049).
/// Images are flattened row-major into raw 0..255 values; targets are the raw
/// digit labels.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Writes raw pixel data and integer labels in IDX format. Attributes must be
/// integers in [0, 255]; rows * cols must equal the dimension.
void write_idx(const Dataset& ds, std::size_t rows, std::size_t cols, const std::filesystem::path& images,
               const std::filesystem::path& labels);

/// Comma-separated, '.' decimal, last column is the target, optional header row.
Dataset load_csv(const std::filesystem::path& path);
void write_csv(const Dataset& ds, const std::filesystem::path& path, bool header = true);

// ---------------------------------------------------------------------------
// Synthetic generators
// ---------------------------------------------------------------------------

struct SyntheticTask {
    Dataset data;
    std::vector<double> w_star;
};

/// Linear task y = w*.x + noise with `sparsity` nonzeros in w*.
/// L2: x uniform in the unit ball, ||w*||_2 = bound. Linf: x uniform in the
/// cube [-1, 1]^d, ||w*||_1 = bound. Targets are clamped to [-bound, bound].
SyntheticTask synth_linear(std::size_t d, std::size_t m, std::size_t sparsity, double noise_sd,
                           NormCertificate norm_target, std::uint64_t seed, double bound = 1.0);

/// Hard instance for attribute-efficient ridge regression: a hidden support T
/// of size ceil(1/eps^2) with Rademacher signs r_i; each example is (r_i e_i, 1)
/// for i uniform on T.
class LowerBoundGenerator {
public:
    LowerBoundGenerator(std::size_t d, double epsilon, std::uint64_t seed);

    std::size_t dim() const noexcept { return d_; }
    double epsilon() const noexcept { return epsilon_; }
    const std::vector<std::size_t>& support() const noexcept { return support_; }
    const std::vector<double>& signs() const noexcept { return signs_; }  // aligned with support()
    /// w* = sum_{i in T} eps r_i e_i; squared-loss risk 1/2 (1 - eps)^2.
    std::vector<double> w_star() const;

    LabeledInstance draw(Rng& rng) const;
    Dataset sample(std::size_t m, std::uint64_t seed) const;

private:
    std::size_t d_;
    double epsilon_;
    std::vector<std::size_t> support_;
    std::vector<double> signs_;
};

LowerBoundGenerator synth_lower_bound(std::size_t d, double epsilon, std::uint64_t seed);

/// Stand-in for MNIST "3" and "5" digits when the IDX files are unavailable:
/// 28x28 raw pixel images (0..255) with raw labels 3 and 5, drawn from two
/// stroke templates with random shifts, stroke widths and noise.
Dataset synth_digit_surrogate(std::size_t n, std::uint64_t seed);

} // namespace lao
