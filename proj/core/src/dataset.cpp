#include "lao/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>

namespace lao {

namespace {

constexpr double kCertificateSlack = 1e-12;
constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

double instance_norm(const LabeledInstance& inst, NormCertificate geometry) {
    const auto x = inst.attributes(unmetered);
    return geometry == NormCertificate::L2 ? l2_norm(x) : linf_norm(x);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const std::string& what) {
    if (offset + 4 > bytes.size()) {
        throw FormatError(what + ": truncated header at offset " + std::to_string(offset));
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                           static_cast<char>(v)};
    out.write(bytes, 4);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& field, double& out) {
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

// ---------------------------------------------------------------------------

Dataset::Dataset(std::vector<LabeledInstance> instances, NormCertificate certificate, bool pixel_data)
    : instances_(std::move(instances)), certificate_(certificate), pixel_data_(pixel_data) {
    if (!instances_.empty()) {
        dim_ = instances_.front().dim();
        for (const auto& inst : instances_) {
            if (inst.dim() != dim_) throw InvalidInput("all instances of a dataset must share one dimension");
        }
    }
    if (certificate_ != NormCertificate::None && !satisfies_certificate(*this, certificate_)) {
        throw ConfigError("dataset does not satisfy its claimed norm certificate");
    }
}

double Dataset::label_bound() const noexcept {
    double b = 0.0;
    for (const auto& inst : instances_) b = std::max(b, std::abs(inst.target()));
    return b;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<LabeledInstance> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= instances_.size()) throw InvalidInput("subset index out of range");
        out.push_back(instances_[i]);
    }
    Dataset ds;
    ds.instances_ = std::move(out);
    ds.dim_ = dim_;
    ds.certificate_ = certificate_;  // scaling properties survive sub-selection
    ds.pixel_data_ = pixel_data_;
    return ds;
}

Dataset Dataset::prefix(std::size_t n) const {
    std::vector<std::size_t> idx(std::min(n, instances_.size()));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return subset(idx);
}

double max_instance_norm(const Dataset& ds, NormCertificate geometry) {
    if (geometry == NormCertificate::None) throw InvalidInput("no geometry given");
    double m = 0.0;
    for (const auto& inst : ds) m = std::max(m, instance_norm(inst, geometry));
    return m;
}

bool satisfies_certificate(const Dataset& ds, NormCertificate geometry) {
    if (geometry == NormCertificate::None) return true;
    for (const auto& inst : ds) {
        if (!(instance_norm(inst, geometry) <= 1.0 + kCertificateSlack)) return false;
    }
    return true;
}

void require_normalized(const Dataset& ds, NormKind kind, double bound) {
    if (ds.empty()) throw ConfigError("training set is empty");
    const auto geometry = kind == NormKind::L2 ? NormCertificate::L2 : NormCertificate::Linf;
    if (!satisfies_certificate(ds, geometry)) {
        throw ConfigError(std::string("data is not normalized: need every ") +
                          (kind == NormKind::L2 ? "||x||_2" : "||x||_inf") + " <= 1 (run normalize first)");
    }
    if (ds.label_bound() > bound * (1.0 + kCertificateSlack)) {
        throw ConfigError("targets exceed the norm bound B: max|y| = " + std::to_string(ds.label_bound()) +
                          " > B = " + std::to_string(bound));
    }
}

Dataset normalize(const Dataset& ds, NormCertificate target) {
    if (target == NormCertificate::None) throw InvalidInput("normalize needs a target geometry");
    if (ds.empty()) throw ConfigError("cannot normalize an empty dataset");
    if (ds.norm_certificate() == target && satisfies_certificate(ds, target)) return ds;

    double scale = 0.0;
    if (target == NormCertificate::Linf && ds.pixel_data()) {
        scale = 1.0 / 255.0;
    } else {
        const double m = max_instance_norm(ds, target);
        if (m == 0.0) throw ConfigError("cannot normalize an all-zero dataset");
        scale = 1.0 / m;
    }

    std::vector<LabeledInstance> out;
    out.reserve(ds.size());
    for (const auto& inst : ds) {
        const auto x = inst.attributes(unmetered);
        std::vector<double> scaled(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = x[i] * scale;
        out.emplace_back(std::move(scaled), inst.target());
    }
    if (target == NormCertificate::Linf && ds.pixel_data()) {
        bool any_nonzero = false;
        for (const auto& inst : out) any_nonzero = any_nonzero || linf_norm(inst.attributes(unmetered)) > 0.0;
        if (!any_nonzero) throw ConfigError("cannot normalize an all-zero dataset");
    }
    return Dataset(std::move(out), target, false);
}

Dataset make_binary_task(const Dataset& ds, int pos_digit, int neg_digit) {
    if (pos_digit < 0 || pos_digit > 9 || neg_digit < 0 || neg_digit > 9) {
        throw ConfigError("digits must be in 0..9");
    }
    if (pos_digit == neg_digit) throw ConfigError("positive and negative digits must differ");
    std::vector<LabeledInstance> out;
    for (const auto& inst : ds) {
        const double y = inst.target();
        if (y == pos_digit || y == neg_digit) {
            const auto x = inst.attributes(unmetered);
            out.emplace_back(std::vector<double>(x.begin(), x.end()), y == pos_digit ? 1.0 : -1.0);
        }
    }
    if (out.empty()) {
        throw ConfigError("no instances labelled " + std::to_string(pos_digit) + " or " + std::to_string(neg_digit));
    }
    return Dataset(std::move(out), ds.norm_certificate(), ds.pixel_data());
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> FoldPlan::validation_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::training_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
    std::vector<std::size_t> sizes(fold_count, 0);
    for (std::size_t f : assignment) ++sizes[f];
    return sizes;
}

FoldPlan kfold(const Dataset& ds, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("need at least 2 folds");
    if (folds > ds.size()) {
        throw ConfigError("cannot make " + std::to_string(folds) + " folds from " + std::to_string(ds.size()) +
                          " instances");
    }
    std::vector<std::size_t> perm(ds.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    FoldPlan plan;
    plan.fold_count = folds;
    plan.assignment.assign(ds.size(), 0);
    for (std::size_t r = 0; r < perm.size(); ++r) plan.assignment[perm[r]] = r % folds;
    return plan;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (ds.size() < 2) throw ConfigError("need at least 2 instances to split");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must be in (0, 1)");
    std::vector<std::size_t> perm(ds.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, ds.size() - 1);
    const std::span<const std::size_t> all(perm);
    return {ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train))};
}

// ---------------------------------------------------------------------------

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
    const auto img = read_file(images);
    const auto lab = read_file(labels);
    const std::string img_name = "IDX images " + images.string();
    const std::string lab_name = "IDX labels " + labels.string();

    const auto img_magic = read_be32(img, 0, img_name);
    if (img_magic != kIdxImagesMagic) {
        throw FormatError(img_name + ": bad magic " + std::to_string(img_magic) + " at offset 0 (expected 2051)");
    }
    const auto lab_magic = read_be32(lab, 0, lab_name);
    if (lab_magic != kIdxLabelsMagic) {
        throw FormatError(lab_name + ": bad magic " + std::to_string(lab_magic) + " at offset 0 (expected 2049)");
    }

    const std::size_t count = read_be32(img, 4, img_name);
    const std::size_t rows = read_be32(img, 8, img_name);
    const std::size_t cols = read_be32(img, 12, img_name);
    const std::size_t label_count = read_be32(lab, 4, lab_name);
    if (count != label_count) {
        throw FormatError("IDX count mismatch at offset 4: " + std::to_string(count) + " images vs " +
                          std::to_string(label_count) + " labels");
    }
    const std::size_t d = rows * cols;
    if (d == 0) throw FormatError(img_name + ": zero image size at offset 8");

    constexpr std::size_t img_header = 16;
    constexpr std::size_t lab_header = 8;
    if (img.size() < img_header + count * d) {
        throw FormatError(img_name + ": truncated at offset " + std::to_string(img.size()) + " (expected " +
                          std::to_string(img_header + count * d) + " bytes)");
    }
    if (lab.size() < lab_header + count) {
        throw FormatError(lab_name + ": truncated at offset " + std::to_string(lab.size()) + " (expected " +
                          std::to_string(lab_header + count) + " bytes)");
    }

    std::vector<LabeledInstance> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const auto* px = img.data() + img_header + t * d;
        std::vector<double> x(px, px + d);
        out.emplace_back(std::move(x), static_cast<double>(lab[lab_header + t]));
    }
    return Dataset(std::move(out), NormCertificate::None, true);
}

void write_idx(const Dataset& ds, std::size_t rows, std::size_t cols, const std::filesystem::path& images,
               const std::filesystem::path& labels) {
    if (rows * cols != ds.dim()) throw InvalidInput("rows * cols must equal the dataset dimension");
    std::ofstream img(images, std::ios::binary);
    std::ofstream lab(labels, std::ios::binary);
    if (!img || !lab) throw FormatError("cannot open IDX output files");
    write_be32(img, kIdxImagesMagic);
    write_be32(img, static_cast<std::uint32_t>(ds.size()));
    write_be32(img, static_cast<std::uint32_t>(rows));
    write_be32(img, static_cast<std::uint32_t>(cols));
    write_be32(lab, kIdxLabelsMagic);
    write_be32(lab, static_cast<std::uint32_t>(ds.size()));
    for (const auto& inst : ds) {
        for (double v : inst.attributes(unmetered)) {
            if (v < 0.0 || v > 255.0 || v != std::floor(v)) throw InvalidInput("IDX pixels must be integers in 0..255");
            img.put(static_cast<char>(static_cast<std::uint8_t>(v)));
        }
        const double y = inst.target();
        if (y < 0.0 || y > 255.0 || y != std::floor(y)) throw InvalidInput("IDX labels must be integers in 0..255");
        lab.put(static_cast<char>(static_cast<std::uint8_t>(y)));
    }
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<LabeledInstance> out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], values[i]);
        if (!numeric) {
            if (out.empty() && width == 0) {
                width = fields.size();  // header row
                continue;
            }
            throw FormatError(path.string() + ": non-numeric field on line " + std::to_string(line_no));
        }
        if (values.size() < 2) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no) + " needs at least 2 columns");
        }
        if (width == 0) width = values.size();
        if (values.size() != width) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no) + " has " +
                              std::to_string(values.size()) + " columns, expected " + std::to_string(width));
        }
        const double y = values.back();
        values.pop_back();
        out.emplace_back(std::move(values), y);
    }
    if (out.empty()) throw FormatError(path.string() + ": no data rows");
    return Dataset(std::move(out));
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, bool header) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.precision(17);
    if (header) {
        for (std::size_t i = 0; i < ds.dim(); ++i) out << 'x' << i << ',';
        out << "y\n";
    }
    for (const auto& inst : ds) {
        for (double v : inst.attributes(unmetered)) out << v << ',';
        out << inst.target() << '\n';
    }
}

} // namespace lao
