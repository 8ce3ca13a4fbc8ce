#include <charconv>
#include <cmath>
#include <filesystem>

#include "lao/errors.hpp"
#include "lao/harness/commands.hpp"

namespace lao::harness {

namespace {

std::pair<int, int> parse_task(const std::string& task) {
    const auto pos = task.find("vs");
    auto digit = [&](std::string_view s) {
        int v = -1;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v < 0 || v > 9) {
            throw ConfigError("bad task '" + task + "': expected <digit>vs<digit>, e.g. 3vs5");
        }
        return v;
    };
    if (pos == std::string::npos) throw ConfigError("bad task '" + task + "': expected <digit>vs<digit>, e.g. 3vs5");
    const std::string_view t(task);
    return {digit(t.substr(0, pos)), digit(t.substr(pos + 2))};
}

NormCertificate geometry_of(Algorithm algo) {
    return norm_kind_of(algo) == NormKind::L2 ? NormCertificate::L2 : NormCertificate::Linf;
}

} // namespace

Dataset load_source(const DataSource& s, double bound) {
    Dataset raw;
    if (s.source == "idx") {
        if (s.path.empty() || s.labels.empty()) throw ConfigError("idx data needs both --data and --labels");
        raw = load_idx(s.path, s.labels);
    } else if (s.source == "csv") {
        if (s.path.empty()) throw ConfigError("csv data needs --data");
        raw = load_csv(s.path);
    } else if (s.source == "synth") {
        if (s.generator == "linear") {
            NormCertificate g;
            if (s.geometry == "l2") {
                g = NormCertificate::L2;
            } else if (s.geometry == "linf") {
                g = NormCertificate::Linf;
            } else {
                throw ConfigError("unknown geometry '" + s.geometry + "' (expected l2 or linf)");
            }
            raw = synth_linear(s.d, s.m, s.sparsity == 0 ? s.d : s.sparsity, s.noise_sd, g, s.seed, bound).data;
        } else if (s.generator == "surrogate") {
            raw = synth_digit_surrogate(s.m, s.seed);
        } else if (s.generator == "lowerbound") {
            raw = synth_lower_bound(s.d, s.lb_epsilon, s.seed).sample(s.m, s.seed + 1);
        } else {
            throw ConfigError("unknown generator '" + s.generator + "' (expected linear, surrogate or lowerbound)");
        }
    } else {
        throw ConfigError("unknown data source '" + s.source + "' (expected idx, csv or synth)");
    }
    if (!s.task.empty()) {
        const auto [neg, pos] = parse_task(s.task);
        raw = make_binary_task(raw, pos, neg);
    }
    return raw;
}

std::pair<Dataset, Dataset> trial_split(const Dataset& raw, const ExperimentConfig& config, Algorithm algo,
                                        std::size_t trial) {
    const Dataset scaled = normalize(raw, geometry_of(algo));
    return split(scaled, config.data.train_fraction, trial_seed(config.seed, trial));
}

std::string trial_path(const std::string& out, std::size_t trial, std::size_t trials) {
    if (trials <= 1 || out.empty()) return out;
    const std::filesystem::path p(out);
    auto name = p.stem().string() + ".trial" + std::to_string(trial) + p.extension().string();
    return (p.parent_path() / name).string();
}

std::vector<std::string> cmd_synth(const ExperimentConfig& config, const std::string& format) {
    if (config.trace_out.empty()) throw ConfigError("synth needs --out");
    const Dataset ds = load_source(config.data, config.bound);
    if (format == "csv") {
        write_csv(ds, config.trace_out);
        return {config.trace_out};
    }
    if (format != "idx") throw ConfigError("unknown format '" + format + "' (expected idx or csv)");
    if (!ds.pixel_data()) throw ConfigError("idx output needs integer pixel data (use the surrogate generator)");
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(ds.dim()))));
    const std::size_t rows = side * side == ds.dim() ? side : 1;
    const std::string labels = config.trace_out + ".labels";
    write_idx(ds, rows, ds.dim() / rows, config.trace_out, labels);
    return {config.trace_out, labels};
}

} // namespace lao::harness
