#include "lao/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lao/errors.hpp"

namespace lao::harness {

using nlohmann::json;

namespace {

double parse_positive(const std::string& text, const char* what) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("bad ") + what + " '" + text + "': expected a positive number");
    }
    return v;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    const std::set<std::string> keys(known.begin(), known.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("wrong type for '" + std::string(key) + "' in " + where);
    }
}

StepSize read_eta(const json& v, const std::string& where) {
    if (v.is_number()) return StepSize::fixed(parse_positive(v.dump(), "eta"));
    if (v.is_string()) return parse_eta(v.get<std::string>());
    throw ConfigError("eta in " + where + " must be a number or a string");
}

json eta_json(const StepSize& eta) {
    if (eta.is_auto()) return format_eta(eta);
    return eta.value();
}

Algorithm read_algorithm(const json& v) {
    if (!v.is_string()) throw ConfigError("algorithm name must be a string");
    const auto name = v.get<std::string>();
    auto algo = parse_algorithm(name);
    if (!algo) throw ConfigError("unknown algorithm '" + name + "' (expected aerr, aelr, aesvr, ogd or eg)");
    return *algo;
}

AlgorithmEntry read_entry(const json& v) {
    AlgorithmEntry e;
    if (v.is_string()) {
        e.algorithm = read_algorithm(v);
        return e;
    }
    const std::string where = "algorithm entry";
    reject_unknown(v, {"algo", "k", "B", "eta"}, where);
    if (!v.contains("algo")) throw ConfigError("algorithm entry needs an 'algo' key");
    e.algorithm = read_algorithm(v.at("algo"));
    if (v.contains("k")) {
        int k = 0;
        read(v, "k", k, where);
        e.k = k;
    }
    if (v.contains("B")) {
        double b = 0.0;
        read(v, "B", b, where);
        e.bound = b;
    }
    if (v.contains("eta")) e.eta = read_eta(v.at("eta"), where);
    return e;
}

json entry_json(const AlgorithmEntry& e) {
    if (!e.k && !e.bound && !e.eta) return std::string(to_string(e.algorithm));
    json j = {{"algo", std::string(to_string(e.algorithm))}};
    if (e.k) j["k"] = *e.k;
    if (e.bound) j["B"] = *e.bound;
    if (e.eta) j["eta"] = eta_json(*e.eta);
    return j;
}

} // namespace

StepSize parse_eta(const std::string& text) {
    if (text == "auto") return StepSize::automatic();
    const std::string suffix = "*auto";
    if (text.size() > suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return StepSize::automatic(parse_positive(text.substr(0, text.size() - suffix.size()), "eta scale"));
    }
    return StepSize::fixed(parse_positive(text, "eta"));
}

std::string format_eta(const StepSize& eta) {
    std::ostringstream os;
    os.precision(17);
    if (!eta.is_auto()) {
        os << eta.value();
    } else if (eta.value() == 1.0) {
        os << "auto";
    } else {
        os << eta.value() << "*auto";
    }
    return os.str();
}

json to_json(const ExperimentConfig& c) {
    json algos = json::array();
    for (const auto& e : c.algorithms) algos.push_back(entry_json(e));
    json grid = json::array();
    for (const auto& e : c.eta_grid) grid.push_back(format_eta(e));
    const auto& s = c.data;
    return {
        {"algorithms", algos},
        {"k", c.k},
        {"B", c.bound},
        {"eta", eta_json(c.eta)},
        {"delta", c.delta},
        {"epsilon", c.epsilon},
        {"seed", c.seed},
        {"trials", c.trials},
        {"budget", c.attribute_budget ? json(*c.attribute_budget) : json(nullptr)},
        {"planned_examples", c.planned_examples},
        {"trace_every", c.trace_every},
        {"out", c.trace_out},
        {"eta_grid", grid},
        {"B_grid", c.bound_grid},
        {"folds", c.folds},
        {"checkpoints", c.checkpoints},
        {"plot", c.plot_out},
        {"data",
         {{"source", s.source},
          {"path", s.path},
          {"labels", s.labels},
          {"task", s.task},
          {"generator", s.generator},
          {"d", s.d},
          {"m", s.m},
          {"sparsity", s.sparsity},
          {"noise_sd", s.noise_sd},
          {"geometry", s.geometry},
          {"lb_epsilon", s.lb_epsilon},
          {"seed", s.seed},
          {"train_fraction", s.train_fraction}}},
    };
}

ExperimentConfig config_from_json(const json& doc) {
    const std::string where = "config";
    reject_unknown(doc,
                   {"algorithms", "k", "B", "eta", "delta", "epsilon", "seed", "trials", "budget", "planned_examples",
                    "trace_every", "out", "eta_grid", "B_grid", "folds", "checkpoints", "plot", "data"},
                   where);
    ExperimentConfig c;
    if (auto it = doc.find("algorithms"); it != doc.end()) {
        c.algorithms.clear();
        if (it->is_string()) {
            c.algorithms.push_back(read_entry(*it));
        } else if (it->is_array()) {
            for (const auto& v : *it) c.algorithms.push_back(read_entry(v));
        } else {
            throw ConfigError("'algorithms' must be a string or an array");
        }
    }
    read(doc, "k", c.k, where);
    read(doc, "B", c.bound, where);
    if (doc.contains("eta")) c.eta = read_eta(doc.at("eta"), where);
    read(doc, "delta", c.delta, where);
    read(doc, "epsilon", c.epsilon, where);
    read(doc, "seed", c.seed, where);
    read(doc, "trials", c.trials, where);
    if (auto it = doc.find("budget"); it != doc.end() && !it->is_null()) {
        std::uint64_t b = 0;
        read(doc, "budget", b, where);
        c.attribute_budget = b;
    }
    read(doc, "planned_examples", c.planned_examples, where);
    read(doc, "trace_every", c.trace_every, where);
    read(doc, "out", c.trace_out, where);
    if (auto it = doc.find("eta_grid"); it != doc.end()) {
        if (!it->is_array()) throw ConfigError("'eta_grid' must be an array");
        for (const auto& v : *it) c.eta_grid.push_back(read_eta(v, "eta_grid"));
    }
    read(doc, "B_grid", c.bound_grid, where);
    read(doc, "folds", c.folds, where);
    read(doc, "checkpoints", c.checkpoints, where);
    read(doc, "plot", c.plot_out, where);

    if (auto it = doc.find("data"); it != doc.end()) {
        const std::string dw = "data";
        reject_unknown(*it,
                       {"source", "path", "labels", "task", "generator", "d", "m", "sparsity", "noise_sd", "geometry",
                        "lb_epsilon", "seed", "train_fraction"},
                       dw);
        auto& s = c.data;
        read(*it, "source", s.source, dw);
        read(*it, "path", s.path, dw);
        read(*it, "labels", s.labels, dw);
        read(*it, "task", s.task, dw);
        read(*it, "generator", s.generator, dw);
        read(*it, "d", s.d, dw);
        read(*it, "m", s.m, dw);
        read(*it, "sparsity", s.sparsity, dw);
        read(*it, "noise_sd", s.noise_sd, dw);
        read(*it, "geometry", s.geometry, dw);
        read(*it, "lb_epsilon", s.lb_epsilon, dw);
        read(*it, "seed", s.seed, dw);
        read(*it, "train_fraction", s.train_fraction, dw);
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

LearnerConfig learner_config(const ExperimentConfig& config, const AlgorithmEntry& entry, std::size_t trial) {
    LearnerConfig lc;
    lc.k = entry.k.value_or(config.k);
    lc.bound = entry.bound.value_or(config.bound);
    lc.eta = entry.eta.value_or(config.eta);
    lc.delta = config.delta;
    lc.epsilon = config.epsilon;
    lc.seed = trial_seed(config.seed, trial);
    lc.planned_examples = config.planned_examples;
    lc.trace_every = config.trace_every;
    lc.attribute_budget = config.attribute_budget;
    return lc;
}

} // namespace lao::harness
