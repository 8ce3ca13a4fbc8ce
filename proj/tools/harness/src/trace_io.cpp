#include "lao/harness/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lao/errors.hpp"

namespace lao::harness {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T parse_integer(const std::string& text, std::size_t line) {
    T v{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw FormatError("trace line " + std::to_string(line) + ": bad integer '" + text + "'");
    }
    return v;
}

} // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_number(const std::string& text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) throw FormatError("bad number '" + text + "'");
    return v;
}

std::string format_trace_csv(const std::vector<TraceRecord>& trace) {
    std::string out = std::string(kTraceHeader) + "\n";
    for (const auto& r : trace) {
        out += std::to_string(r.example_index) + "," + std::to_string(r.cumulative_attributes) + "," +
               format_number(r.test_error) + "," + format_number(r.train_loss_estimate) + "\n";
    }
    return out;
}

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << format_trace_csv(trace);
    if (!out) throw ConfigError("write to " + path + " failed");
}

std::vector<TraceRecord> parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
        throw FormatError("trace line 1: expected header '" + std::string(kTraceHeader) + "'");
    }
    std::vector<TraceRecord> trace;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 4) {
            throw FormatError("trace line " + std::to_string(n) + ": expected 4 fields, got " +
                              std::to_string(f.size()));
        }
        TraceRecord r;
        r.example_index = parse_integer<std::size_t>(f[0], n);
        r.cumulative_attributes = parse_integer<std::uint64_t>(f[1], n);
        try {
            r.test_error = parse_number(f[2]);
            r.train_loss_estimate = parse_number(f[3]);
        } catch (const FormatError& e) {
            throw FormatError("trace line " + std::to_string(n) + ": " + e.what());
        }
        trace.push_back(r);
    }
    return trace;
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace_csv(ss.str());
}

} // namespace lao::harness
