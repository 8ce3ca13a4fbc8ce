#pragma once

#include <string>
#include <vector>

#include "lao/core_model.hpp"

namespace lao::harness {

inline constexpr const char* kTraceHeader = "example_index,cumulative_attributes,test_mse,train_loss_estimate";

/// Missing values are written as "nan".
void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path);
std::string format_trace_csv(const std::vector<TraceRecord>& trace);

/// Throws FormatError naming the line on a bad header or row.
std::vector<TraceRecord> read_trace_csv(const std::string& path);
std::vector<TraceRecord> parse_trace_csv(const std::string& text);

/// Shortest round-tripping decimal form; "nan" / "inf" / "-inf" for specials.
std::string format_number(double v);
/// Accepts what format_number writes. Throws FormatError.
double parse_number(const std::string& text);

} // namespace lao::harness
