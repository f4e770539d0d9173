#ifndef ADT_TRACE_IO_HPP
#define ADT_TRACE_IO_HPP

#include <string>

#include "adt/harness.hpp"

namespace adt::harness {

enum class TraceFormat { Rows, Document };

// Rows: delimited text, one row per step with flattened belief columns
// (header names the factor and state, e.g. d_delta_45_55). Document: JSON
// with the full per-step records. Both parse back with *_from_*.
std::string trace_to_rows(const TwinTrace& trace);
TwinTrace trace_from_rows(const std::string& text);

std::string trace_to_document(const TwinTrace& trace);
TwinTrace trace_from_document(const std::string& text);

std::string report_to_json(const ClusterReport& report);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace adt::harness

#endif
