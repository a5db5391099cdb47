#pragma once

#include <iosfwd>
#include <string>

#include "hpm/log.hpp"

namespace hpm {

inline constexpr const char* kConceptName = "concept:name";
inline constexpr const char* kLifecycle = "lifecycle:transition";
inline constexpr const char* kTimestamp = "time:timestamp";

/// Reads the XES subset (log/trace/event, keyed attributes) into a depth-1 log.
/// Fails on the whole input: no partial result is returned.
HierLog parse_xes(std::istream& in);
HierLog parse_xes_string(const std::string& text);

/// Writes the same subset back. Hierarchical paths are joined with ".".
void write_xes(std::ostream& out, const HierLog& log);

/// CSV with a header row; `case` and `activity` columns are required,
/// `lifecycle` and `timestamp` are mapped onto their XES keys, any other
/// column is kept as an opaque attribute. Traces appear in order of first
/// occurrence of their case id.
HierLog parse_csv(std::istream& in);

/// Dispatches on the file extension (.csv, anything else is XES).
HierLog read_log_file(const std::string& path);

}  // namespace hpm
