#pragma once

#include <string>
#include <vector>

#include "hpm/log.hpp"

namespace hpm {

enum class HeuristicKind { None, NestedCalls, StructuredNames, AttributeCombination };

struct HeuristicConfig {
  HeuristicKind kind = HeuristicKind::None;
  std::string separator = ".";
  std::vector<std::string> attr_keys;

  void validate() const;
};

/// Attribute keys carrying the interval bounds on nested-calls output events.
inline constexpr const char* kStartTime = "time:start";
inline constexpr const char* kCompleteTime = "time:complete";

/// Rebuilds call stacks from start/complete pairs. Each innermost interval
/// becomes one event whose path runs from its outermost enclosing interval
/// down to itself; events are ordered by interval start.
HierLog nested_calls(const HierLog& log);

/// Splits every activity name on `separator` ("p.C.m()" -> <p, C, m()>).
HierLog structured_names(const HierLog& log, const std::string& separator = ".");

/// Path = <attrs[k1], ..., attrs[kn], activity>.
HierLog attribute_combination(const HierLog& log, const std::vector<std::string>& attr_keys);

HierLog apply_heuristic(const HierLog& log, const HeuristicConfig& config);

HeuristicKind parse_heuristic_kind(const std::string& text);
std::string to_string(HeuristicKind kind);

}  // namespace hpm
