#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hpm/error.hpp"

namespace hpm {

/// An activity label. Never empty and never the reserved silent label.
using Activity = std::string;

/// Activities of one event, outermost level first.
using Path = std::vector<Activity>;

/// A trace without event attributes; the unit of model languages.
using ActivityTrace = std::vector<Path>;

inline constexpr std::string_view kSilentLabel = "τ";

void check_activity(std::string_view name);

struct Event {
  Path path;
  std::map<std::string, std::string> attrs;

  Event() = default;
  explicit Event(Path p, std::map<std::string, std::string> a = {})
      : path(std::move(p)), attrs(std::move(a)) {}

  const std::string* attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? nullptr : &it->second;
  }
};

struct HierTrace {
  std::vector<Event> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
};

/// Multiset of hierarchical traces. Input order is preserved; multiset
/// comparisons go through `same_multiset`.
struct HierLog {
  std::vector<HierTrace> traces;

  std::size_t size() const { return traces.size(); }
  bool empty() const { return traces.empty(); }
};

struct LogStats {
  std::size_t traces = 0;
  std::size_t events = 0;
  std::size_t depth = 0;
  std::set<Activity> alphabet;
  double avg_trace_len = 0.0;
};

ActivityTrace shape(const HierTrace& trace);
HierTrace from_shape(const ActivityTrace& trace);
HierLog log_from_shapes(const std::vector<ActivityTrace>& traces);

/// Parses the dotted shorthand used in examples, e.g. "f.a f.g.b c".
/// Events are separated by whitespace or commas; "" is the empty trace.
/// The bracketed form written by to_shorthand is accepted too.
ActivityTrace parse_shorthand(std::string_view text);
std::string to_shorthand(const ActivityTrace& trace);

/// f.L: prefix every event path with `f`.
HierLog hier_concat(const Activity& f, const HierLog& log);

/// L⇂i: drop the first `i` activities of every event; events that run out
/// disappear, traces are kept even when they become empty.
HierLog project(const HierLog& log, std::size_t i);

/// Every event becomes a single activity: its path joined with `separator`.
HierLog flatten(const HierLog& log, std::string_view separator = ".");

std::size_t depth(const HierLog& log);
std::set<Activity> alphabet(const HierLog& log);
LogStats log_stats(const HierLog& log);

/// Order-insensitive comparison of the trace shapes (attributes ignored).
bool same_multiset(const HierLog& a, const HierLog& b);
std::map<ActivityTrace, std::size_t> multiset_of(const HierLog& log);

}  // namespace hpm
