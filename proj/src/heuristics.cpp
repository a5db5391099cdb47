#include "hpm/heuristics.hpp"

#include <memory>

#include "hpm/xes.hpp"

namespace hpm {

namespace {

void require_flat(const HierLog& log, const char* what) {
  for (const auto& t : log.traces)
    for (const auto& e : t.events)
      if (e.path.size() != 1)
        throw Error(ErrorCode::InvalidConfig, std::string(what) + " expects a depth-1 log");
}

struct Interval {
  Activity activity;
  std::size_t start_pos = 0;
  std::string start_time;
  std::string end_time;
  std::vector<std::unique_ptr<Interval>> children;
};

void emit_leaves(const Interval& node, Path& stack, HierTrace& out) {
  stack.push_back(node.activity);
  if (node.children.empty()) {
    Event e(stack);
    if (!node.start_time.empty()) e.attrs[kStartTime] = node.start_time;
    if (!node.end_time.empty()) e.attrs[kCompleteTime] = node.end_time;
    out.events.push_back(std::move(e));
  } else {
    for (const auto& c : node.children) emit_leaves(*c, stack, out);
  }
  stack.pop_back();
}

}  // namespace

void HeuristicConfig::validate() const {
  if (kind == HeuristicKind::StructuredNames && separator.empty())
    throw Error(ErrorCode::InvalidConfig, "structured_names needs a non-empty separator");
  if (kind == HeuristicKind::AttributeCombination && attr_keys.empty())
    throw Error(ErrorCode::InvalidConfig, "attribute_combination needs at least one attribute key");
}

HierLog nested_calls(const HierLog& log) {
  require_flat(log, "nested_calls");
  HierLog out;
  out.traces.reserve(log.traces.size());
  for (std::size_t ti = 0; ti < log.traces.size(); ++ti) {
    const auto& trace = log.traces[ti];
    std::vector<std::unique_ptr<Interval>> roots;
    std::vector<Interval*> open;
    for (std::size_t pos = 0; pos < trace.events.size(); ++pos) {
      const Event& e = trace.events[pos];
      const std::string* lc = e.attr(kLifecycle);
      auto where = "trace " + std::to_string(ti) + ", position " + std::to_string(pos);
      if (!lc) throw Error(ErrorCode::MissingLifecycle, where);
      const std::string* ts = e.attr(kTimestamp);
      if (*lc == "start") {
        auto node = std::make_unique<Interval>();
        node->activity = e.path.front();
        node->start_pos = pos;
        if (ts) node->start_time = *ts;
        Interval* raw = node.get();
        if (open.empty()) roots.push_back(std::move(node));
        else open.back()->children.push_back(std::move(node));
        open.push_back(raw);
      } else if (*lc == "complete") {
        if (open.empty())
          throw Error(ErrorCode::UnbalancedLifecycle, where + ": complete of '" + e.path.front() + "' without start");
        if (open.back()->activity != e.path.front())
          throw Error(ErrorCode::UnbalancedLifecycle, where + ": complete of '" + e.path.front() +
                                                          "' while '" + open.back()->activity + "' is innermost");
        if (ts) open.back()->end_time = *ts;
        open.pop_back();
      } else {
        throw Error(ErrorCode::MissingLifecycle, where + ": unsupported transition '" + *lc + "'");
      }
    }
    if (!open.empty())
      throw Error(ErrorCode::UnbalancedLifecycle, "trace " + std::to_string(ti) + ", position " +
                                                      std::to_string(open.back()->start_pos) + ": '" +
                                                      open.back()->activity + "' never completes");
    HierTrace nt;
    Path stack;
    for (const auto& r : roots) emit_leaves(*r, stack, nt);
    out.traces.push_back(std::move(nt));
  }
  return out;
}

HierLog structured_names(const HierLog& log, const std::string& separator) {
  if (separator.empty()) throw Error(ErrorCode::InvalidConfig, "empty separator");
  require_flat(log, "structured_names");
  HierLog out = log;
  for (std::size_t ti = 0; ti < out.traces.size(); ++ti) {
    for (std::size_t ei = 0; ei < out.traces[ti].events.size(); ++ei) {
      auto& e = out.traces[ti].events[ei];
      const std::string name = e.path.front();
      Path path;
      std::size_t start = 0;
      while (true) {
        auto hit = name.find(separator, start);
        auto segment = name.substr(start, hit == std::string::npos ? std::string::npos : hit - start);
        if (segment.empty())
          throw Error(ErrorCode::EmptySegment, "trace " + std::to_string(ti) + ", event " + std::to_string(ei) +
                                                   ": '" + name + "'");
        path.push_back(std::move(segment));
        if (hit == std::string::npos) break;
        start = hit + separator.size();
      }
      e.path = std::move(path);
    }
  }
  return out;
}

HierLog attribute_combination(const HierLog& log, const std::vector<std::string>& attr_keys) {
  require_flat(log, "attribute_combination");
  HierLog out = log;
  for (std::size_t ti = 0; ti < out.traces.size(); ++ti) {
    for (std::size_t ei = 0; ei < out.traces[ti].events.size(); ++ei) {
      auto& e = out.traces[ti].events[ei];
      Path path;
      for (const auto& key : attr_keys) {
        const std::string* v = e.attr(key);
        if (!v || v->empty())
          throw Error(ErrorCode::MissingAttribute, "trace " + std::to_string(ti) + ", event " +
                                                       std::to_string(ei) + ": key '" + key + "'");
        path.push_back(*v);
      }
      path.push_back(e.path.front());
      e.path = std::move(path);
    }
  }
  return out;
}

HierLog apply_heuristic(const HierLog& log, const HeuristicConfig& config) {
  config.validate();
  switch (config.kind) {
    case HeuristicKind::None: return log;
    case HeuristicKind::NestedCalls: return nested_calls(log);
    case HeuristicKind::StructuredNames: return structured_names(log, config.separator);
    case HeuristicKind::AttributeCombination: return attribute_combination(log, config.attr_keys);
  }
  return log;
}

HeuristicKind parse_heuristic_kind(const std::string& text) {
  if (text == "none") return HeuristicKind::None;
  if (text == "nested-calls" || text == "nested_calls") return HeuristicKind::NestedCalls;
  if (text == "structured-names" || text == "structured_names") return HeuristicKind::StructuredNames;
  if (text == "attribute-combination" || text == "attribute_combination")
    return HeuristicKind::AttributeCombination;
  throw Error(ErrorCode::InvalidConfig, "unknown heuristic '" + text + "'");
}

std::string to_string(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::None: return "none";
    case HeuristicKind::NestedCalls: return "nested_calls";
    case HeuristicKind::StructuredNames: return "structured_names";
    case HeuristicKind::AttributeCombination: return "attribute_combination";
  }
  return "none";
}

}  // namespace hpm
