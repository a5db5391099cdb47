#include "hpm/log.hpp"

#include <algorithm>
#include <cctype>

namespace hpm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::MissingConceptName: return "MissingConceptName";
    case ErrorCode::UnbalancedLifecycle: return "UnbalancedLifecycle";
    case ErrorCode::MissingLifecycle: return "MissingLifecycle";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidActivity: return "InvalidActivity";
    case ErrorCode::UnboundRecursion: return "UnboundRecursion";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::UncoveredActivity: return "UncoveredActivity";
    case ErrorCode::RecursionNotRepresentable: return "RecursionNotRepresentable";
    case ErrorCode::CompletenessUnreachable: return "CompletenessUnreachable";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

void check_activity(std::string_view name) {
  if (name.empty()) throw Error(ErrorCode::InvalidActivity, "empty activity name");
  if (name == kSilentLabel) throw Error(ErrorCode::InvalidActivity, "reserved silent label");
}

ActivityTrace shape(const HierTrace& trace) {
  ActivityTrace out;
  out.reserve(trace.events.size());
  for (const auto& e : trace.events) out.push_back(e.path);
  return out;
}

HierTrace from_shape(const ActivityTrace& trace) {
  HierTrace out;
  out.events.reserve(trace.size());
  for (const auto& p : trace) out.events.emplace_back(p);
  return out;
}

HierLog log_from_shapes(const std::vector<ActivityTrace>& traces) {
  HierLog log;
  log.traces.reserve(traces.size());
  for (const auto& t : traces) log.traces.push_back(from_shape(t));
  return log;
}

ActivityTrace parse_shorthand(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.size() >= 2 && text.front() == '<' && text.back() == '>') text = text.substr(1, text.size() - 2);
  ActivityTrace trace;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    Path path;
    std::size_t start = 0;
    while (true) {
      auto dot = token.find('.', start);
      path.push_back(token.substr(start, dot - start));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    for (const auto& a : path) check_activity(a);
    trace.push_back(std::move(path));
    token.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return trace;
}

std::string to_shorthand(const ActivityTrace& trace) {
  std::string out = "<";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) out += ", ";
    for (std::size_t k = 0; k < trace[i].size(); ++k) {
      if (k) out += '.';
      out += trace[i][k];
    }
  }
  out += ">";
  return out;
}

HierLog hier_concat(const Activity& f, const HierLog& log) {
  HierLog out = log;
  for (auto& t : out.traces)
    for (auto& e : t.events) e.path.insert(e.path.begin(), f);
  return out;
}

HierLog project(const HierLog& log, std::size_t i) {
  HierLog out;
  out.traces.reserve(log.traces.size());
  for (const auto& t : log.traces) {
    HierTrace nt;
    for (const auto& e : t.events) {
      if (e.path.size() <= i) continue;
      Event ne(Path(e.path.begin() + static_cast<std::ptrdiff_t>(i), e.path.end()), e.attrs);
      nt.events.push_back(std::move(ne));
    }
    out.traces.push_back(std::move(nt));
  }
  return out;
}

HierLog flatten(const HierLog& log, std::string_view separator) {
  HierLog out = log;
  for (auto& t : out.traces) {
    for (auto& e : t.events) {
      std::string joined;
      for (std::size_t k = 0; k < e.path.size(); ++k) {
        if (k) joined += separator;
        joined += e.path[k];
      }
      e.path = Path{std::move(joined)};
    }
  }
  return out;
}

std::size_t depth(const HierLog& log) {
  std::size_t d = 0;
  for (const auto& t : log.traces)
    for (const auto& e : t.events) d = std::max(d, e.path.size());
  return d;
}

std::set<Activity> alphabet(const HierLog& log) {
  std::set<Activity> out;
  for (const auto& t : log.traces)
    for (const auto& e : t.events) out.insert(e.path.begin(), e.path.end());
  return out;
}

LogStats log_stats(const HierLog& log) {
  LogStats s;
  s.traces = log.traces.size();
  for (const auto& t : log.traces) s.events += t.events.size();
  s.depth = depth(log);
  s.alphabet = alphabet(log);
  s.avg_trace_len = s.traces ? static_cast<double>(s.events) / static_cast<double>(s.traces) : 0.0;
  return s;
}

std::map<ActivityTrace, std::size_t> multiset_of(const HierLog& log) {
  std::map<ActivityTrace, std::size_t> out;
  for (const auto& t : log.traces) ++out[shape(t)];
  return out;
}

bool same_multiset(const HierLog& a, const HierLog& b) { return multiset_of(a) == multiset_of(b); }

}  // namespace hpm
