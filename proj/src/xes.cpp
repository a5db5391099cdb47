#include "hpm/xes.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace hpm {

namespace pt = boost::property_tree;

namespace {

// Keyed attribute elements: <string key=".." value=".."/>, <date ...>, ...
void read_attribute(const pt::ptree& node, std::map<std::string, std::string>& attrs) {
  auto xml = node.get_child_optional("<xmlattr>");
  if (!xml) return;
  auto key = xml->get_optional<std::string>("key");
  auto value = xml->get_optional<std::string>("value");
  if (!key) return;
  attrs[*key] = value ? *value : std::string{};
}

Event read_event(const pt::ptree& node, std::size_t trace_index, std::size_t event_index) {
  std::map<std::string, std::string> attrs;
  for (const auto& [tag, child] : node) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    read_attribute(child, attrs);
  }
  auto it = attrs.find(kConceptName);
  if (it == attrs.end() || it->second.empty()) {
    throw Error(ErrorCode::MissingConceptName, "trace " + std::to_string(trace_index) + ", event " +
                                                   std::to_string(event_index));
  }
  check_activity(it->second);
  Path path{it->second};
  attrs.erase(it);
  return Event(std::move(path), std::move(attrs));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// RFC-4180 record splitter; returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool field_started_quoted = false;
  while (true) {
    int ch = in.get();
    if (ch == std::char_traits<char>::eof()) {
      if (quoted) throw Error(ErrorCode::MalformedCsv, "unterminated quote near line " + std::to_string(line));
      fields.push_back(std::move(field));
      return true;
    }
    char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_started_quoted)
        throw Error(ErrorCode::MalformedCsv, "stray quote on line " + std::to_string(line));
      quoted = true;
      field_started_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
}

}  // namespace

HierLog parse_xes(std::istream& in) {
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedXml, e.what());
  }
  auto root = doc.get_child_optional("log");
  if (!root) throw Error(ErrorCode::MalformedXml, "root element <log> not found");

  HierLog log;
  std::size_t trace_index = 0;
  for (const auto& [tag, trace_node] : *root) {
    if (tag != "trace") continue;
    HierTrace trace;
    std::size_t event_index = 0;
    for (const auto& [etag, event_node] : trace_node) {
      if (etag != "event") continue;
      trace.events.push_back(read_event(event_node, trace_index, event_index++));
    }
    log.traces.push_back(std::move(trace));
    ++trace_index;
  }
  return log;
}

HierLog parse_xes_string(const std::string& text) {
  std::istringstream in(text);
  return parse_xes(in);
}

void write_xes(std::ostream& out, const HierLog& log) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<log xes.version=\"1.0\">\n";
  std::size_t index = 0;
  for (const auto& t : log.traces) {
    out << "  <trace>\n";
    out << "    <string key=\"concept:name\" value=\"" << index++ << "\"/>\n";
    for (const auto& e : t.events) {
      std::string name;
      for (std::size_t k = 0; k < e.path.size(); ++k) {
        if (k) name += '.';
        name += e.path[k];
      }
      out << "    <event>\n";
      out << "      <string key=\"concept:name\" value=\"" << xml_escape(name) << "\"/>\n";
      for (const auto& [key, value] : e.attrs) {
        const char* element = key == kTimestamp ? "date" : "string";
        out << "      <" << element << " key=\"" << xml_escape(key) << "\" value=\"" << xml_escape(value)
            << "\"/>\n";
      }
      out << "    </event>\n";
    }
    out << "  </trace>\n";
  }
  out << "</log>\n";
}

HierLog parse_csv(std::istream& in) {
  std::vector<std::string> header;
  std::size_t line = 1;
  if (!read_csv_record(in, header, line)) throw Error(ErrorCode::MalformedCsv, "missing header row");
  int case_col = -1, activity_col = -1;
  std::vector<std::string> keys(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h == "case") case_col = static_cast<int>(i);
    else if (h == "activity") activity_col = static_cast<int>(i);
    else if (h == "lifecycle") keys[i] = kLifecycle;
    else if (h == "timestamp") keys[i] = kTimestamp;
    else keys[i] = h;
  }
  if (case_col < 0 || activity_col < 0)
    throw Error(ErrorCode::MalformedCsv, "header must name 'case' and 'activity' columns");

  HierLog log;
  std::unordered_map<std::string, std::size_t> index_of_case;
  std::vector<std::string> fields;
  while (read_csv_record(in, fields, ++line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size())
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": expected " +
                                               std::to_string(header.size()) + " fields");
    const auto& case_id = fields[static_cast<std::size_t>(case_col)];
    const auto& activity = fields[static_cast<std::size_t>(activity_col)];
    if (activity.empty())
      throw Error(ErrorCode::MissingConceptName, "line " + std::to_string(line));
    check_activity(activity);
    auto [it, inserted] = index_of_case.emplace(case_id, log.traces.size());
    if (inserted) log.traces.emplace_back();
    std::map<std::string, std::string> attrs;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == case_col || static_cast<int>(i) == activity_col) continue;
      if (!fields[i].empty()) attrs[keys[i]] = fields[i];
    }
    log.traces[it->second].events.emplace_back(Path{activity}, std::move(attrs));
  }
  return log;
}

HierLog read_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".csv")) return parse_csv(in);
  return parse_xes(in);
}

}  // namespace hpm
