#include "hpm/export.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace hpm {

namespace {

class NetBuilder {
 public:
  PetriNet net;

  void build(const Tree& t, const std::string& in, const std::string& out) {
    std::vector<std::size_t> path;
    Path names;
    std::vector<std::string> enclosing;
    block(t, in, out, path, names, enclosing);
  }

  std::string place() {
    std::string id = "p" + std::to_string(places_++);
    net.places.push_back(id);
    return id;
  }

 private:
  std::string transition(PetriNet::Transition t) {
    t.id = "t" + std::to_string(net.transitions.size());
    net.transitions.push_back(t);
    return net.transitions.back().id;
  }

  void arc(const std::string& a, const std::string& b) { net.arcs.emplace_back(a, b); }

  std::string silent(const std::string& node, const std::vector<std::string>& enclosing) {
    PetriNet::Transition t;
    t.role = PetriNet::Role::Silent;
    t.node = node;
    t.enclosing = enclosing;
    return transition(std::move(t));
  }

  void pair(const std::string& label, bool is_sub, const std::string& node, const Path& path,
            const std::vector<std::string>& enclosing, const std::string& in, const std::string& mid_in,
            const std::string& mid_out, const std::string& out) {
    PetriNet::Transition s{"", label + "+start", PetriNet::Role::Start, is_sub, node, path, enclosing};
    PetriNet::Transition e{"", label + "+end", PetriNet::Role::End, is_sub, node, path, enclosing};
    auto ts = transition(std::move(s));
    arc(in, ts);
    arc(ts, mid_in);
    auto te = transition(std::move(e));
    arc(mid_out, te);
    arc(te, out);
  }

  void block(const Tree& t, const std::string& in, const std::string& out, std::vector<std::size_t>& path,
             Path& names, std::vector<std::string>& enclosing) {
    const std::string id = node_id(path);
    auto child = [&](std::size_t i, const std::string& a, const std::string& b) {
      path.push_back(i);
      block(t.child(i), a, b, path, names, enclosing);
      path.pop_back();
    };
    switch (t.kind()) {
      case NodeKind::Rec:
        throw Error(ErrorCode::RecursionNotRepresentable,
                    "rec:" + t.label() + " at node " + id + " cannot be expressed by a finite Petri net");
      case NodeKind::Silent: {
        auto s = silent(id, enclosing);
        arc(in, s);
        arc(s, out);
        return;
      }
      case NodeKind::Activity: {
        Path p = names;
        p.push_back(t.label());
        auto mid = place();
        pair(t.label(), false, id, p, enclosing, in, mid, mid, out);
        return;
      }
      case NodeKind::Sub: {
        Path p = names;
        p.push_back(t.label());
        auto a = place();
        auto b = place();
        pair(t.label(), true, id, p, enclosing, in, a, b, out);
        names.push_back(t.label());
        enclosing.push_back(id);
        child(0, a, b);
        enclosing.pop_back();
        names.pop_back();
        return;
      }
      case NodeKind::Seq: {
        std::string cur = in;
        for (std::size_t i = 0; i < t.children().size(); ++i) {
          std::string next = i + 1 == t.children().size() ? out : place();
          child(i, cur, next);
          cur = next;
        }
        return;
      }
      case NodeKind::Xor:
        for (std::size_t i = 0; i < t.children().size(); ++i) child(i, in, out);
        return;
      case NodeKind::Par: {
        auto fork = silent(id, enclosing);
        auto join = silent(id, enclosing);
        arc(in, fork);
        arc(join, out);
        for (std::size_t i = 0; i < t.children().size(); ++i) {
          auto a = place();
          auto b = place();
          arc(fork, a);
          arc(b, join);
          child(i, a, b);
        }
        return;
      }
      case NodeKind::Loop: {
        auto enter = silent(id, enclosing);
        auto exit = silent(id, enclosing);
        auto p1 = place();
        auto p2 = place();
        arc(in, enter);
        arc(enter, p1);
        arc(p2, exit);
        arc(exit, out);
        child(0, p1, p2);
        for (std::size_t i = 1; i < t.children().size(); ++i) child(i, p2, p1);
        return;
      }
    }
  }

  std::size_t places_ = 0;
};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

PetriNet to_petri_net(const Tree& tree) {
  NetBuilder b;
  b.net.places.push_back("source");
  b.net.places.push_back("sink");
  b.build(tree, "source", "sink");
  b.net.initial_marking["source"] = 1;
  b.net.final_marking["sink"] = 1;
  return std::move(b.net);
}

std::string to_pnml(const PetriNet& net) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<pnml>\n"
     << "  <net id=\"net1\" type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n"
     << "    <name><text>hierarchical process tree</text></name>\n"
     << "    <page id=\"page1\">\n";
  for (const auto& p : net.places) {
    os << "      <place id=\"" << xml_escape(p) << "\">\n"
       << "        <name><text>" << xml_escape(p) << "</text></name>\n";
    if (auto it = net.initial_marking.find(p); it != net.initial_marking.end())
      os << "        <initialMarking><text>" << it->second << "</text></initialMarking>\n";
    os << "      </place>\n";
  }
  for (const auto& t : net.transitions) {
    bool silent = t.role == PetriNet::Role::Silent;
    os << "      <transition id=\"" << xml_escape(t.id) << "\">\n"
       << "        <name><text>" << xml_escape(silent ? "tau" : t.label) << "</text></name>\n";
    if (silent) os << "        <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"$invisible$\"/>\n";
    os << "      </transition>\n";
  }
  std::size_t n = 0;
  for (const auto& [a, b] : net.arcs)
    os << "      <arc id=\"a" << n++ << "\" source=\"" << xml_escape(a) << "\" target=\"" << xml_escape(b) << "\"/>\n";
  os << "    </page>\n"
     << "    <finalmarkings>\n"
     << "      <marking>\n";
  for (const auto& [p, k] : net.final_marking)
    os << "        <place idref=\"" << xml_escape(p) << "\"><text>" << k << "</text></place>\n";
  os << "      </marking>\n"
     << "    </finalmarkings>\n"
     << "  </net>\n"
     << "</pnml>\n";
  return os.str();
}

std::string to_pnml(const Tree& tree) { return to_pnml(to_petri_net(tree)); }

Annotations frequency_annotations(const Tree& tree, const HierLog& log) {
  Annotations out;
  std::vector<std::size_t> path;
  std::vector<std::string> subs;
  std::function<void(const Tree&)> visit = [&](const Tree& t) {
    const std::string id = node_id(path);
    if (t.kind() == NodeKind::Activity || t.kind() == NodeKind::Sub) {
      std::size_t n = 0;
      for (const auto& tr : log.traces)
        for (const auto& e : tr.events) {
          const Path& p = e.path;
          if (t.kind() == NodeKind::Activity) {
            if (p.back() != t.label()) continue;
            bool top = subs.empty() ? p.size() == 1 : p.size() >= 2 && p[p.size() - 2] == subs.back();
            n += top;
          } else {
            n += std::find(p.begin(), p.end() - 1, t.label()) != p.end() - 1 || (p.size() == 1 && p[0] == t.label());
          }
        }
      out[id] = n;
    }
    if (t.kind() == NodeKind::Sub) subs.push_back(t.label());
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      path.push_back(i);
      visit(t.child(i));
      path.pop_back();
    }
    if (t.kind() == NodeKind::Sub) subs.pop_back();
  };
  visit(tree);
  return out;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string dot_id(const std::vector<std::size_t>& path, const char* suffix = "") {
  std::string id = node_id(path);
  std::replace(id.begin(), id.end(), '.', '_');
  return "n" + id + suffix;
}

class DotBuilder {
 public:
  explicit DotBuilder(const Annotations* ann) : ann_(ann) {}

  std::string render(const Tree& tree) {
    os_ << "digraph hpm {\n  rankdir=LR;\n  node [fontname=\"Helvetica\", shape=box, style=rounded];\n";
    std::vector<std::size_t> path;
    block(tree, path, 1);
    for (const auto& e : edges_) os_ << "  " << e << ";\n";
    os_ << "}\n";
    return os_.str();
  }

 private:
  using Ends = std::pair<std::string, std::string>;

  std::string label(const std::string& text, const std::vector<std::size_t>& path) const {
    std::string l = dot_escape(text);
    if (ann_)
      if (auto it = ann_->find(node_id(path)); it != ann_->end()) l += "\\n(" + std::to_string(it->second) + ")";
    return l;
  }

  void node(const std::string& id, const std::string& attrs, int indent) {
    os_ << std::string(static_cast<std::size_t>(indent) * 2, ' ') << id << " [" << attrs << "];\n";
  }

  void edge(const std::string& a, const std::string& b) { edges_.push_back(a + " -> " + b); }

  Ends block(const Tree& t, std::vector<std::size_t>& path, int indent) {
    auto child = [&](std::size_t i) {
      path.push_back(i);
      Ends e = block(t.child(i), path, indent);
      path.pop_back();
      return e;
    };
    const std::string id = dot_id(path);
    switch (t.kind()) {
      case NodeKind::Activity:
        node(id, "label=\"" + label(t.label(), path) + "\"", indent);
        return {id, id};
      case NodeKind::Silent:
        node(id, "shape=point, label=\"\"", indent);
        return {id, id};
      case NodeKind::Rec:
        node(id, "label=\"" + label(t.label(), path) + "\", style=\"rounded,dashed\", tooltip=\"recursion\"", indent);
        return {id, id};
      case NodeKind::Sub: {
        std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        os_ << pad << "subgraph cluster_" << id.substr(1) << " {\n"
            << pad << "  label=\"" << label(t.label(), path) << "\";\n";
        path.push_back(0);
        Ends e = block(t.child(0), path, indent + 1);
        path.pop_back();
        os_ << pad << "}\n";
        return e;
      }
      case NodeKind::Seq: {
        Ends first = child(0), prev = first;
        for (std::size_t i = 1; i < t.children().size(); ++i) {
          Ends cur = child(i);
          edge(prev.second, cur.first);
          prev = cur;
        }
        return {first.first, prev.second};
      }
      case NodeKind::Xor:
      case NodeKind::Par: {
        const char* sym = t.kind() == NodeKind::Xor ? "x" : "+";
        std::string split = dot_id(path, "_split"), join = dot_id(path, "_join");
        node(split, std::string("shape=diamond, style=\"\", label=\"") + sym + "\"", indent);
        node(join, std::string("shape=diamond, style=\"\", label=\"") + sym + "\"", indent);
        for (std::size_t i = 0; i < t.children().size(); ++i) {
          Ends e = child(i);
          edge(split, e.first);
          edge(e.second, join);
        }
        return {split, join};
      }
      case NodeKind::Loop: {
        std::string entry = dot_id(path, "_entry"), exit = dot_id(path, "_exit");
        node(entry, "shape=diamond, style=\"\", label=\"loop\"", indent);
        node(exit, "shape=diamond, style=\"\", label=\"loop\"", indent);
        Ends body = child(0);
        edge(entry, body.first);
        edge(body.second, exit);
        for (std::size_t i = 1; i < t.children().size(); ++i) {
          Ends redo = child(i);
          edge(exit, redo.first);
          edge(redo.second, entry);
        }
        return {entry, exit};
      }
    }
    return {id, id};
  }

  const Annotations* ann_;
  std::ostringstream os_;
  std::vector<std::string> edges_;
};

using ojson = nlohmann::ordered_json;

const char* json_kind(NodeKind k) {
  switch (k) {
    case NodeKind::Activity: return "act";
    case NodeKind::Silent: return "tau";
    case NodeKind::Seq: return "seq";
    case NodeKind::Xor: return "xor";
    case NodeKind::Loop: return "loop";
    case NodeKind::Par: return "par";
    case NodeKind::Sub: return "sub";
    case NodeKind::Rec: return "rec";
  }
  return "";
}

ojson tree_json(const Tree& t, std::vector<std::size_t>& path, const JsonOptions& opt) {
  ojson j;
  j["kind"] = json_kind(t.kind());
  if (t.kind() == NodeKind::Activity) j["activity"] = t.label();
  if (t.kind() == NodeKind::Sub || t.kind() == NodeKind::Rec) j["name"] = t.label();
  if (opt.ids) j["id"] = node_id(path);
  if (opt.annotations)
    if (auto it = opt.annotations->find(node_id(path)); it != opt.annotations->end()) j["freq"] = it->second;
  if (!t.children().empty()) {
    ojson kids = ojson::array();
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      path.push_back(i);
      kids.push_back(tree_json(t.child(i), path, opt));
      path.pop_back();
    }
    j["children"] = std::move(kids);
  }
  return j;
}

Tree tree_from(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(ErrorCode::ParseError, "tree node must be an object with a string 'kind'");
  const std::string kind = j["kind"];
  auto text = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string())
      throw Error(ErrorCode::ParseError, std::string("node of kind ") + kind + " needs string '" + key + "'");
    return j[key];
  };
  std::vector<Tree> kids;
  if (j.contains("children")) {
    if (!j["children"].is_array()) throw Error(ErrorCode::ParseError, "'children' must be an array");
    for (const auto& c : j["children"]) kids.push_back(tree_from(c));
  }
  if (kind == "act") return Tree::activity(text("activity"));
  if (kind == "tau") return Tree::silent();
  if (kind == "rec") return Tree::rec(text("name"));
  if (kind == "sub") {
    if (kids.size() != 1) throw Error(ErrorCode::ParseError, "sub needs exactly one child");
    return Tree::sub(text("name"), kids.front());
  }
  NodeKind k;
  if (kind == "seq")
    k = NodeKind::Seq;
  else if (kind == "xor")
    k = NodeKind::Xor;
  else if (kind == "loop")
    k = NodeKind::Loop;
  else if (kind == "par")
    k = NodeKind::Par;
  else
    throw Error(ErrorCode::ParseError, "unknown node kind '" + kind + "'");
  try {
    return Tree::op(k, std::move(kids));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

std::string to_dot(const Tree& tree, const Annotations* annotations) { return DotBuilder(annotations).render(tree); }

std::string to_json(const Tree& tree, const JsonOptions& options) {
  std::vector<std::size_t> path;
  return tree_json(tree, path, options).dump();
}

Tree from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return tree_from(j);
}

}  // namespace hpm
