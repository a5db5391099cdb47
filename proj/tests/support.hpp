#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "hpm/export.hpp"
#include "hpm/log.hpp"
#include "hpm/tree.hpp"

namespace testkit {

using hpm::ActivityTrace;
using hpm::HierLog;
using hpm::NodeKind;
using hpm::Path;
using hpm::Tree;

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

inline ActivityTrace running_trace() {
  return {{"Main.main()", "Main.input()"},
          {"Main.main()", "B.process()", "B.stepPre()"},
          {"Main.main()", "B.process()", "B.process()", "A.process()"},
          {"Main.main()", "B.process()", "B.stepPost()"},
          {"Main.main()", "Main.output()"}};
}

inline Tree running_tree() {
  return Tree::sub("Main.main()",
                   Tree::seq({Tree::activity("Main.input()"),
                              Tree::sub("B.process()", Tree::xor_({Tree::activity("A.process()"),
                                                                   Tree::seq({Tree::activity("B.stepPre()"),
                                                                              Tree::rec("B.process()"),
                                                                              Tree::activity("B.stepPost()")})})),
                              Tree::activity("Main.output()")}));
}

struct Interval {
  const char* name;
  int start;  // tenths of a second
  int end;
};

/// The eight intervals of the running example, as drawn.
inline std::vector<Interval> running_intervals() {
  return {{"Main.main()", 0, 60},   {"Main.input()", 1, 12}, {"B.process()", 16, 44}, {"Main.output()", 48, 59},
          {"B.stepPre()", 17, 20},  {"B.process()", 24, 36}, {"B.stepPost()", 40, 43}, {"A.process()", 26, 34}};
}

inline std::string iso_time(int tenths) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "2024-03-01T10:00:%02d.%d00+00:00", tenths / 10, tenths % 10);
  return buf;
}

/// One <trace> with start/complete events for the given intervals in time order.
inline std::string xes_for_intervals(const std::vector<Interval>& intervals) {
  std::vector<std::tuple<int, std::string, std::string>> events;
  for (const auto& iv : intervals) {
    events.emplace_back(iv.start, iv.name, "start");
    events.emplace_back(iv.end, iv.name, "complete");
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xes.version=\"1.0\">\n  <trace>\n"
     << "    <string key=\"concept:name\" value=\"run-1\"/>\n";
  for (const auto& [t, name, life] : events) {
    os << "    <event>\n"
       << "      <string key=\"concept:name\" value=\"" << name << "\"/>\n"
       << "      <string key=\"lifecycle:transition\" value=\"" << life << "\"/>\n"
       << "      <date key=\"time:timestamp\" value=\"" << iso_time(t) << "\"/>\n"
       << "    </event>\n";
  }
  os << "  </trace>\n</log>\n";
  return os.str();
}

inline std::string running_xes() { return xes_for_intervals(running_intervals()); }

inline HierLog log_of(const std::vector<std::string>& shorthand) {
  std::vector<ActivityTrace> traces;
  for (const auto& s : shorthand) traces.push_back(hpm::parse_shorthand(s));
  return hpm::log_from_shapes(traces);
}

// ---------------------------------------------------------------------------
// Membership oracle: brute-force matching of whole segments against the
// language semantics, written without reference to the library acceptor.
// ---------------------------------------------------------------------------

class Matcher {
 public:
  explicit Matcher(Tree root) : root_(std::move(root)) {}

  bool accepts(const ActivityTrace& trace) { return match(root_, trace, {}); }

 private:
  using Env = std::vector<std::pair<std::string, Tree>>;
  using Key = std::tuple<const void*, ActivityTrace, std::vector<std::string>>;

  static std::vector<std::string> names(const Env& env) {
    std::vector<std::string> out;
    for (const auto& [n, t] : env) out.push_back(n);
    return out;
  }

  static ActivityTrace slice(const ActivityTrace& s, std::size_t i, std::size_t j) {
    return ActivityTrace(s.begin() + static_cast<std::ptrdiff_t>(i), s.begin() + static_cast<std::ptrdiff_t>(j));
  }

  bool match(const Tree& t, const ActivityTrace& seg, const Env& env) {
    Key key{t.id(), seg, names(env)};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    memo_[key] = false;
    bool r = compute(t, seg, env);
    memo_[key] = r;
    return r;
  }

  // ▽_f(body) under `env`, where `env` already binds f to body.
  bool match_named(const std::string& f, const Tree& body, const ActivityTrace& seg, const Env& env) {
    if (seg.size() == 1 && seg[0] == Path{f}) return match(body, {}, env);
    if (seg.empty()) return false;
    ActivityTrace inner;
    for (const auto& e : seg) {
      if (e.size() < 2 || e[0] != f) return false;
      inner.emplace_back(e.begin() + 1, e.end());
    }
    return match(body, inner, env);
  }

  bool match_seq(const std::vector<Tree>& kids, std::size_t k, const ActivityTrace& seg, std::size_t from,
                 const Env& env) {
    if (k == kids.size()) return from == seg.size();
    for (std::size_t to = from; to <= seg.size(); ++to)
      if (match(kids[k], slice(seg, from, to), env) && match_seq(kids, k + 1, seg, to, env)) return true;
    return false;
  }

  bool match_loop(const Tree& t, const ActivityTrace& seg, const Env& env) {
    const auto& kids = t.children();
    auto redo_matches = [&](const ActivityTrace& s) {
      for (std::size_t r = 1; r < kids.size(); ++r)
        if (match(kids[r], s, env)) return true;
      return false;
    };
    std::set<std::pair<std::size_t, int>> seen;
    std::vector<std::pair<std::size_t, int>> work;
    for (std::size_t a = 0; a <= seg.size(); ++a)
      if (match(kids[0], slice(seg, 0, a), env)) work.emplace_back(a, 0);
    while (!work.empty()) {
      auto st = work.back();
      work.pop_back();
      if (!seen.insert(st).second) continue;
      auto [p, phase] = st;
      if (phase == 0 && p == seg.size()) return true;
      for (std::size_t q = p; q <= seg.size(); ++q) {
        ActivityTrace part = slice(seg, p, q);
        if (phase == 0 ? redo_matches(part) : match(kids[0], part, env)) work.emplace_back(q, 1 - phase);
      }
    }
    return false;
  }

  bool match_par(const std::vector<Tree>& kids, const ActivityTrace& seg, const Env& env) {
    std::vector<std::size_t> assign(seg.size(), 0);
    while (true) {
      std::vector<ActivityTrace> parts(kids.size());
      for (std::size_t i = 0; i < seg.size(); ++i) parts[assign[i]].push_back(seg[i]);
      bool ok = true;
      for (std::size_t k = 0; k < kids.size() && ok; ++k) ok = match(kids[k], parts[k], env);
      if (ok) return true;
      std::size_t i = 0;
      while (i < seg.size() && ++assign[i] == kids.size()) assign[i++] = 0;
      if (i == seg.size()) return false;
    }
  }

  bool compute(const Tree& t, const ActivityTrace& seg, const Env& env) {
    switch (t.kind()) {
      case NodeKind::Silent: return seg.empty();
      case NodeKind::Activity: return seg.size() == 1 && seg[0] == Path{t.label()};
      case NodeKind::Xor:
        for (const auto& c : t.children())
          if (match(c, seg, env)) return true;
        return false;
      case NodeKind::Seq: return match_seq(t.children(), 0, seg, 0, env);
      case NodeKind::Loop: return match_loop(t, seg, env);
      case NodeKind::Par: return match_par(t.children(), seg, env);
      case NodeKind::Sub: {
        Env inner = env;
        inner.emplace_back(t.label(), t.child(0));
        return match_named(t.label(), t.child(0), seg, inner);
      }
      case NodeKind::Rec:
        for (std::size_t i = env.size(); i-- > 0;)
          if (env[i].first == t.label()) {
            Env inner(env.begin(), env.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            return match_named(t.label(), env[i].second, seg, inner);
          }
        throw std::runtime_error("unbound recursion leaf " + t.label());
    }
    return false;
  }

  Tree root_;
  std::map<Key, bool> memo_;
};

inline bool oracle_accepts(const Tree& t, const ActivityTrace& trace) { return Matcher(t).accepts(trace); }

// ---------------------------------------------------------------------------
// PNML oracle: read the XML back, then explore reachable markings. Start and
// end transitions are fused into single hierarchical events: a leaf emits its
// event at +start, a named subtree that saw no inner event emits its own path
// at +end.
// ---------------------------------------------------------------------------

struct ParsedNet {
  std::vector<std::string> places;
  std::map<std::string, std::string> labels;  // transition id -> label ("" when silent)
  std::vector<std::pair<std::string, std::string>> arcs;
  std::map<std::string, std::size_t> initial;
  std::map<std::string, std::size_t> final_marking;
};

inline ParsedNet parse_pnml(const std::string& xml) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  std::istringstream in(xml);
  pt::read_xml(in, doc);
  ParsedNet net;
  const pt::ptree& pnml = doc.get_child("pnml");
  const pt::ptree& netnode = pnml.get_child("net");
  const pt::ptree& page = netnode.get_child("page");
  for (const auto& [tag, node] : page) {
    if (tag == "place") {
      std::string id = node.get<std::string>("<xmlattr>.id");
      net.places.push_back(id);
      if (auto m = node.get_optional<std::size_t>("initialMarking.text"); m && *m > 0) net.initial[id] = *m;
    } else if (tag == "transition") {
      std::string id = node.get<std::string>("<xmlattr>.id");
      bool invisible = false;
      for (const auto& [t2, sub] : node)
        if (t2 == "toolspecific" && sub.get<std::string>("<xmlattr>.activity", "") == "$invisible$") invisible = true;
      net.labels[id] = invisible ? "" : node.get<std::string>("name.text", "");
    } else if (tag == "arc") {
      net.arcs.emplace_back(node.get<std::string>("<xmlattr>.source"), node.get<std::string>("<xmlattr>.target"));
    }
  }
  if (auto fm = netnode.get_child_optional("finalmarkings"))
    for (const auto& [tag, marking] : *fm)
      if (tag == "marking")
        for (const auto& [t2, place] : marking)
          if (t2 == "place") {
            auto n = place.get<std::size_t>("text", 0);
            if (n > 0) net.final_marking[place.get<std::string>("<xmlattr>.idref")] = n;
          }
  return net;
}

/// Fused firing-sequence language of a PNML document, up to `max_events`
/// fused events. `meta` supplies the tree position of each transition id.
inline std::set<ActivityTrace> pnml_language(const std::string& xml, const hpm::PetriNet& meta, std::size_t max_events) {
  ParsedNet net = parse_pnml(xml);
  std::map<std::string, std::size_t> pidx;
  for (std::size_t i = 0; i < net.places.size(); ++i) pidx[net.places[i]] = i;

  struct T {
    const hpm::PetriNet::Transition* meta;
    std::vector<std::size_t> pre, post;
  };
  std::map<std::string, const hpm::PetriNet::Transition*> by_id;
  for (const auto& t : meta.transitions) by_id[t.id] = &t;
  std::map<std::string, T> ts;
  for (const auto& [id, label] : net.labels) {
    auto it = by_id.find(id);
    if (it == by_id.end() || it->second->label != label) throw std::runtime_error("transition mismatch at " + id);
    ts[id].meta = it->second;
  }
  for (const auto& [s, d] : net.arcs) {
    if (pidx.count(s) && ts.count(d)) ts[d].pre.push_back(pidx[s]);
    else if (ts.count(s) && pidx.count(d)) ts[s].post.push_back(pidx[d]);
    else throw std::runtime_error("arc is not place-transition bipartite: " + s + " -> " + d);
  }

  using Marking = std::vector<std::size_t>;
  Marking m0(net.places.size(), 0), mf(net.places.size(), 0);
  for (const auto& [p, n] : net.initial) m0[pidx.at(p)] = n;
  for (const auto& [p, n] : net.final_marking) mf[pidx.at(p)] = n;

  using State = std::tuple<Marking, std::set<std::string>, ActivityTrace>;
  std::set<State> seen;
  std::vector<State> work{{m0, {}, {}}};
  std::set<ActivityTrace> out;
  while (!work.empty()) {
    State st = std::move(work.back());
    work.pop_back();
    if (!seen.insert(st).second) continue;
    const auto& [m, fired_inside, trace] = st;
    if (m == mf) out.insert(trace);
    for (const auto& [id, t] : ts) {
      bool enabled = true;
      Marking next = m;
      for (auto p : t.pre) {
        if (next[p] == 0) {
          enabled = false;
          break;
        }
        --next[p];
      }
      if (!enabled) continue;
      for (auto p : t.post) ++next[p];
      std::set<std::string> flags = fired_inside;
      ActivityTrace tr = trace;
      const auto& mt = *t.meta;
      bool emit = false;
      if (mt.role == hpm::PetriNet::Role::Start && !mt.is_sub) emit = true;
      if (mt.role == hpm::PetriNet::Role::Start && mt.is_sub) flags.erase(mt.node);
      if (mt.role == hpm::PetriNet::Role::End && mt.is_sub && !flags.count(mt.node)) emit = true;
      if (emit) {
        tr.push_back(mt.path);
        for (const auto& e : mt.enclosing) flags.insert(e);
        if (tr.size() > max_events) continue;
      }
      work.emplace_back(std::move(next), std::move(flags), std::move(tr));
    }
  }
  return out;
}

}  // namespace testkit
