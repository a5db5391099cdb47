#include <doctest.h>

#include <functional>
#include <random>

#include "hpm/error.hpp"
#include "hpm/heuristics.hpp"
#include "hpm/xes.hpp"
#include "support.hpp"

using namespace hpm;

namespace {

Event lc(const std::string& name, const std::string& life) {
  return Event({name}, {{kLifecycle, life}});
}

HierLog flat(std::vector<Event> events) {
  HierLog l;
  l.traces.push_back({std::move(events)});
  return l;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ParseError;
}

// Interval forest used by the round-trip check.
struct Node {
  std::string name;
  std::vector<Node> kids;
  bool operator==(const Node&) const = default;
};

std::vector<Node> random_forest(std::mt19937_64& rng, int depth) {
  std::vector<Node> out;
  int n = std::uniform_int_distribution<int>(1, 3)(rng);
  const char* names[] = {"a", "b", "c"};
  for (int i = 0; i < n; ++i) {
    Node node;
    do node.name = names[rng() % 3];
    while (!out.empty() && out.back().name == node.name);
    if (depth > 0 && rng() % 2) node.kids = random_forest(rng, depth - 1);
    out.push_back(std::move(node));
  }
  return out;
}

void serialize(const std::vector<Node>& forest, std::vector<Event>& out) {
  for (const auto& n : forest) {
    out.push_back(lc(n.name, "start"));
    serialize(n.kids, out);
    out.push_back(lc(n.name, "complete"));
  }
}

// Rebuilds the forest by merging consecutive events with a shared prefix.
std::vector<Node> rebuild(const ActivityTrace& trace) {
  std::vector<Node> roots;
  Path prev;
  for (const auto& p : trace) {
    std::size_t common = 0;
    while (common < prev.size() && common + 1 < p.size() && prev[common] == p[common]) ++common;
    std::vector<Node>* level = &roots;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i >= common) level->push_back({p[i], {}});
      level = &level->back().kids;
    }
    prev = p;
  }
  return roots;
}

}  // namespace

TEST_CASE("nested calls on the running example yields the hierarchical trace") {
  HierLog l = nested_calls(parse_xes_string(testkit::running_xes()));
  REQUIRE(l.size() == 1);
  CHECK(shape(l.traces[0]) == testkit::running_trace());
  CHECK(depth(l) == 4);
  const Event& a = l.traces[0].events[2];
  CHECK(*a.attr(kStartTime) == testkit::iso_time(26));
  CHECK(*a.attr(kCompleteTime) == testkit::iso_time(34));
}

TEST_CASE("nested calls small fixtures") {
  CHECK(shape(nested_calls(flat({lc("a", "start"), lc("a", "complete")})).traces[0]) == parse_shorthand("a"));
  HierLog siblings = nested_calls(flat({lc("a", "start"), lc("b", "start"), lc("b", "complete"), lc("c", "start"),
                                        lc("c", "complete"), lc("a", "complete")}));
  CHECK(shape(siblings.traces[0]) == parse_shorthand("a.b a.c"));
  HierLog forest = nested_calls(flat({lc("a", "start"), lc("a", "complete"), lc("b", "start"), lc("b", "complete")}));
  CHECK(shape(forest.traces[0]) == parse_shorthand("a b"));
  CHECK(depth(forest) == 1);
}

TEST_CASE("nested calls lifecycle errors") {
  CHECK(code_of([] {
          nested_calls(flat({lc("a", "start"), lc("b", "start"), lc("a", "complete"), lc("b", "complete")}));
        }) == ErrorCode::UnbalancedLifecycle);
  CHECK(code_of([] { nested_calls(flat({lc("a", "complete")})); }) == ErrorCode::UnbalancedLifecycle);
  CHECK(code_of([] { nested_calls(flat({lc("a", "start")})); }) == ErrorCode::UnbalancedLifecycle);
  CHECK(code_of([] { nested_calls(flat({Event({"a"})})); }) == ErrorCode::MissingLifecycle);
}

TEST_CASE("nested calls rebuilds the containment forest") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    auto forest = random_forest(rng, 3);
    std::vector<Event> events;
    serialize(forest, events);
    HierLog in = flat(events);
    HierLog out = nested_calls(in);
    CHECK(out.size() == in.size());
    CHECK(rebuild(shape(out.traces[0])) == forest);
  }
}

TEST_CASE("nested calls without nesting stays flat") {
  HierLog l = nested_calls(flat({lc("a", "start"), lc("a", "complete"), lc("b", "start"), lc("b", "complete"),
                                 lc("a", "start"), lc("a", "complete")}));
  CHECK(depth(l) == 1);
  CHECK(shape(l.traces[0]) == parse_shorthand("a b a"));
}

TEST_CASE("structured names") {
  HierLog l = structured_names(flat({Event({"p.C.m()"}), Event({"plain"})}), ".");
  CHECK(l.traces[0].events[0].path == Path{"p", "C", "m()"});
  CHECK(l.traces[0].events[1].path == Path{"plain"});
  HierLog two = structured_names(flat({Event({"a.b"}), Event({"a.c"})}), ".");
  CHECK(shape(two.traces[0]) == parse_shorthand("a.b a.c"));
  CHECK(structured_names(flat({Event({"x::y"})}), "::").traces[0].events[0].path == Path{"x", "y"});
  for (const char* bad : {".a", "a.", "a..b"})
    CHECK(code_of([&] { structured_names(flat({Event({bad})}), "."); }) == ErrorCode::EmptySegment);
}

TEST_CASE("attribute combination") {
  HierLog l = attribute_combination(flat({Event({"GET"}, {{"protocol", "HTTP"}})}), {"protocol"});
  CHECK(l.traces[0].events[0].path == Path{"HTTP", "GET"});
  HierLog id = attribute_combination(flat({Event({"GET"})}), {});
  CHECK(id.traces[0].events[0].path == Path{"GET"});
  HierLog deep = attribute_combination(flat({Event({"op1"}, {{"component", "db"}, {"iface", "sql"}}),
                                             Event({"op2"}, {{"component", "db"}, {"iface", "kv"}})}),
                                       {"component", "iface"});
  CHECK(depth(deep) == 3);
  CHECK(log_stats(deep).events == 2);
  CHECK(deep.traces[0].events[1].path == Path{"db", "kv", "op2"});
  CHECK(code_of([] { attribute_combination(flat({Event({"a"})}), {"protocol"}); }) == ErrorCode::MissingAttribute);
}

TEST_CASE("heuristics preserve trace counts") {
  HierLog in;
  in.traces.push_back({{Event({"a.b"}, {{kLifecycle, "start"}, {"k", "1"}}),
                        Event({"a.b"}, {{kLifecycle, "complete"}, {"k", "1"}})}});
  in.traces.push_back({});
  for (auto kind : {HeuristicKind::None, HeuristicKind::NestedCalls, HeuristicKind::StructuredNames,
                    HeuristicKind::AttributeCombination}) {
    HeuristicConfig c;
    c.kind = kind;
    c.attr_keys = {"k"};
    HierLog out = apply_heuristic(in, c);
    CHECK(out.size() == in.size());
    std::size_t expected_events = kind == HeuristicKind::NestedCalls ? 1 : 2;
    CHECK(log_stats(out).events == expected_events);
  }
}

TEST_CASE("heuristic config") {
  CHECK(parse_heuristic_kind("nested-calls") == HeuristicKind::NestedCalls);
  CHECK(parse_heuristic_kind("structured_names") == HeuristicKind::StructuredNames);
  CHECK(to_string(HeuristicKind::AttributeCombination) == "attribute_combination");
  CHECK(code_of([] { parse_heuristic_kind("fuzzy"); }) == ErrorCode::InvalidConfig);
  HeuristicConfig c;
  c.kind = HeuristicKind::AttributeCombination;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  c.kind = HeuristicKind::StructuredNames;
  c.separator = "";
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
}
