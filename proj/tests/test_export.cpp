#include <doctest.h>

#include <json.hpp>

#include "hpm/error.hpp"
#include "hpm/export.hpp"
#include "hpm/generate.hpp"
#include "hpm/language.hpp"
#include "hpm/xes.hpp"
#include "hpm/heuristics.hpp"
#include "support.hpp"

using namespace hpm;

namespace {

std::size_t count_labeled(const PetriNet& net) {
  std::size_t n = 0;
  for (const auto& t : net.transitions) n += t.role != PetriNet::Role::Silent;
  return n;
}

// Every place and transition lies on a path from source to sink.
bool is_workflow_net(const testkit::ParsedNet& net) {
  std::map<std::string, std::vector<std::string>> fwd, bwd;
  for (const auto& [a, b] : net.arcs) {
    fwd[a].push_back(b);
    bwd[b].push_back(a);
  }
  auto reach = [](const std::string& from, std::map<std::string, std::vector<std::string>>& g) {
    std::set<std::string> seen{from};
    std::vector<std::string> work{from};
    while (!work.empty()) {
      auto n = work.back();
      work.pop_back();
      for (const auto& m : g[n])
        if (seen.insert(m).second) work.push_back(m);
    }
    return seen;
  };
  if (net.initial.size() != 1 || net.final_marking.size() != 1) return false;
  auto from_source = reach(net.initial.begin()->first, fwd);
  auto to_sink = reach(net.final_marking.begin()->first, bwd);
  for (const auto& p : net.places)
    if (!from_source.count(p) || !to_sink.count(p)) return false;
  for (const auto& [t, label] : net.labels)
    if (!from_source.count(t) || !to_sink.count(t)) return false;
  return true;
}

struct DotNode {
  std::string line;
  std::vector<std::string> clusters;
};

std::vector<DotNode> dot_nodes(const std::string& dot) {
  std::vector<DotNode> out;
  std::vector<std::string> stack;
  std::istringstream in(dot);
  std::string line;
  bool pending = false;
  while (std::getline(in, line)) {
    auto s = line.find_first_not_of(' ');
    if (s == std::string::npos) continue;
    line = line.substr(s);
    if (line.rfind("subgraph cluster_", 0) == 0) {
      stack.emplace_back();
      pending = true;
    } else if (pending && line.rfind("label=", 0) == 0) {
      stack.back() = line.substr(7, line.rfind('"') - 7);
      pending = false;
    } else if (line == "}") {
      if (!stack.empty()) stack.pop_back();
    } else if (line.find('[') != std::string::npos && line.find("->") == std::string::npos &&
               line.rfind("node ", 0) != 0 && line.rfind("edge ", 0) != 0) {
      out.push_back({line, stack});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("leaf expands to a start/end transition pair") {
  PetriNet net = to_petri_net(Tree::activity("Main.input()"));
  REQUIRE(net.transitions.size() == 2);
  CHECK(net.transitions[0].label == "Main.input()+start");
  CHECK(net.transitions[1].label == "Main.input()+end");
  CHECK(net.places.size() == 3);
  std::string xml = to_pnml(net);
  CHECK(xml.find("<text>Main.input()+start</text>") != std::string::npos);
  CHECK(is_workflow_net(testkit::parse_pnml(xml)));
}

TEST_CASE("silent leaf is a single invisible transition") {
  PetriNet net = to_petri_net(Tree::silent());
  REQUIRE(net.transitions.size() == 1);
  CHECK(net.transitions[0].role == PetriNet::Role::Silent);
  auto parsed = testkit::parse_pnml(to_pnml(net));
  CHECK(parsed.labels.begin()->second.empty());
}

TEST_CASE("named subtree with a choice has eight labeled transitions") {
  Tree t = Tree::parse("sub:\"Main.main()\"(seq(\"Main.input()\", xor(\"A.f()\", \"B.f()\")))");
  PetriNet net = to_petri_net(t);
  CHECK(count_labeled(net) == 8);
  std::set<std::string> labels;
  for (const auto& tr : net.transitions) labels.insert(tr.label);
  for (const char* l : {"Main.main()+start", "Main.main()+end", "Main.input()+start", "A.f()+end", "B.f()+start"})
    CHECK(labels.count(l));
  auto parsed = testkit::parse_pnml(to_pnml(net));
  CHECK(is_workflow_net(parsed));
  auto lang = testkit::pnml_language(to_pnml(net), net, 6);
  CHECK(lang == language(t, {6, 0}));
}

TEST_CASE("recursion cannot be exported to a Petri net") {
  try {
    to_pnml(testkit::running_tree());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RecursionNotRepresentable);
    CHECK(std::string(e.what()).find("B.process()") != std::string::npos);
  }
}

TEST_CASE("generated nets are workflow nets") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Tree t = gen_random_tree(seed, 1 + seed % 7, false);
    CHECK(is_workflow_net(testkit::parse_pnml(to_pnml(t))));
    CHECK(to_pnml(t) == to_pnml(t));
  }
}

TEST_CASE("dot output") {
  std::string leaf = to_dot(Tree::activity("a"));
  CHECK(leaf.rfind("digraph", 0) == 0);
  CHECK(leaf.find("->") == std::string::npos);
  CHECK(dot_nodes(leaf).size() == 1);

  std::string running = to_dot(testkit::running_tree());
  CHECK(running == to_dot(testkit::running_tree()));
  bool back_ref_nested = false;
  for (const auto& n : dot_nodes(running))
    if (n.line.find("dashed") != std::string::npos)
      back_ref_nested = n.clusters == std::vector<std::string>{"Main.main()", "B.process()"} &&
                        n.line.find("B.process()") != std::string::npos;
  CHECK(back_ref_nested);
}

TEST_CASE("dot frequency labels") {
  HierLog l = log_from_shapes({testkit::running_trace()});
  Annotations ann = frequency_annotations(testkit::running_tree(), l);
  CHECK(ann.at("0") == 5);
  CHECK(ann.at("0.0.0") == 1);
  std::string dot = to_dot(testkit::running_tree(), &ann);
  CHECK(dot.find("(5)") != std::string::npos);
}

TEST_CASE("json output") {
  CHECK(to_json(Tree::silent()) == R"({"kind":"tau"})");
  CHECK(to_json(Tree::parse("sub:f(a)")) == R"({"kind":"sub","name":"f","children":[{"kind":"act","activity":"a"}]})");
  CHECK(to_json(Tree::parse("rec:f")) == R"({"kind":"rec","name":"f"})");
  auto j = nlohmann::json::parse(to_json(Tree::parse("seq(a, b)"), {true, nullptr}));
  CHECK(j["id"] == "0");
  CHECK(j["children"][1]["id"] == "0.1");
}

TEST_CASE("json round trip") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Tree t = gen_model(seed, 1 + seed % 8);
    CHECK(from_json(to_json(t)) == t);
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Tree t = gen_random_tree(seed, 1 + seed % 8);
    CHECK(from_json(to_json(t)) == t);
  }
  CHECK_THROWS_AS(from_json("{"), Error);
  CHECK_THROWS_AS(from_json(R"({"kind":"nope"})"), Error);
  CHECK_THROWS_AS(from_json(R"({"kind":"seq","children":[]})"), Error);
}
