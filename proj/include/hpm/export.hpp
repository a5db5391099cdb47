#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hpm/log.hpp"
#include "hpm/tree.hpp"

namespace hpm {

/// Workflow net produced from a recursion-free tree.
struct PetriNet {
  enum class Role { Start, End, Silent };

  struct Transition {
    std::string id;
    std::string label;  // "a+start", "a+end", or empty when silent
    Role role = Role::Silent;
    bool is_sub = false;  // start/end of a named subtree rather than a leaf
    std::string node;     // node id of the tree node it belongs to
    Path path;            // ▽ names down to the activity or subtree name
    std::vector<std::string> enclosing;  // node ids of the enclosing ▽ nodes
  };

  std::vector<std::string> places;
  std::vector<Transition> transitions;
  std::vector<std::pair<std::string, std::string>> arcs;
  std::map<std::string, std::size_t> initial_marking;
  std::map<std::string, std::size_t> final_marking;
};

/// Throws RecursionNotRepresentable when the tree contains a △.
PetriNet to_petri_net(const Tree& tree);
std::string to_pnml(const PetriNet& net);
std::string to_pnml(const Tree& tree);

/// Node id -> frequency.
using Annotations = std::map<std::string, std::size_t>;

/// Activity leaves count the log events they replay (same label under the same
/// innermost ▽ name); ▽ nodes count events passing through them.
Annotations frequency_annotations(const Tree& tree, const HierLog& log);

std::string to_dot(const Tree& tree, const Annotations* annotations = nullptr);

struct JsonOptions {
  bool ids = false;
  const Annotations* annotations = nullptr;
};

std::string to_json(const Tree& tree, const JsonOptions& options = {});
/// Throws ParseError on malformed documents.
Tree from_json(const std::string& text);

}  // namespace hpm
