#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hpm/log.hpp"

namespace hpm {

enum class NodeKind {
  Activity,  // a
  Silent,    // τ
  Seq,       // →
  Xor,       // ×
  Loop,      // ⟲ (body, redo...)
  Par,       // ∧
  Sub,       // ▽_f (named subtree)
  Rec,       // △_f (recursion leaf)
};

bool is_operator(NodeKind k);

/// Immutable hierarchical process tree. Copies share structure.
class Tree {
 public:
  struct Node {
    NodeKind kind;
    std::string label;  // activity name, or the name of ▽/△
    std::vector<Tree> children;
  };

  Tree();  // τ

  static Tree activity(std::string name);
  static Tree silent();
  static Tree op(NodeKind kind, std::vector<Tree> children);
  static Tree seq(std::vector<Tree> children) { return op(NodeKind::Seq, std::move(children)); }
  static Tree xor_(std::vector<Tree> children) { return op(NodeKind::Xor, std::move(children)); }
  static Tree loop(std::vector<Tree> children) { return op(NodeKind::Loop, std::move(children)); }
  static Tree par(std::vector<Tree> children) { return op(NodeKind::Par, std::move(children)); }
  static Tree sub(std::string name, Tree child);
  static Tree rec(std::string name);

  NodeKind kind() const { return node_->kind; }
  const std::string& label() const { return node_->label; }
  const std::vector<Tree>& children() const { return node_->children; }
  const Tree& child(std::size_t i) const { return node_->children.at(i); }
  const Node* id() const { return node_.get(); }

  bool is_silent() const { return kind() == NodeKind::Silent; }

  std::size_t size() const;
  std::size_t leaf_count() const;

  /// Textual notation: seq(..), xor(..), loop(..), par(..), tau, names,
  /// sub:NAME(child), rec:NAME. Names are quoted when needed.
  std::string to_string() const;
  static Tree parse(std::string_view text);

  /// Children of × and ∧ sorted by their canonical text; → and ⟲ keep order.
  Tree canonical() const;

 private:
  explicit Tree(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Structural equality modulo the order of × and ∧ children.
bool structurally_equal(const Tree& a, const Tree& b);

/// Exact structural identity (order-sensitive everywhere).
bool operator==(const Tree& a, const Tree& b);

std::string quote_name(std::string_view name);

/// Activities, ▽ names and △ names occurring in the tree.
std::set<Activity> tree_alphabet(const Tree& t);

bool contains_recursion(const Tree& t);

/// Pre-order walk with the child-index path of every node.
void walk(const Tree& t, const std::function<void(const Tree&, const std::vector<std::size_t>&)>& visit);

/// Path-based node id ("0.1.2"; the root is "0").
std::string node_id(const std::vector<std::size_t>& path);

}  // namespace hpm
