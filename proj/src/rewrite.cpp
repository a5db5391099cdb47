#include "hpm/rewrite.hpp"

#include <algorithm>
#include <utility>

#include "hpm/language.hpp"

namespace hpm {

namespace {

bool nullable_local(const Tree& t) {
  switch (t.kind()) {
    case NodeKind::Silent: return true;
    case NodeKind::Activity:
    case NodeKind::Sub:
    case NodeKind::Rec: return false;
    case NodeKind::Xor:
      return std::any_of(t.children().begin(), t.children().end(), nullable_local);
    case NodeKind::Seq:
    case NodeKind::Par:
      return std::all_of(t.children().begin(), t.children().end(), nullable_local);
    case NodeKind::Loop: return nullable_local(t.child(0));
  }
  return false;
}

Tree reduce_node(NodeKind kind, std::vector<Tree> kids) {
  if (kind == NodeKind::Seq || kind == NodeKind::Par) {
    std::vector<Tree> flat;
    for (auto& k : kids) {
      if (k.kind() == kind) {
        for (const auto& g : k.children()) flat.push_back(g);
      } else if (!k.is_silent()) {
        flat.push_back(std::move(k));
      }
    }
    if (flat.empty()) return Tree::silent();
    if (flat.size() == 1) return flat.front();
    return Tree::op(kind, std::move(flat));
  }
  if (kind == NodeKind::Xor) {
    std::vector<Tree> rest;
    std::size_t taus = 0;
    for (auto& k : kids) {
      if (k.is_silent())
        ++taus;
      else
        rest.push_back(std::move(k));
    }
    bool keep_tau = taus > 0 && !std::any_of(rest.begin(), rest.end(), nullable_local);
    if (keep_tau) rest.push_back(Tree::silent());
    if (rest.empty()) return Tree::silent();
    if (rest.size() == 1) return rest.front();
    return Tree::xor_(std::move(rest));
  }
  return Tree::op(kind, std::move(kids));
}

}  // namespace

Tree reduce(const Tree& tree) {
  if (tree.children().empty()) return tree;
  std::vector<Tree> kids;
  kids.reserve(tree.children().size());
  for (const auto& c : tree.children()) kids.push_back(reduce(c));
  if (tree.kind() == NodeKind::Sub) return Tree::sub(tree.label(), kids.front());
  return reduce_node(tree.kind(), std::move(kids));
}

namespace {

enum class Fate { Kept, Dissolved, Collapsed };

struct DepthFilter {
  std::size_t min_depth;
  std::size_t max_depth;
  std::vector<std::pair<std::string, Fate>> scope;

  Tree run(const Tree& t, std::size_t depth) {
    switch (t.kind()) {
      case NodeKind::Silent: return t;
      case NodeKind::Activity: return depth < min_depth ? Tree::silent() : t;
      case NodeKind::Rec: {
        if (depth < min_depth) return Tree::silent();
        auto it = std::find_if(scope.rbegin(), scope.rend(), [&](const auto& s) { return s.first == t.label(); });
        if (it != scope.rend() && it->second == Fate::Kept) return t;
        return Tree::activity(t.label());
      }
      case NodeKind::Sub: {
        if (depth == max_depth) return Tree::activity(t.label());
        Fate fate = depth < min_depth ? Fate::Dissolved : Fate::Kept;
        scope.emplace_back(t.label(), fate);
        Tree inner = run(t.child(0), depth + 1);
        scope.pop_back();
        return fate == Fate::Dissolved ? inner : Tree::sub(t.label(), inner);
      }
      default: {
        std::vector<Tree> kids;
        for (const auto& c : t.children()) kids.push_back(run(c, depth));
        return Tree::op(t.kind(), std::move(kids));
      }
    }
  }
};

}  // namespace

Tree depth_filter(const Tree& tree, std::size_t min_depth, std::size_t max_depth) {
  if (min_depth > max_depth)
    throw Error(ErrorCode::InvalidRange,
                "min depth " + std::to_string(min_depth) + " exceeds max depth " + std::to_string(max_depth));
  DepthFilter f{min_depth, max_depth, {}};
  return reduce(f.run(tree, 0));
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateActivity: return "duplicate-activity";
    case ViolationKind::LoopBodyOverlap: return "loop-body-overlap";
    case ViolationKind::SilentChild: return "silent-child";
    case ViolationKind::UnboundRecursion: return "unbound-recursion";
  }
  return "unknown";
}

std::vector<Violation> validate(const Tree& tree) {
  std::vector<Violation> out;
  std::vector<std::string> scope;
  std::vector<std::size_t> path;

  std::function<void(const Tree&)> visit = [&](const Tree& t) {
    const std::string id = node_id(path);
    if (t.kind() == NodeKind::Rec) {
      if (std::find(scope.begin(), scope.end(), t.label()) == scope.end())
        out.push_back({ViolationKind::UnboundRecursion, id, "rec:" + t.label() + " has no enclosing sub"});
      return;
    }
    if (is_operator(t.kind()) || t.kind() == NodeKind::Sub) {
      for (const auto& c : t.children())
        if (c.is_silent()) {
          out.push_back({ViolationKind::SilentChild, id, "tau child"});
          break;
        }
    }
    if (is_operator(t.kind())) {
      std::set<Activity> seen, reported;
      for (const auto& c : t.children()) {
        for (const auto& a : tree_alphabet(c)) {
          if (!seen.insert(a).second && reported.insert(a).second)
            out.push_back({ViolationKind::DuplicateActivity, id, "activity " + a + " occurs in several children"});
        }
      }
    }
    if (t.kind() == NodeKind::Loop) {
      auto st = start_heads(t.child(0));
      auto en = end_heads(t.child(0));
      std::vector<Activity> both;
      std::set_intersection(st.begin(), st.end(), en.begin(), en.end(), std::back_inserter(both));
      if (!both.empty())
        out.push_back({ViolationKind::LoopBodyOverlap, id, "loop body starts and ends with " + both.front()});
    }
    if (t.kind() == NodeKind::Sub) scope.push_back(t.label());
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      path.push_back(i);
      visit(t.children()[i]);
      path.pop_back();
    }
    if (t.kind() == NodeKind::Sub) scope.pop_back();
  };
  visit(tree);
  return out;
}

}  // namespace hpm
