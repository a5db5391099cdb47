#include "hpm/generate.hpp"

#include <algorithm>
#include <functional>

#include "compiled_tree.hpp"
#include "hpm/conformance.hpp"
#include "hpm/rewrite.hpp"

namespace hpm {

std::string fresh_name(std::size_t i) {
  std::string out;
  ++i;
  while (i > 0) {
    --i;
    out.insert(out.begin(), static_cast<char>('a' + i % 26));
    i /= 26;
  }
  return out;
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// Splits n into k positive parts.
std::vector<std::size_t> split(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> parts(k, 1);
  for (std::size_t r = n - k; r > 0; --r) ++parts[pick(rng, k)];
  return parts;
}

// Random block structure of the rediscoverable class.
class ClassBuilder {
 public:
  ClassBuilder(std::mt19937_64& rng, ModelOptions options, std::function<std::string()> name)
      : rng_(rng), options_(options), name_(std::move(name)) {}

  Tree gen(std::size_t n, std::size_t nesting = 0) {
    if (n == 1) return leaf(nesting);
    enum Choice { Seq, Xor, Par, Loop, Sub };
    std::vector<Choice> choices{Seq, Xor, Par};
    if (n >= 3) choices.push_back(Loop);
    if (options_.named_subtrees && nesting < 3) {
      choices.push_back(Sub);
      if (options_.recursion && scope_.empty()) choices.push_back(Sub);
    }
    switch (choices[pick(rng_, choices.size())]) {
      case Sub: {
        std::string f = name_();
        scope_.push_back(f);
        Tree body = gen(n, nesting + 1);
        scope_.pop_back();
        return Tree::sub(f, body);
      }
      case Loop: {
        std::size_t body_n = 2 + pick(rng_, n - 2);
        auto halves = split(rng_, body_n, 2);
        Tree body = Tree::seq({gen(halves[0], nesting), gen(halves[1], nesting)});
        return Tree::loop({body, gen(n - body_n, nesting)});
      }
      default: {
        std::size_t k = 2 + pick(rng_, std::min<std::size_t>(n, 3) - 1);
        std::vector<Tree> kids;
        for (auto part : split(rng_, n, k)) kids.push_back(gen(part, nesting));
        static constexpr NodeKind kinds[] = {NodeKind::Seq, NodeKind::Xor, NodeKind::Par};
        return Tree::op(kinds[pick(rng_, 3)], std::move(kids));
      }
    }
  }

 private:
  Tree leaf(std::size_t nesting) {
    if (options_.recursion && !scope_.empty() && coin(rng_, 0.45)) return Tree::rec(scope_[pick(rng_, scope_.size())]);
    if (options_.named_subtrees && nesting < 3 && coin(rng_, 0.15)) {
      std::string f = name_();
      return Tree::sub(f, Tree::activity(name_()));
    }
    return Tree::activity(name_());
  }

  std::mt19937_64& rng_;
  ModelOptions options_;
  std::function<std::string()> name_;
  std::vector<std::string> scope_;
};

// Every node can finish: a △ is productive iff its binder is.
bool productive(const Tree& tree) {
  detail::CompiledTree ct(tree);
  const std::size_t n = ct.nodes.size();
  std::vector<char> prod(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = n; i-- > 0;) {
      const auto& node = ct.nodes[i];
      bool p = false;
      switch (node.kind) {
        case NodeKind::Activity:
        case NodeKind::Silent: p = true; break;
        case NodeKind::Rec: p = prod[static_cast<std::size_t>(node.binder)]; break;
        case NodeKind::Xor:
          p = std::any_of(node.kids.begin(), node.kids.end(), [&](auto k) { return prod[k]; });
          break;
        default: p = std::all_of(node.kids.begin(), node.kids.end(), [&](auto k) { return prod[k]; });
      }
      if (p && !prod[i]) {
        prod[i] = 1;
        changed = true;
      }
    }
  }
  return std::all_of(prod.begin(), prod.end(), [](char c) { return c != 0; });
}

}  // namespace

Tree gen_model(std::uint64_t seed, std::size_t size, const ModelOptions& options) {
  if (size == 0) throw Error(ErrorCode::InvalidConfig, "model size must be at least 1");
  std::mt19937_64 rng(mix(seed, size));
  // Half of the multi-leaf models are asked to contain recursion; plain
  // rejection sampling would rarely produce it.
  const bool want_recursion = options.recursion && size >= 2 && coin(rng, 0.5);
  for (int attempt = 0; attempt < 2000; ++attempt) {
    std::size_t next = 0;
    ClassBuilder b(rng, options, [&] { return fresh_name(next++); });
    Tree t = size == 1 ? Tree::activity(fresh_name(0)) : b.gen(size);
    if (attempt < 1000 && contains_recursion(t) != want_recursion) continue;
    if (validate(t).empty() && productive(t)) return t;
  }
  return Tree::activity(fresh_name(0));
}

Tree gen_random_tree(std::uint64_t seed, std::size_t size, bool recursion) {
  std::mt19937_64 rng(mix(seed, size + 1000));
  static const char* const names[] = {"a", "b", "c", "d"};
  static const char* const subs[] = {"f", "g", "h"};
  std::vector<std::string> scope;
  std::function<Tree(std::size_t)> gen = [&](std::size_t n) -> Tree {
    if (n <= 1) {
      if (recursion && !scope.empty() && coin(rng, 0.2)) return Tree::rec(scope[pick(rng, scope.size())]);
      if (coin(rng, 0.2)) return Tree::silent();
      return Tree::activity(names[pick(rng, 4)]);
    }
    switch (pick(rng, 6)) {
      case 0: {
        std::string f = subs[pick(rng, 3)];
        scope.push_back(f);
        Tree body = gen(n - 1);
        scope.pop_back();
        return Tree::sub(f, body);
      }
      case 1: {
        auto parts = split(rng, n, 2);
        return Tree::loop({gen(parts[0]), gen(parts[1])});
      }
      default: {
        std::size_t k = 1 + pick(rng, std::min<std::size_t>(n, 3));
        std::vector<Tree> kids;
        for (auto part : split(rng, n, k)) kids.push_back(gen(part));
        static constexpr NodeKind kinds[] = {NodeKind::Seq, NodeKind::Xor, NodeKind::Par, NodeKind::Seq};
        return Tree::op(kinds[pick(rng, 4)], std::move(kids));
      }
    }
  };
  return gen(std::max<std::size_t>(size, 1));
}

namespace {

constexpr std::size_t kWitnessWalks = 20000;

void merge_into(DfRelations& into, const DfRelations& from) {
  for (const auto& [ctx, lvl] : from.levels) {
    auto& mine = into.levels[ctx];
    mine.pairs.insert(lvl.pairs.begin(), lvl.pairs.end());
    mine.starts.insert(lvl.starts.begin(), lvl.starts.end());
    mine.ends.insert(lvl.ends.begin(), lvl.ends.end());
    mine.alphabet.insert(lvl.alphabet.begin(), lvl.alphabet.end());
  }
}

}  // namespace

HierLog gen_complete_log(const Tree& tree, const LangBound& bound) {
  if (auto v = validate(tree); !v.empty())
    throw Error(ErrorCode::InvalidConfig, "tree violates " + to_string(v.front().kind) + " at " + v.front().node);
  const DfRelations required = df_relations(tree);
  LangBound b = bound;
  while (true) {
    if (b.max_trace_len > 64)
      throw Error(ErrorCode::CompletenessUnreachable, "no complete log within trace length 64 for " + tree.to_string());
    Language lang = language(tree, b);
    std::vector<ActivityTrace> traces(lang.begin(), lang.end());
    DfRelations seen = df_relations(log_from_shapes(traces));
    std::mt19937_64 rng(mix(b.max_trace_len, b.max_recursion_depth));
    for (std::size_t walk = 0; walk < kWitnessWalks && !seen.covers(required); ++walk) {
      ActivityTrace t = sample_trace(tree, rng, 0.5, b.max_recursion_depth + 1);
      DfRelations r = df_relations(log_from_shapes({t}));
      if (seen.covers(r)) continue;
      merge_into(seen, r);
      traces.push_back(std::move(t));
    }
    if (seen.covers(required)) return log_from_shapes(traces);
    b.max_trace_len = std::max<std::size_t>(1, b.max_trace_len * 2);
    b.max_recursion_depth = std::max<std::size_t>(1, b.max_recursion_depth * 2);
  }
}

HierLog sample_language(const Tree& tree, const LangBound& bound, std::size_t max_traces, std::uint64_t seed) {
  Language lang = language(tree, bound);
  std::vector<ActivityTrace> traces(lang.begin(), lang.end());
  std::mt19937_64 rng(mix(seed, 7));
  std::shuffle(traces.begin(), traces.end(), rng);
  if (traces.size() > max_traces) traces.resize(max_traces);
  return log_from_shapes(traces);
}

namespace {

struct DeadEnd {};

class Walker {
 public:
  Walker(std::mt19937_64& rng, double redo_p, std::size_t max_recursion)
      : rng_(rng), redo_p_(redo_p), max_recursion_(max_recursion) {}

  void walk(const Tree& t, Path& prefix, ActivityTrace& out, std::size_t recursions) {
    switch (t.kind()) {
      case NodeKind::Silent: return;
      case NodeKind::Activity: {
        Path p = prefix;
        p.push_back(t.label());
        out.push_back(std::move(p));
        return;
      }
      case NodeKind::Seq:
        for (const auto& c : t.children()) walk(c, prefix, out, recursions);
        return;
      case NodeKind::Xor: walk(t.children()[pick(rng_, t.children().size())], prefix, out, recursions); return;
      case NodeKind::Loop: {
        walk(t.child(0), prefix, out, recursions);
        for (int i = 0; i < 50 && coin(rng_, redo_p_); ++i) {
          walk(t.children()[1 + pick(rng_, t.children().size() - 1)], prefix, out, recursions);
          walk(t.child(0), prefix, out, recursions);
        }
        return;
      }
      case NodeKind::Par: {
        std::vector<ActivityTrace> parts;
        for (const auto& c : t.children()) {
          parts.emplace_back();
          walk(c, prefix, parts.back(), recursions);
        }
        std::vector<std::size_t> pos(parts.size(), 0);
        std::size_t left = 0;
        for (const auto& p : parts) left += p.size();
        for (; left > 0; --left) {
          std::size_t r = pick(rng_, left), k = 0;
          while (r >= parts[k].size() - pos[k]) {
            r -= parts[k].size() - pos[k];
            ++k;
          }
          out.push_back(parts[k][pos[k]++]);
        }
        return;
      }
      case NodeKind::Sub: {
        scope_.push_back(&t);
        prefix.push_back(t.label());
        std::size_t before = out.size();
        walk(t.child(0), prefix, out, recursions);
        if (out.size() == before) out.push_back(prefix);
        prefix.pop_back();
        scope_.pop_back();
        return;
      }
      case NodeKind::Rec: {
        auto it = std::find_if(scope_.rbegin(), scope_.rend(), [&](const Tree* s) { return s->label() == t.label(); });
        if (it == scope_.rend()) throw Error(ErrorCode::UnboundRecursion, "rec:" + t.label());
        if (recursions >= max_recursion_) throw DeadEnd{};
        const Tree* binder = *it;
        walk(*binder, prefix, out, recursions + 1);
        return;
      }
    }
  }

 private:
  std::mt19937_64& rng_;
  double redo_p_;
  std::size_t max_recursion_;
  std::vector<const Tree*> scope_;
};

}  // namespace

ActivityTrace sample_trace(const Tree& tree, std::mt19937_64& rng, double redo_p, std::size_t max_recursion) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Walker w(rng, redo_p, max_recursion);
    ActivityTrace out;
    Path prefix;
    try {
      w.walk(tree, prefix, out, 0);
      return out;
    } catch (const DeadEnd&) {
    }
  }
  throw Error(ErrorCode::InvalidConfig, "could not sample a finite trace within the recursion limit");
}

HierLog gen_random_log(std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 99));
  static const char* const names[] = {"a", "b", "c", "d"};
  std::vector<ActivityTrace> traces(1 + pick(rng, 12));
  for (auto& t : traces) {
    t.resize(pick(rng, 7));
    for (auto& e : t) {
      e.resize(1 + pick(rng, 3));
      for (auto& a : e) a = names[pick(rng, 4)];
    }
  }
  return log_from_shapes(traces);
}

Tree gen_hierarchical_model(std::uint64_t seed, std::size_t depth, std::size_t width) {
  if (depth == 0 || width < 2) throw Error(ErrorCode::InvalidConfig, "depth >= 1 and width >= 2 required");
  std::mt19937_64 rng(mix(seed, depth * 131 + width));
  std::size_t next = 0;
  Tree inner;
  for (std::size_t level = depth; level-- > 0;) {
    ModelOptions flat{false, false};
    std::string tag = "L" + std::to_string(level) + "_";
    ClassBuilder b(rng, flat, [&] { return tag + fresh_name(next++); });
    Tree body = b.gen(width);
    if (level + 1 < depth) {
      // Replace one activity leaf by the call into the level below.
      std::vector<std::string> acts;
      walk(body, [&](const Tree& n, const auto&) {
        if (n.kind() == NodeKind::Activity) acts.push_back(n.label());
      });
      std::string target = acts[pick(rng, acts.size())];
      std::string call = "call" + std::to_string(level + 1);
      std::function<Tree(const Tree&)> swap = [&](const Tree& n) -> Tree {
        if (n.kind() == NodeKind::Activity && n.label() == target) return Tree::sub(call, inner);
        if (n.children().empty()) return n;
        std::vector<Tree> kids;
        for (const auto& c : n.children()) kids.push_back(swap(c));
        if (n.kind() == NodeKind::Sub) return Tree::sub(n.label(), kids.front());
        return Tree::op(n.kind(), std::move(kids));
      };
      body = swap(body);
    }
    inner = body;
  }
  return inner;
}

HierLog gen_hierarchical_log(std::uint64_t seed, std::size_t depth, std::size_t traces, std::size_t width) {
  Tree model = gen_hierarchical_model(seed, depth, width);
  std::mt19937_64 rng(mix(seed, 4242 + depth));
  std::vector<ActivityTrace> out;
  out.reserve(traces);
  for (std::size_t i = 0; i < traces; ++i) out.push_back(sample_trace(model, rng));
  return log_from_shapes(out);
}

}  // namespace hpm
