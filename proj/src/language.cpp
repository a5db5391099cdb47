#include "hpm/language.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "compiled_tree.hpp"

namespace hpm {

using detail::CNode;
using detail::CompiledTree;
using detail::EventTable;
using detail::Sym;
using detail::VecHash;

namespace detail {

CompiledTree::CompiledTree(const Tree& tree, bool strict) : strict_(strict) {
  std::vector<std::pair<Sym, std::uint32_t>> scope;
  add(tree, scope);
}

std::uint32_t CompiledTree::add(const Tree& t, std::vector<std::pair<Sym, std::uint32_t>>& scope) {
  auto index = static_cast<std::uint32_t>(nodes.size());
  nodes.push_back(CNode{t.kind(), 0, {}, -1});
  if (t.kind() == NodeKind::Activity || t.kind() == NodeKind::Sub || t.kind() == NodeKind::Rec)
    nodes[index].sym = syms.intern(t.label());
  if (t.kind() == NodeKind::Rec) {
    auto it = std::find_if(scope.rbegin(), scope.rend(), [&](const auto& s) { return s.first == nodes[index].sym; });
    if (it == scope.rend()) {
      if (!strict_) return index;
      throw Error(ErrorCode::UnboundRecursion, "rec:" + t.label() + " has no enclosing sub:" + t.label());
    }
    nodes[index].binder = static_cast<std::int32_t>(it->second);
    return index;
  }
  if (t.kind() == NodeKind::Sub) scope.emplace_back(nodes[index].sym, index);
  for (const auto& c : t.children()) {
    auto k = add(c, scope);
    nodes[index].kids.push_back(k);
  }
  if (t.kind() == NodeKind::Sub) scope.pop_back();
  return index;
}

}  // namespace detail

namespace {

using Trace = std::vector<std::uint32_t>;
using TraceSet = std::set<Trace>;

class Enumerator {
 public:
  Enumerator(const CompiledTree& ct, std::size_t max_len) : ct_(ct), max_len_(max_len) {}

  const TraceSet& lang(std::uint32_t i, std::size_t budget) {
    auto key = std::make_pair(i, budget);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    TraceSet result = compute(i, budget);
    return memo_.emplace(key, std::move(result)).first->second;
  }

  ActivityTrace decode(const Trace& t) const {
    ActivityTrace out;
    for (auto e : t) {
      Path p;
      for (auto s : events_.path(e)) p.push_back(ct_.syms.name(s));
      out.push_back(std::move(p));
    }
    return out;
  }

 private:
  std::uint32_t prefixed(Sym f, std::uint32_t event) {
    auto key = (static_cast<std::uint64_t>(f) << 32) | event;
    if (auto it = prefix_memo_.find(key); it != prefix_memo_.end()) return it->second;
    std::vector<Sym> p;
    p.reserve(events_.path(event).size() + 1);
    p.push_back(f);
    const auto& tail = events_.path(event);
    p.insert(p.end(), tail.begin(), tail.end());
    auto id = events_.intern(p);
    prefix_memo_.emplace(key, id);
    return id;
  }

  TraceSet concat(const TraceSet& a, const TraceSet& b) const {
    TraceSet out;
    for (const auto& x : a)
      for (const auto& y : b) {
        if (x.size() + y.size() > max_len_) continue;
        Trace t = x;
        t.insert(t.end(), y.begin(), y.end());
        out.insert(std::move(t));
      }
    return out;
  }

  static void interleave(const Trace& a, std::size_t i, const Trace& b, std::size_t j, Trace& cur, TraceSet& out) {
    if (i == a.size() && j == b.size()) {
      out.insert(cur);
      return;
    }
    if (i < a.size()) {
      cur.push_back(a[i]);
      interleave(a, i + 1, b, j, cur, out);
      cur.pop_back();
    }
    if (j < b.size()) {
      cur.push_back(b[j]);
      interleave(a, i, b, j + 1, cur, out);
      cur.pop_back();
    }
  }

  TraceSet shuffle(const TraceSet& a, const TraceSet& b) const {
    TraceSet out;
    Trace cur;
    for (const auto& x : a)
      for (const auto& y : b) {
        if (x.size() + y.size() > max_len_) continue;
        interleave(x, 0, y, 0, cur, out);
      }
    return out;
  }

  TraceSet compute(std::uint32_t i, std::size_t budget) {
    const CNode& n = ct_.nodes[i];
    switch (n.kind) {
      case NodeKind::Activity: {
        if (max_len_ == 0) return {};
        return {Trace{events_.intern({n.sym})}};
      }
      case NodeKind::Silent: return {Trace{}};
      case NodeKind::Rec: {
        if (budget == 0) return {};
        return lang(static_cast<std::uint32_t>(n.binder), budget - 1);
      }
      case NodeKind::Sub: {
        TraceSet body = lang(n.kids[0], budget);
        TraceSet out;
        for (const auto& t : body) {
          if (t.empty()) {
            if (max_len_ >= 1) out.insert(Trace{events_.intern({n.sym})});
            continue;
          }
          Trace p;
          p.reserve(t.size());
          for (auto e : t) p.push_back(prefixed(n.sym, e));
          out.insert(std::move(p));
        }
        return out;
      }
      case NodeKind::Seq: {
        TraceSet acc{Trace{}};
        for (auto k : n.kids) {
          acc = concat(acc, lang(k, budget));
          if (acc.empty()) break;
        }
        return acc;
      }
      case NodeKind::Xor: {
        TraceSet out;
        for (auto k : n.kids) {
          const auto& s = lang(k, budget);
          out.insert(s.begin(), s.end());
        }
        return out;
      }
      case NodeKind::Par: {
        TraceSet acc{Trace{}};
        for (auto k : n.kids) {
          acc = shuffle(acc, lang(k, budget));
          if (acc.empty()) break;
        }
        return acc;
      }
      case NodeKind::Loop: {
        const TraceSet body = lang(n.kids[0], budget);
        TraceSet redo;
        for (std::size_t r = 1; r < n.kids.size(); ++r) {
          const auto& s = lang(n.kids[r], budget);
          redo.insert(s.begin(), s.end());
        }
        TraceSet out = body;
        TraceSet frontier = body;
        TraceSet redo_body = concat(redo, body);
        while (!frontier.empty()) {
          TraceSet next;
          for (auto& t : concat(frontier, redo_body))
            if (!out.count(t)) next.insert(t);
          out.insert(next.begin(), next.end());
          frontier = std::move(next);
        }
        return out;
      }
    }
    return {};
  }

  const CompiledTree& ct_;
  std::size_t max_len_;
  EventTable events_;
  std::map<std::pair<std::uint32_t, std::size_t>, TraceSet> memo_;
  std::unordered_map<std::uint64_t, std::uint32_t> prefix_memo_;
};

struct HeadSets {
  std::vector<std::set<Sym>> starts, ends;
  std::vector<char> nullable;
};

HeadSets compute_heads(const CompiledTree& ct) {
  HeadSets h;
  auto n = ct.nodes.size();
  h.starts.resize(n);
  h.ends.resize(n);
  h.nullable.resize(n, 0);
  // Children always have larger indices than their parent.
  for (std::size_t ii = n; ii-- > 0;) {
    const CNode& node = ct.nodes[ii];
    auto& st = h.starts[ii];
    auto& en = h.ends[ii];
    switch (node.kind) {
      case NodeKind::Activity:
      case NodeKind::Sub:
      case NodeKind::Rec:
        st = {node.sym};
        en = {node.sym};
        h.nullable[ii] = 0;
        break;
      case NodeKind::Silent: h.nullable[ii] = 1; break;
      case NodeKind::Xor:
        for (auto k : node.kids) {
          st.insert(h.starts[k].begin(), h.starts[k].end());
          en.insert(h.ends[k].begin(), h.ends[k].end());
          h.nullable[ii] |= h.nullable[k];
        }
        break;
      case NodeKind::Par:
        h.nullable[ii] = 1;
        for (auto k : node.kids) {
          st.insert(h.starts[k].begin(), h.starts[k].end());
          en.insert(h.ends[k].begin(), h.ends[k].end());
          h.nullable[ii] &= h.nullable[k];
        }
        break;
      case NodeKind::Seq: {
        h.nullable[ii] = 1;
        for (auto k : node.kids) {
          st.insert(h.starts[k].begin(), h.starts[k].end());
          if (!h.nullable[k]) {
            h.nullable[ii] = 0;
            break;
          }
        }
        for (auto it = node.kids.rbegin(); it != node.kids.rend(); ++it) {
          en.insert(h.ends[*it].begin(), h.ends[*it].end());
          if (!h.nullable[*it]) break;
        }
        break;
      }
      case NodeKind::Loop: {
        auto body = node.kids[0];
        h.nullable[ii] = h.nullable[body];
        st = h.starts[body];
        en = h.ends[body];
        if (h.nullable[body]) {
          for (std::size_t r = 1; r < node.kids.size(); ++r) {
            st.insert(h.starts[node.kids[r]].begin(), h.starts[node.kids[r]].end());
            en.insert(h.ends[node.kids[r]].begin(), h.ends[node.kids[r]].end());
          }
        }
        break;
      }
    }
  }
  return h;
}

// Heads (level-1 activities) any event of a node can carry.
std::vector<std::set<Sym>> compute_alphabet_heads(const CompiledTree& ct) {
  std::vector<std::set<Sym>> out(ct.nodes.size());
  for (std::size_t ii = ct.nodes.size(); ii-- > 0;) {
    const CNode& node = ct.nodes[ii];
    if (node.kind == NodeKind::Activity || node.kind == NodeKind::Sub || node.kind == NodeKind::Rec) {
      out[ii] = {node.sym};
    } else {
      for (auto k : node.kids) out[ii].insert(out[k].begin(), out[k].end());
    }
  }
  return out;
}

std::set<Activity> names_of(const CompiledTree& ct, const std::set<Sym>& syms) {
  std::set<Activity> out;
  for (auto s : syms) out.insert(ct.syms.name(s));
  return out;
}

}  // namespace

Language language(const Tree& tree, const LangBound& bound) {
  CompiledTree ct(tree);
  Enumerator en(ct, bound.max_trace_len);
  Language out;
  for (const auto& t : en.lang(0, bound.max_recursion_depth)) out.insert(en.decode(t));
  return out;
}

void check_recursion_bound(const Tree& tree) { CompiledTree ct(tree); }

bool nullable(const Tree& tree) {
  CompiledTree ct(tree, false);
  return compute_heads(ct).nullable[0] != 0;
}

std::set<Activity> start_heads(const Tree& tree) {
  CompiledTree ct(tree, false);
  return names_of(ct, compute_heads(ct).starts[0]);
}

std::set<Activity> end_heads(const Tree& tree) {
  CompiledTree ct(tree, false);
  return names_of(ct, compute_heads(ct).ends[0]);
}

// ---------------------------------------------------------------------------

struct Acceptor::Impl {
  CompiledTree ct;
  std::vector<std::set<Sym>> heads;
  EventTable events;

  struct Key {
    std::uint32_t node;
    std::uint32_t depth;
    bool prefix;
    Trace seg;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return VecHash{}(k.seg) ^ (static_cast<std::size_t>(k.node) * 0x100000001b3ULL) ^
             (static_cast<std::size_t>(k.depth) << 40) ^ (k.prefix ? 0x5bd1e995ULL : 0);
    }
  };
  std::unordered_map<Key, bool, KeyHash> memo;

  explicit Impl(const Tree& t) : ct(t), heads(compute_alphabet_heads(ct)) {}

  Trace encode(const ActivityTrace& trace) {
    Trace out;
    out.reserve(trace.size());
    for (const auto& p : trace) {
      std::vector<Sym> syms;
      syms.reserve(p.size());
      for (const auto& a : p) syms.push_back(ct.syms.intern(a));
      out.push_back(events.intern(syms));
    }
    return out;
  }

  static Trace slice(const Trace& seg, std::size_t a, std::size_t b) {
    return Trace(seg.begin() + static_cast<std::ptrdiff_t>(a), seg.begin() + static_cast<std::ptrdiff_t>(b));
  }

  bool match(std::uint32_t i, const Trace& seg, std::uint32_t d, bool prefix) {
    Key key{i, d, prefix, seg};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool r = compute(i, seg, d, prefix);
    memo.emplace(std::move(key), r);
    return r;
  }

  bool compute(std::uint32_t i, const Trace& seg, std::uint32_t d, bool prefix) {
    const CNode& n = ct.nodes[i];
    const std::size_t m = seg.size();
    switch (n.kind) {
      case NodeKind::Silent: return m == 0;
      case NodeKind::Activity: {
        if (m == 0) return prefix;
        if (m != 1) return false;
        const auto& p = events.path(seg[0]);
        return p.size() == d + 1 && p[d] == n.sym;
      }
      case NodeKind::Rec: return match(static_cast<std::uint32_t>(n.binder), seg, d, prefix);
      case NodeKind::Sub: {
        if (m == 0) return prefix;
        if (m == 1) {
          const auto& p = events.path(seg[0]);
          if (p.size() == d + 1) return p[d] == n.sym && match(n.kids[0], Trace{}, d + 1, false);
        }
        for (auto e : seg) {
          const auto& p = events.path(e);
          if (p.size() <= d + 1 || p[d] != n.sym) return false;
        }
        return match(n.kids[0], seg, d + 1, prefix);
      }
      case NodeKind::Xor:
        for (auto k : n.kids)
          if (match(k, seg, d, prefix)) return true;
        return false;
      case NodeKind::Seq: {
        std::vector<char> reach(m + 1, 0);
        reach[0] = 1;
        for (std::size_t c = 0; c < n.kids.size(); ++c) {
          auto k = n.kids[c];
          if (prefix) {
            for (std::size_t p = 0; p <= m; ++p)
              if (reach[p] && match(k, slice(seg, p, m), d, true)) return true;
          }
          if (c + 1 == n.kids.size() && prefix) return false;
          std::vector<char> next(m + 1, 0);
          bool any = false;
          for (std::size_t p = 0; p <= m; ++p) {
            if (!reach[p]) continue;
            for (std::size_t q = p; q <= m; ++q)
              if (!next[q] && match(k, slice(seg, p, q), d, false)) next[q] = 1, any = true;
          }
          if (!any) return false;
          reach = std::move(next);
        }
        return reach[m] != 0;
      }
      case NodeKind::Loop: {
        std::vector<char> body_start(m + 1, 0), after_body(m + 1, 0);
        std::vector<std::size_t> todo_start{0}, todo_after;
        body_start[0] = 1;
        while (!todo_start.empty() || !todo_after.empty()) {
          if (!todo_start.empty()) {
            auto p = todo_start.back();
            todo_start.pop_back();
            for (std::size_t q = p; q <= m; ++q)
              if (!after_body[q] && match(n.kids[0], slice(seg, p, q), d, false)) {
                after_body[q] = 1;
                todo_after.push_back(q);
              }
          } else {
            auto p = todo_after.back();
            todo_after.pop_back();
            for (std::size_t r = 1; r < n.kids.size(); ++r)
              for (std::size_t q = p; q <= m; ++q)
                if (!body_start[q] && match(n.kids[r], slice(seg, p, q), d, false)) {
                  body_start[q] = 1;
                  todo_start.push_back(q);
                }
          }
        }
        if (!prefix) return after_body[m] != 0;
        for (std::size_t p = 0; p <= m; ++p) {
          if (body_start[p] && match(n.kids[0], slice(seg, p, m), d, true)) return true;
          if (after_body[p])
            for (std::size_t r = 1; r < n.kids.size(); ++r)
              if (match(n.kids[r], slice(seg, p, m), d, true)) return true;
        }
        return false;
      }
      case NodeKind::Par: {
        std::vector<std::vector<std::uint32_t>> candidates(m);
        for (std::size_t e = 0; e < m; ++e) {
          const auto& p = events.path(seg[e]);
          if (p.size() <= d) return false;
          for (std::uint32_t c = 0; c < n.kids.size(); ++c)
            if (heads[n.kids[c]].count(p[d])) candidates[e].push_back(c);
          if (candidates[e].empty()) return false;
        }
        std::vector<Trace> parts(n.kids.size());
        return assign(n, seg, candidates, 0, parts, d, prefix);
      }
    }
    return false;
  }

  bool assign(const CNode& n, const Trace& seg, const std::vector<std::vector<std::uint32_t>>& candidates,
              std::size_t e, std::vector<Trace>& parts, std::uint32_t d, bool prefix) {
    if (e == seg.size()) {
      for (std::size_t c = 0; c < parts.size(); ++c)
        if (!match(n.kids[c], parts[c], d, prefix)) return false;
      return true;
    }
    for (auto c : candidates[e]) {
      parts[c].push_back(seg[e]);
      bool ok = match(n.kids[c], parts[c], d, true) && assign(n, seg, candidates, e + 1, parts, d, prefix);
      parts[c].pop_back();
      if (ok) return true;
    }
    return false;
  }

  void alphabet(std::uint32_t i, std::size_t budget, std::vector<Sym>& prefix_path, std::set<std::vector<Sym>>& out,
                const std::vector<char>& nullable_nodes) const {
    const CNode& n = ct.nodes[i];
    switch (n.kind) {
      case NodeKind::Silent: return;
      case NodeKind::Activity: {
        auto p = prefix_path;
        p.push_back(n.sym);
        out.insert(std::move(p));
        return;
      }
      case NodeKind::Rec:
        if (budget == 0) return;
        alphabet(static_cast<std::uint32_t>(n.binder), budget - 1, prefix_path, out, nullable_nodes);
        return;
      case NodeKind::Sub:
        prefix_path.push_back(n.sym);
        if (nullable_nodes[n.kids[0]]) out.insert(prefix_path);
        alphabet(n.kids[0], budget, prefix_path, out, nullable_nodes);
        prefix_path.pop_back();
        return;
      default:
        for (auto k : n.kids) alphabet(k, budget, prefix_path, out, nullable_nodes);
    }
  }
};

Acceptor::Acceptor(const Tree& tree) : impl_(std::make_unique<Impl>(tree)) {}
Acceptor::~Acceptor() = default;
Acceptor::Acceptor(Acceptor&&) noexcept = default;
Acceptor& Acceptor::operator=(Acceptor&&) noexcept = default;

bool Acceptor::accepts(const ActivityTrace& trace) { return impl_->match(0, impl_->encode(trace), 0, false); }

bool Acceptor::accepts_prefix(const ActivityTrace& trace) { return impl_->match(0, impl_->encode(trace), 0, true); }

std::set<Path> Acceptor::event_alphabet(std::size_t recursion_depth) const {
  auto heads = compute_heads(impl_->ct);
  std::set<std::vector<Sym>> raw;
  std::vector<Sym> prefix;
  impl_->alphabet(0, recursion_depth, prefix, raw, heads.nullable);
  std::set<Path> out;
  for (const auto& r : raw) {
    Path p;
    for (auto s : r) p.push_back(impl_->ct.syms.name(s));
    out.insert(std::move(p));
  }
  return out;
}

bool accepts(const Tree& tree, const ActivityTrace& trace) { return Acceptor(tree).accepts(trace); }

bool accepts(const Tree& tree, const HierTrace& trace) { return accepts(tree, shape(trace)); }

}  // namespace hpm
