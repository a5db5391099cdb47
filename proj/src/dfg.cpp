#include "hpm/dfg.hpp"

#include <algorithm>
#include <numeric>

#include "engine.hpp"

namespace hpm {

namespace detail {

EventId LogIndex::add_path(const Path& path) {
  if (path.empty()) throw Error(ErrorCode::InvalidActivity, "event without activities");
  // Intern suffixes shortest first so each tail already exists.
  EventId tail = kNoEvent;
  for (std::size_t k = path.size(); k-- > 0;) {
    Sym head = syms_.intern(path[k]);
    std::uint64_t key = (static_cast<std::uint64_t>(head) << 32) | tail;
    auto [it, inserted] = suffixes_.emplace(key, static_cast<EventId>(head_.size()));
    if (inserted) {
      head_.push_back(head);
      len_.push_back(tail == kNoEvent ? 1 : len_[tail] + 1);
      tail_.push_back(tail);
    }
    tail = it->second;
  }
  return tail;
}

ILog LogIndex::import(const HierLog& log) {
  ILog out;
  for (const auto& t : log.traces) {
    ITrace it;
    it.reserve(t.events.size());
    for (const auto& e : t.events) it.push_back(add_path(e.path));
    ++out[it];
  }
  return out;
}

Path LogIndex::path_of(EventId e) const {
  Path p;
  for (; e != kNoEvent; e = tail_[e]) p.push_back(syms_.name(head_[e]));
  return p;
}

HierLog LogIndex::export_log(const ILog& log) const {
  HierLog out;
  for (const auto& [t, count] : log) {
    HierTrace ht;
    for (auto e : t) ht.events.emplace_back(path_of(e));
    for (std::size_t i = 0; i < count; ++i) out.traces.push_back(ht);
  }
  return out;
}

DenseDfg build_dense(const LogIndex& index, const ILog& log) {
  std::vector<Sym> heads;
  for (const auto& [t, _] : log)
    for (auto e : t) heads.push_back(index.head(e));
  std::sort(heads.begin(), heads.end());
  heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
  std::sort(heads.begin(), heads.end(), [&](Sym a, Sym b) { return index.name(a) < index.name(b); });

  DenseDfg g;
  const std::size_t n = heads.size();
  g.syms = heads;
  std::unordered_map<Sym, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) {
    pos.emplace(heads[i], i);
    g.names.push_back(index.name(heads[i]));
  }
  g.edges.assign(n, std::vector<std::size_t>(n, 0));
  g.starts.assign(n, 0);
  g.ends.assign(n, 0);
  for (const auto& [t, count] : log) {
    if (t.empty()) {
      g.empty_traces += count;
      continue;
    }
    g.starts[pos[index.head(t.front())]] += count;
    g.ends[pos[index.head(t.back())]] += count;
    for (std::size_t i = 1; i < t.size(); ++i) g.edges[pos[index.head(t[i - 1])]][pos[index.head(t[i])]] += count;
  }
  return g;
}

DenseDfg dense_from(const Dfg& dfg) {
  DenseDfg g;
  std::map<Activity, std::size_t> pos;
  for (const auto& a : dfg.nodes) {
    pos.emplace(a, g.names.size());
    g.syms.push_back(static_cast<Sym>(g.names.size()));
    g.names.push_back(a);
  }
  const std::size_t n = g.names.size();
  g.edges.assign(n, std::vector<std::size_t>(n, 0));
  g.starts.assign(n, 0);
  g.ends.assign(n, 0);
  auto at = [&](const Activity& a) {
    auto it = pos.find(a);
    if (it == pos.end()) throw Error(ErrorCode::InvalidConfig, "activity " + a + " is not a graph node");
    return it->second;
  };
  for (const auto& [e, c] : dfg.edges) g.edges[at(e.first)][at(e.second)] = c;
  for (const auto& [a, c] : dfg.starts) g.starts[at(a)] = c;
  for (const auto& [a, c] : dfg.ends) g.ends[at(a)] = c;
  g.empty_traces = dfg.empty_traces;
  return g;
}

Dfg sparse_from(const DenseDfg& g) {
  Dfg d;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    d.nodes.insert(g.names[i]);
    if (g.starts[i]) d.starts[g.names[i]] = g.starts[i];
    if (g.ends[i]) d.ends[g.names[i]] = g.ends[i];
    for (std::size_t j = 0; j < n; ++j)
      if (g.edges[i][j]) d.edges[{g.names[i], g.names[j]}] = g.edges[i][j];
  }
  d.empty_traces = g.empty_traces;
  return d;
}

namespace {

void thin(std::vector<std::size_t>& counts, double paths) {
  std::size_t mx = 0;
  for (auto c : counts) mx = std::max(mx, c);
  const double threshold = (1.0 - paths) * static_cast<double>(mx);
  for (auto& c : counts)
    if (c && static_cast<double>(c) + 1e-9 < threshold) c = 0;
}

}  // namespace

void filter_dense(DenseDfg& g, double paths) {
  if (paths < 0.0 || paths > 1.0) throw Error(ErrorCode::InvalidConfig, "paths must lie in [0, 1]");
  if (paths >= 1.0) return;
  for (auto& row : g.edges) thin(row, paths);
  thin(g.starts, paths);
  thin(g.ends, paths);
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Groups ordered by their least member.
  std::vector<std::vector<std::size_t>> groups() {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(parent.size(), SIZE_MAX);
    for (std::size_t i = 0; i < parent.size(); ++i) {
      auto r = find(i);
      if (slot[r] == SIZE_MAX) {
        slot[r] = out.size();
        out.emplace_back();
      }
      out[slot[r]].push_back(i);
    }
    return out;
  }
};

class BitMatrix {
 public:
  explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}
  bool get(std::size_t i, std::size_t j) const { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U; }
  void set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
  void or_row(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] |= bits_[src * words_ + w];
  }

 private:
  std::size_t n_, words_;
  std::vector<std::uint64_t> bits_;
};

BitMatrix closure(const DenseDfg& g) {
  const std::size_t n = g.size();
  BitMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.edges[i][j]) r.set(i, j);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r.get(i, k)) r.or_row(i, k);
  return r;
}

std::optional<DenseCut> xor_cut(const DenseDfg& g) {
  const std::size_t n = g.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.edges[i][j]) uf.unite(i, j);
  auto blocks = uf.groups();
  if (blocks.size() < 2) return std::nullopt;
  return DenseCut{CutOp::Xor, std::move(blocks)};
}

std::optional<DenseCut> seq_cut(const DenseDfg& g, const BitMatrix& r) {
  const std::size_t n = g.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (r.get(i, j) == r.get(j, i)) uf.unite(i, j);
  // Merge groups that reach each other until the group order is acyclic.
  while (true) {
    auto groups = uf.groups();
    if (groups.size() < 2) return std::nullopt;
    std::vector<std::size_t> gid(n);
    for (std::size_t k = 0; k < groups.size(); ++k)
      for (auto i : groups[k]) gid[i] = k;
    const std::size_t m = groups.size();
    std::vector<std::vector<char>> reach(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (gid[i] != gid[j] && r.get(i, j)) reach[gid[i]][gid[j]] = 1;
    bool merged = false;
    for (std::size_t a = 0; a < m && !merged; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        if (reach[a][b] && reach[b][a]) {
          uf.unite(groups[a].front(), groups[b].front());
          merged = true;
          break;
        }
    if (merged) continue;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> out_degree(m, 0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) out_degree[a] += reach[a][b];
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return out_degree[a] > out_degree[b]; });
    std::vector<std::size_t> rank(m);
    for (std::size_t k = 0; k < m; ++k) rank[order[k]] = k;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (rank[gid[i]] < rank[gid[j]] && (!r.get(i, j) || r.get(j, i))) return std::nullopt;
    DenseCut cut{CutOp::Seq, {}};
    for (auto k : order) cut.blocks.push_back(groups[k]);
    return cut;
  }
}

std::optional<DenseCut> par_cut(const DenseDfg& g) {
  const std::size_t n = g.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(g.edges[i][j] && g.edges[j][i])) uf.unite(i, j);
  auto groups = uf.groups();
  std::vector<std::vector<std::size_t>> good, bad;
  for (auto& grp : groups) {
    bool has_start = std::any_of(grp.begin(), grp.end(), [&](auto i) { return g.starts[i] > 0; });
    bool has_end = std::any_of(grp.begin(), grp.end(), [&](auto i) { return g.ends[i] > 0; });
    (has_start && has_end ? good : bad).push_back(std::move(grp));
  }
  if (good.size() < 2) return std::nullopt;
  for (auto& b : bad) good.front().insert(good.front().end(), b.begin(), b.end());
  std::sort(good.front().begin(), good.front().end());
  return DenseCut{CutOp::Par, std::move(good)};
}

std::optional<DenseCut> loop_cut(const DenseDfg& g) {
  const std::size_t n = g.size();
  std::vector<char> in_body(n, 0);
  std::vector<std::size_t> starts, ends;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.starts[i]) starts.push_back(i);
    if (g.ends[i]) ends.push_back(i);
    if (g.starts[i] || g.ends[i]) in_body[i] = 1;
  }
  if (starts.empty() || ends.empty()) return std::nullopt;

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.edges[i][j] && !in_body[i] && !in_body[j]) uf.unite(i, j);
  std::vector<std::vector<std::size_t>> redo;
  for (auto& grp : uf.groups())
    if (!in_body[grp.front()]) redo.push_back(std::move(grp));

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < redo.size(); ++k) {
      std::vector<char> in_x(n, 0);
      for (auto i : redo[k]) in_x[i] = 1;
      bool ok = true;
      std::vector<char> end_into(n, 0), start_from(n, 0);
      for (std::size_t u = 0; u < n && ok; ++u)
        for (std::size_t v = 0; v < n && ok; ++v) {
          if (!g.edges[u][v] || in_x[u] == in_x[v]) continue;
          if (in_x[v]) {
            if (!in_body[u] || !g.ends[u]) ok = false;
            end_into[u] = 1;
          } else {
            if (!in_body[v] || !g.starts[v]) ok = false;
            start_from[v] = 1;
          }
        }
      if (ok) ok = std::all_of(ends.begin(), ends.end(), [&](auto e) { return end_into[e]; }) &&
                   std::all_of(starts.begin(), starts.end(), [&](auto s) { return start_from[s]; });
      if (!ok) {
        for (auto i : redo[k]) in_body[i] = 1;
        redo.erase(redo.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  if (redo.empty()) return std::nullopt;
  DenseCut cut{CutOp::Loop, {}};
  cut.blocks.emplace_back();
  for (std::size_t i = 0; i < n; ++i)
    if (in_body[i]) cut.blocks.front().push_back(i);
  for (auto& r : redo) cut.blocks.push_back(std::move(r));
  return cut;
}

}  // namespace

std::optional<DenseCut> find_dense_cut(const DenseDfg& g) {
  if (g.size() == 0) throw Error(ErrorCode::EmptyGraph, "no activities to cut");
  if (auto c = xor_cut(g)) return c;
  BitMatrix r = closure(g);
  if (auto c = seq_cut(g, r)) return c;
  if (auto c = par_cut(g)) return c;
  return loop_cut(g);
}

namespace {

void add_to(ILog& log, ITrace t, std::size_t count) { log[std::move(t)] += count; }

// Longest subsequence with non-decreasing block numbers.
std::vector<char> monotone_keep(const std::vector<std::size_t>& blocks) {
  const std::size_t m = blocks.size();
  std::vector<char> keep(m, 1);
  if (std::is_sorted(blocks.begin(), blocks.end())) return keep;
  std::vector<std::size_t> len(m, 1), prev(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (blocks[j] <= blocks[i] && len[j] + 1 > len[i]) {
        len[i] = len[j] + 1;
        prev[i] = j;
      }
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (len[i] > len[best]) best = i;
  std::fill(keep.begin(), keep.end(), 0);
  for (std::size_t i = best; i != SIZE_MAX; i = prev[i]) keep[i] = 1;
  return keep;
}

}  // namespace

std::vector<ILog> split_ilog(const LogIndex& index, const ILog& log, CutOp op,
                             const std::unordered_map<Sym, std::size_t>& block_of, std::size_t nblocks) {
  std::vector<ILog> out(nblocks);
  for (const auto& [t, count] : log) {
    std::vector<std::size_t> blk;
    blk.reserve(t.size());
    for (auto e : t) {
      auto it = block_of.find(index.head(e));
      if (it == block_of.end())
        throw Error(ErrorCode::UncoveredActivity, "activity " + index.name(index.head(e)) + " is in no block");
      blk.push_back(it->second);
    }
    switch (op) {
      case CutOp::Xor: {
        std::vector<std::size_t> votes(nblocks, 0);
        for (auto b : blk) ++votes[b];
        std::size_t win = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        ITrace part;
        for (std::size_t i = 0; i < t.size(); ++i)
          if (blk[i] == win) part.push_back(t[i]);
        add_to(out[win], std::move(part), count);
        break;
      }
      case CutOp::Seq: {
        auto keep = monotone_keep(blk);
        std::vector<ITrace> parts(nblocks);
        for (std::size_t i = 0; i < t.size(); ++i)
          if (keep[i]) parts[blk[i]].push_back(t[i]);
        for (std::size_t b = 0; b < nblocks; ++b) add_to(out[b], std::move(parts[b]), count);
        break;
      }
      case CutOp::Par: {
        std::vector<ITrace> parts(nblocks);
        for (std::size_t i = 0; i < t.size(); ++i) parts[blk[i]].push_back(t[i]);
        for (std::size_t b = 0; b < nblocks; ++b) add_to(out[b], std::move(parts[b]), count);
        break;
      }
      case CutOp::Loop: {
        // Alternate body and redo runs; missing body runs become ε.
        bool expect_body = true;
        std::size_t i = 0;
        while (i < t.size()) {
          std::size_t j = i;
          while (j < t.size() && blk[j] == blk[i]) ++j;
          bool is_body = blk[i] == 0;
          if (!is_body && expect_body) add_to(out[0], {}, count);
          add_to(out[blk[i]], ITrace(t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(j)),
                 count);
          expect_body = !is_body;
          i = j;
        }
        if (expect_body) add_to(out[0], {}, count);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

using namespace detail;

std::string to_string(CutOp op) {
  switch (op) {
    case CutOp::Seq: return "seq";
    case CutOp::Xor: return "xor";
    case CutOp::Loop: return "loop";
    case CutOp::Par: return "par";
  }
  return "unknown";
}

Dfg build_dfg(const HierLog& log) {
  LogIndex index;
  return sparse_from(build_dense(index, index.import(log)));
}

Dfg filter_infrequent(const Dfg& dfg, double paths) {
  DenseDfg g = dense_from(dfg);
  filter_dense(g, paths);
  Dfg out = sparse_from(g);
  out.nodes = dfg.nodes;
  return out;
}

std::optional<Cut> find_cut(const Dfg& dfg) {
  DenseDfg g = dense_from(dfg);
  auto dc = find_dense_cut(g);
  if (!dc) return std::nullopt;
  Cut cut{dc->op, {}};
  for (const auto& b : dc->blocks) {
    std::set<Activity> s;
    for (auto i : b) s.insert(g.names[i]);
    cut.partition.push_back(std::move(s));
  }
  return cut;
}

std::vector<HierLog> split_log(const HierLog& log, const Cut& cut) {
  LogIndex index;
  ILog il = index.import(log);
  std::unordered_map<Sym, std::size_t> block_of;
  for (std::size_t b = 0; b < cut.partition.size(); ++b)
    for (const auto& a : cut.partition[b]) block_of[index.intern(a)] = b;
  std::vector<HierLog> out;
  for (const auto& part : split_ilog(index, il, cut.op, block_of, cut.partition.size()))
    out.push_back(index.export_log(part));
  return out;
}

}  // namespace hpm
