#pragma once

// Interned log representation used by the discovery engine. Events are dense
// ids; every suffix of an imported path is interned up front so projection
// is a table lookup and the index is read-only during discovery.

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "compiled_tree.hpp"
#include "hpm/dfg.hpp"
#include "hpm/log.hpp"

namespace hpm::detail {

using EventId = std::uint32_t;
using ITrace = std::vector<EventId>;
using ILog = std::map<ITrace, std::size_t>;

inline constexpr EventId kNoEvent = UINT32_MAX;

class LogIndex {
 public:
  EventId add_path(const Path& path);
  ILog import(const HierLog& log);
  HierLog export_log(const ILog& log) const;
  Path path_of(EventId e) const;

  Sym head(EventId e) const { return head_[e]; }
  EventId tail(EventId e) const { return tail_[e]; }
  std::size_t length(EventId e) const { return len_[e]; }
  const std::string& name(Sym s) const { return syms_.name(s); }
  std::optional<Sym> find_sym(const std::string& name) const { return syms_.find(name); }
  Sym intern(const std::string& name) { return syms_.intern(name); }

 private:
  SymbolTable syms_;
  std::unordered_map<std::uint64_t, EventId> suffixes_;
  std::vector<Sym> head_;
  std::vector<EventId> tail_;
  std::vector<std::uint32_t> len_;
};

/// Graph with nodes indexed 0..n-1 in ascending name order.
struct DenseDfg {
  std::vector<Sym> syms;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> edges;
  std::vector<std::size_t> starts, ends;
  std::size_t empty_traces = 0;

  std::size_t size() const { return syms.size(); }
};

DenseDfg build_dense(const LogIndex& index, const ILog& log);
DenseDfg dense_from(const Dfg& dfg);
Dfg sparse_from(const DenseDfg& dfg);
void filter_dense(DenseDfg& dfg, double paths);

struct DenseCut {
  CutOp op;
  std::vector<std::vector<std::size_t>> blocks;
};

std::optional<DenseCut> find_dense_cut(const DenseDfg& dfg);

/// `block_of` maps a level-1 symbol to its block; every head must be present.
std::vector<ILog> split_ilog(const LogIndex& index, const ILog& log, CutOp op,
                             const std::unordered_map<Sym, std::size_t>& block_of, std::size_t blocks);

}  // namespace hpm::detail
