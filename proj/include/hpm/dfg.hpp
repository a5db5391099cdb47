#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hpm/log.hpp"

namespace hpm {

/// Directly-follows graph over the level-1 activities of a log.
struct Dfg {
  std::set<Activity> nodes;
  std::map<std::pair<Activity, Activity>, std::size_t> edges;
  std::map<Activity, std::size_t> starts;
  std::map<Activity, std::size_t> ends;
  std::size_t empty_traces = 0;
};

Dfg build_dfg(const HierLog& log);

/// Keeps edge (a,b) iff its count is at least (1 - paths) times the largest
/// outgoing count of a; starts and ends are thinned against their own maxima.
/// Nodes are never removed.
Dfg filter_infrequent(const Dfg& dfg, double paths);

enum class CutOp { Seq, Xor, Loop, Par };

std::string to_string(CutOp op);

struct Cut {
  CutOp op;
  std::vector<std::set<Activity>> partition;
};

/// Tries xor, seq, par and loop in that order. Seq blocks are in precedence
/// order, loop blocks start with the body; all other blocks are sorted by
/// their least activity. Throws EmptyGraph on a graph without nodes.
std::optional<Cut> find_cut(const Dfg& dfg);

/// One sublog per block; events keep their full paths.
/// Throws UncoveredActivity if a level-1 activity is in no block.
std::vector<HierLog> split_log(const HierLog& log, const Cut& cut);

}  // namespace hpm
