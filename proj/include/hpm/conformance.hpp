#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hpm/language.hpp"
#include "hpm/log.hpp"
#include "hpm/tree.hpp"

namespace hpm {

struct FitnessReport {
  double trace_fitness = 1.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<bool> verdicts;  // one per log trace, in log order
};

/// Share of log traces accepted by the model. Throws UnboundRecursion.
FitnessReport fitness(const Tree& tree, const HierLog& log);

struct PrecisionReport {
  double precision = 1.0;
  std::size_t visited_states = 0;
  std::size_t escaping_edges = 0;
  std::size_t enabled_edges = 0;
};

/// Escaping-edges estimate. Each distinct log prefix the model can continue is
/// a state; its enabled edges are the events (plus end-of-trace) the model
/// allows next, escaping ones are those never observed after that prefix.
/// Candidate events come from the log and from the model's event alphabet up
/// to `bound.max_recursion_depth`.
PrecisionReport precision_estimate(const Tree& tree, const HierLog& log, const LangBound& bound = {});

std::string to_json(const FitnessReport& report);
std::string to_json(const PrecisionReport& report);

/// Directly-follows evidence per hierarchy context. A context is the path
/// prefix shared by a run of consecutive events, folded so that a repeated
/// name cuts the context back to its first occurrence.
struct DfRelations {
  struct Level {
    std::set<std::pair<Activity, Activity>> pairs;
    std::set<Activity> starts, ends, alphabet;
  };
  std::map<Path, Level> levels;

  /// True iff every relation of `other` is also present here.
  bool covers(const DfRelations& other) const;
};

Path fold_context(const Path& prefix);

DfRelations df_relations(const HierLog& log);
DfRelations df_relations(const Language& language);
/// Relations of the full (unbounded) model language, read off the tree.
DfRelations df_relations(const Tree& tree);

/// True iff the log holds every directly-follows pair, start, end and
/// activity that language(tree, bound) exhibits at every level.
bool is_df_complete(const HierLog& log, const Tree& tree, const LangBound& bound);

}  // namespace hpm
