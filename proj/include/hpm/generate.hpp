#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "hpm/language.hpp"
#include "hpm/log.hpp"
#include "hpm/tree.hpp"

namespace hpm {

struct ModelOptions {
  bool recursion = true;
  bool named_subtrees = true;
};

/// Seeded tree of the rediscoverable class: at most `size` activity leaves,
/// fresh names, no τ, loop bodies whose start and end activities differ,
/// every △ under its ▽, and every ▽ able to finish. validate() is empty.
Tree gen_model(std::uint64_t seed, std::size_t size, const ModelOptions& options = {});

/// Unconstrained seeded tree: τ leaves, duplicate labels, nested operators of
/// the same kind and singleton operators all occur. Used to exercise rewrites.
Tree gen_random_tree(std::uint64_t seed, std::size_t size, bool recursion = true);

/// Makes `i` a readable fresh name: a, b, ..., z, aa, ab, ...
std::string fresh_name(std::size_t i);

/// Materializes language(tree, bound) as a log. Missing directly-follows
/// evidence of the full model language is first added from seeded random
/// walks; if that is not enough both limits are doubled and the process
/// repeats. Throws CompletenessUnreachable once max_trace_len would exceed 64.
HierLog gen_complete_log(const Tree& tree, const LangBound& bound);

/// Up to `max_traces` distinct traces drawn uniformly from language(tree, bound).
HierLog sample_language(const Tree& tree, const LangBound& bound, std::size_t max_traces, std::uint64_t seed);

/// Random walk through the tree. Loops repeat with probability `redo_p`;
/// recursion is followed with probability 1/2 up to `max_recursion` levels.
ActivityTrace sample_trace(const Tree& tree, std::mt19937_64& rng, double redo_p = 0.3, std::size_t max_recursion = 3);

/// Unstructured hierarchical log over a small alphabet, for stress tests.
HierLog gen_random_log(std::uint64_t seed);

/// Synthetic benchmark model: a chain of `depth` levels, each a random block
/// structure over `width` fresh activities of which one calls the next level.
Tree gen_hierarchical_model(std::uint64_t seed, std::size_t depth, std::size_t width = 6);

/// `traces` sampled traces of gen_hierarchical_model.
HierLog gen_hierarchical_log(std::uint64_t seed, std::size_t depth, std::size_t traces, std::size_t width = 6);

}  // namespace hpm
