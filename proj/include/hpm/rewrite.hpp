#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hpm/tree.hpp"

namespace hpm {

/// Applies the reduction rules innermost-first until nothing changes:
/// singleton →/×/∧ collapse, →/∧ flattening, τ removal in → and ∧, and τ
/// removal in × when another child still accepts ε.
Tree reduce(const Tree& tree);

inline constexpr std::size_t kUnboundedDepth = SIZE_MAX;

/// Keeps only the part of the tree between two ▽ nesting depths. Leaves above
/// `min_depth` become τ and the ▽ nodes there are dissolved; every ▽ at
/// `max_depth` turns into an activity leaf of its name. The root content is at
/// depth 0. Throws InvalidRange when min_depth > max_depth.
Tree depth_filter(const Tree& tree, std::size_t min_depth, std::size_t max_depth = kUnboundedDepth);

enum class ViolationKind { DuplicateActivity, LoopBodyOverlap, SilentChild, UnboundRecursion };

struct Violation {
  ViolationKind kind;
  std::string node;  // path-based node id
  std::string message;
};

std::string to_string(ViolationKind kind);

/// Restrictions of the rediscoverable model class; empty when all hold.
std::vector<Violation> validate(const Tree& tree);

}  // namespace hpm
