#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpm/log.hpp"
#include "hpm/tree.hpp"

namespace hpm {

enum class DiscoveryMode { Naive, Rad, Flat };

DiscoveryMode parse_discovery_mode(const std::string& text);
std::string to_string(DiscoveryMode mode);

struct DiscoveryConfig {
  /// Share of directly-follows behaviour to keep; 1.0 keeps everything.
  double paths = 1.0;
  DiscoveryMode mode = DiscoveryMode::Rad;
  /// Worker threads for one fixpoint round (rad only).
  std::size_t threads = 1;
  /// When set, the contexts of each round run in a shuffled order.
  std::optional<std::uint64_t> schedule_seed;

  void validate() const;
};

using ContextPath = std::vector<Activity>;

/// Instrumentation filled in by a discovery call.
struct DiscoveryStats {
  /// Deepest nesting of cut recursions and named-subtree descents below the
  /// top-level call, within a single run of the recursive procedure.
  std::size_t max_recursion_depth = 0;
  /// Fixpoint rounds (rad); 1 for naive and flat.
  std::size_t rounds = 0;
  /// How often each sublog L(C) was created or grew (rad).
  std::map<ContextPath, std::size_t> changes;
  /// Final sublog store and per-context models (rad).
  std::map<ContextPath, HierLog> sublogs;
  std::map<ContextPath, Tree> models;
};

/// {ε*} -> τ; {⟨a⟩*} -> a; a mix of both -> ×(a, τ). With paths < 1 a share
/// of empty traces below (1 - paths) is ignored first.
std::optional<Tree> discover_base_case(const HierLog& log, double paths = 1.0);

Tree naive_discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats = nullptr);
Tree rad_discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats = nullptr);
/// Every event path becomes one opaque activity joined with ".".
Tree flat_discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats = nullptr);

/// Dispatches on config.mode.
Tree discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats = nullptr);

/// [{"context": ["f","g"], "changes": n, "traces": [[["f","b"]], ...]}, ...]
std::string sublog_store_json(const DiscoveryStats& stats);

}  // namespace hpm
