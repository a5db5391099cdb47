#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "hpm/log.hpp"
#include "hpm/tree.hpp"

namespace hpm {

/// Enumeration limits; model languages are infinite in general.
struct LangBound {
  std::size_t max_trace_len = 8;
  /// How many times a recursion leaf may be unfolded inside one event.
  std::size_t max_recursion_depth = 2;
};

using Language = std::set<ActivityTrace>;

/// Every trace of the model with at most `max_trace_len` events and at most
/// `max_recursion_depth` nested recursion unfoldings.
Language language(const Tree& tree, const LangBound& bound);

/// Membership by memoized descent over (node, trace segment, level);
/// the language is never enumerated.
bool accepts(const Tree& tree, const ActivityTrace& trace);
bool accepts(const Tree& tree, const HierTrace& trace);

/// Throws UnboundRecursion when a △_f has no enclosing ▽_f.
void check_recursion_bound(const Tree& tree);

/// True iff the empty trace is in the language.
bool nullable(const Tree& tree);

/// Level-1 activities that can start / end a non-empty trace of the tree.
std::set<Activity> start_heads(const Tree& tree);
std::set<Activity> end_heads(const Tree& tree);

/// Reusable membership oracle; keeps its memo across queries, so repeated
/// queries on shared prefixes are cheap.
class Acceptor {
 public:
  explicit Acceptor(const Tree& tree);
  ~Acceptor();
  Acceptor(Acceptor&&) noexcept;
  Acceptor& operator=(Acceptor&&) noexcept;

  bool accepts(const ActivityTrace& trace);
  /// True iff some continuation of `trace` is accepted.
  bool accepts_prefix(const ActivityTrace& trace);

  /// Event paths the model can produce with at most `recursion_depth`
  /// nested recursion unfoldings.
  std::set<Path> event_alphabet(std::size_t recursion_depth) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hpm
