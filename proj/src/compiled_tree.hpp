#pragma once

// Position-indexed form of a Tree shared by the language enumerator and the
// membership oracle. Every △ carries the index of its binding ▽.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hpm/tree.hpp"

namespace hpm::detail {

using Sym = std::uint32_t;

class SymbolTable {
 public:
  Sym intern(const std::string& s) {
    auto [it, inserted] = index_.emplace(s, static_cast<Sym>(names_.size()));
    if (inserted) names_.push_back(s);
    return it->second;
  }
  std::optional<Sym> find(const std::string& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& name(Sym s) const { return names_[s]; }
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, Sym> index_;
  std::vector<std::string> names_;
};

struct CNode {
  NodeKind kind;
  Sym sym = 0;
  std::vector<std::uint32_t> kids;
  std::int32_t binder = -1;
};

struct CompiledTree {
  SymbolTable syms;
  std::vector<CNode> nodes;  // root at 0

  /// Non-strict compilation leaves unbound △ with binder -1 instead of throwing.
  explicit CompiledTree(const Tree& tree, bool strict = true);

 private:
  std::uint32_t add(const Tree& t, std::vector<std::pair<Sym, std::uint32_t>>& scope);
  bool strict_;
};

struct VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = v.size() * 0x9e3779b97f4a7c15ULL;
    for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Interns event paths (as symbol sequences) to dense ids.
class EventTable {
 public:
  std::uint32_t intern(const std::vector<Sym>& path) {
    auto [it, inserted] = index_.emplace(path, static_cast<std::uint32_t>(paths_.size()));
    if (inserted) paths_.push_back(path);
    return it->second;
  }
  const std::vector<Sym>& path(std::uint32_t id) const { return paths_[id]; }

 private:
  std::unordered_map<std::vector<Sym>, std::uint32_t, VecHash> index_;
  std::vector<std::vector<Sym>> paths_;
};

}  // namespace hpm::detail
