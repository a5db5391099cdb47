#include "hpm/discovery.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "engine.hpp"
#include "hpm/rewrite.hpp"

namespace hpm {

using namespace detail;

DiscoveryMode parse_discovery_mode(const std::string& text) {
  if (text == "naive") return DiscoveryMode::Naive;
  if (text == "rad") return DiscoveryMode::Rad;
  if (text == "flat") return DiscoveryMode::Flat;
  throw Error(ErrorCode::InvalidConfig, "unknown discovery mode '" + text + "'");
}

std::string to_string(DiscoveryMode mode) {
  switch (mode) {
    case DiscoveryMode::Naive: return "naive";
    case DiscoveryMode::Rad: return "rad";
    case DiscoveryMode::Flat: return "flat";
  }
  return "unknown";
}

void DiscoveryConfig::validate() const {
  if (!(paths >= 0.0 && paths <= 1.0)) throw Error(ErrorCode::InvalidConfig, "paths must lie in [0, 1]");
  if (threads == 0) throw Error(ErrorCode::InvalidConfig, "threads must be at least 1");
}

std::optional<Tree> discover_base_case(const HierLog& log, double paths) {
  std::size_t empty = 0;
  for (const auto& t : log.traces) empty += t.empty();
  const std::size_t total = log.size();
  if (empty > 0 && empty < total && paths < 1.0 &&
      static_cast<double>(empty) < (1.0 - paths) * static_cast<double>(total))
    empty = 0;
  const HierTrace* first = nullptr;
  for (const auto& t : log.traces) {
    if (t.empty()) continue;
    if (t.size() != 1 || t.events.front().path.size() != 1) return std::nullopt;
    if (first && first->events.front().path != t.events.front().path) return std::nullopt;
    first = &t;
  }
  if (!first) return Tree::silent();
  Tree leaf = Tree::activity(first->events.front().path.front());
  if (empty > 0) return Tree::xor_({leaf, Tree::silent()});
  return leaf;
}

namespace {

using Context = std::vector<Sym>;
using Contributions = std::map<Context, ILog>;

std::size_t weight(const ILog& log) {
  std::size_t n = 0;
  for (const auto& [_, c] : log) n += c;
  return n;
}

void sum_into(ILog& dst, const ILog& src) {
  for (const auto& [t, c] : src) dst[t] += c;
}

bool max_into(ILog& dst, const ILog& src) {
  bool changed = false;
  for (const auto& [t, c] : src) {
    auto& cur = dst[t];
    if (c > cur) {
      cur = c;
      changed = true;
    }
  }
  return changed;
}

// One pass of the recursive procedure over a single sublog.
class Runner {
 public:
  Runner(const LogIndex& index, double paths, bool rad) : index_(index), paths_(paths), rad_(rad) {}

  Tree run(const ILog& log, const Context& ctx) { return reduce(rec(log, ctx, 0)); }

  std::size_t max_depth() const { return max_depth_; }
  Contributions& contributions() { return contributions_; }

 private:
  Tree leaf(Sym a) const { return Tree::activity(index_.name(a)); }

  std::optional<std::size_t> position(const Context& ctx, Sym f) const {
    auto it = std::find(ctx.begin(), ctx.end(), f);
    if (it == ctx.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ctx.begin());
  }

  Tree recursion(Sym f, std::size_t pos, const Context& ctx, const ILog& projected) {
    Context target(ctx.begin(), ctx.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
    sum_into(contributions_[target], projected);
    return Tree::rec(index_.name(f));
  }

  Tree named(Sym f, const ILog& projected, const Context& ctx, std::size_t depth) {
    if (!rad_) return Tree::sub(index_.name(f), rec(projected, ctx, depth + 1));
    if (auto pos = position(ctx, f)) return recursion(f, *pos, ctx, projected);
    Context target = ctx;
    target.push_back(f);
    sum_into(contributions_[target], projected);
    return Tree::sub(index_.name(f), Tree::silent());
  }

  ILog project(const ILog& log) const {
    ILog out;
    for (const auto& [t, c] : log) {
      ITrace p;
      for (auto e : t)
        if (auto tail = index_.tail(e); tail != kNoEvent) p.push_back(tail);
      out[std::move(p)] += c;
    }
    return out;
  }

  Tree rec(const ILog& input, const Context& ctx, std::size_t depth) {
    max_depth_ = std::max(max_depth_, depth);
    const ILog* log = &input;
    std::size_t total = weight(*log);
    std::size_t empty = 0;
    if (auto it = log->find(ITrace{}); it != log->end()) empty = it->second;
    if (empty == total) return Tree::silent();

    ILog non_empty;
    if (empty > 0) {
      non_empty = *log;
      non_empty.erase(ITrace{});
      bool drop = paths_ < 1.0 && static_cast<double>(empty) < (1.0 - paths_) * static_cast<double>(total);
      if (!drop) return Tree::xor_({rec(non_empty, ctx, depth), Tree::silent()});
      log = &non_empty;
      total -= empty;
    }

    // Single activity.
    {
      std::optional<Sym> a;
      bool single = true;
      for (const auto& [t, _] : *log) {
        if (t.size() != 1 || index_.length(t[0]) != 1 || (a && *a != index_.head(t[0]))) {
          single = false;
          break;
        }
        a = index_.head(t[0]);
      }
      if (single) {
        if (rad_)
          if (auto pos = position(ctx, *a)) return recursion(*a, *pos, ctx, ILog{{ITrace{}, total}});
        return leaf(*a);
      }
    }

    // Uniform named subtree.
    {
      std::optional<Sym> f;
      bool uniform = true, deeper = false;
      for (const auto& [t, _] : *log) {
        bool call_only = t.size() == 1 && index_.length(t[0]) == 1;
        for (auto e : t) {
          if (f && *f != index_.head(e)) uniform = false;
          f = index_.head(e);
          if (index_.length(e) > 1)
            deeper = true;
          else if (!call_only)
            uniform = false;
        }
        if (!uniform) break;
      }
      if (uniform && deeper) return named(*f, project(*log), ctx, depth);
    }

    DenseDfg g = build_dense(index_, *log);
    filter_dense(g, paths_);
    if (auto cut = find_dense_cut(g)) {
      std::unordered_map<Sym, std::size_t> block_of;
      for (std::size_t b = 0; b < cut->blocks.size(); ++b)
        for (auto i : cut->blocks[b]) block_of[g.syms[i]] = b;
      auto parts = split_ilog(index_, *log, cut->op, block_of, cut->blocks.size());
      std::vector<Tree> kids;
      for (const auto& p : parts) {
        if (cut->op == CutOp::Xor && p.empty()) continue;
        kids.push_back(rec(p, ctx, depth + 1));
      }
      if (kids.size() == 1) return std::move(kids.front());
      NodeKind k = cut->op == CutOp::Seq ? NodeKind::Seq
                   : cut->op == CutOp::Xor ? NodeKind::Xor
                   : cut->op == CutOp::Par ? NodeKind::Par
                                           : NodeKind::Loop;
      return Tree::op(k, std::move(kids));
    }
    return flower(*log, g, ctx, depth);
  }

  // ⟲(×(a1, ..., an, τ), τ); an activity with deeper events becomes a named
  // subtree over the maximal runs of its deeper events.
  Tree flower(const ILog& log, const DenseDfg& g, const Context& ctx, std::size_t depth) {
    std::vector<Tree> choices;
    for (auto a : g.syms) {
      ILog calls;
      bool deeper = false;
      for (const auto& [t, c] : log) {
        std::size_t i = 0;
        while (i < t.size()) {
          if (index_.head(t[i]) != a) {
            ++i;
            continue;
          }
          if (index_.length(t[i]) == 1) {
            calls[ITrace{}] += c;
            ++i;
            continue;
          }
          ITrace run;
          while (i < t.size() && index_.head(t[i]) == a && index_.length(t[i]) > 1) run.push_back(index_.tail(t[i++]));
          calls[std::move(run)] += c;
          deeper = true;
        }
      }
      bool recursive_call = rad_ && position(ctx, a).has_value();
      if (deeper || recursive_call)
        choices.push_back(named(a, calls, ctx, depth));
      else
        choices.push_back(leaf(a));
    }
    choices.push_back(Tree::silent());
    return Tree::loop({Tree::xor_(std::move(choices)), Tree::silent()});
  }

  const LogIndex& index_;
  double paths_;
  bool rad_;
  std::size_t max_depth_ = 0;
  Contributions contributions_;
};

ContextPath names_of(const LogIndex& index, const Context& ctx) {
  ContextPath out;
  for (auto s : ctx) out.push_back(index.name(s));
  return out;
}

struct StoreEntry {
  ILog log;
  Tree model;
  bool dirty = true;
  std::size_t changes = 0;
};

class Fixpoint {
 public:
  Fixpoint(LogIndex& index, const DiscoveryConfig& config) : index_(index), config_(config) {}

  Tree run(const ILog& input, DiscoveryStats* stats) {
    store_[Context{}] = StoreEntry{input, Tree::silent(), true, 1};
    std::size_t max_depth = 0, rounds = 0;
    std::mt19937_64 rng(config_.schedule_seed.value_or(0));
    while (true) {
      std::vector<Context> batch;
      for (auto& [ctx, entry] : store_)
        if (entry.dirty) batch.push_back(ctx);
      if (batch.empty()) break;
      std::sort(batch.begin(), batch.end(), [&](const Context& a, const Context& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return names_of(index_, a) < names_of(index_, b);
      });
      if (config_.schedule_seed) std::shuffle(batch.begin(), batch.end(), rng);
      ++rounds;

      std::vector<std::pair<Tree, Contributions>> results(batch.size());
      std::vector<std::size_t> finished;
      std::mutex mu;
      auto work = [&](std::size_t k) {
        const StoreEntry& entry = store_.at(batch[k]);
        Runner runner(index_, config_.paths, true);
        Tree model = runner.run(entry.log, batch[k]);
        std::lock_guard lock(mu);
        max_depth = std::max(max_depth, runner.max_depth());
        results[k] = {std::move(model), std::move(runner.contributions())};
        finished.push_back(k);
      };
      std::size_t workers = std::min(config_.threads, batch.size());
      if (workers <= 1) {
        for (std::size_t k = 0; k < batch.size(); ++k) work(k);
      } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
          pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < batch.size();) work(k);
          });
        for (auto& t : pool) t.join();
      }

      std::set<Context> changed;
      for (auto k : finished) {
        auto& entry = store_[batch[k]];
        entry.model = results[k].first;
        entry.dirty = false;
      }
      for (auto k : finished)
        for (const auto& [target, contribution] : results[k].second) {
          auto it = store_.find(target);
          if (it == store_.end()) it = store_.emplace(target, StoreEntry{}).first;
          if (max_into(it->second.log, contribution)) changed.insert(target);
        }
      for (const auto& c : changed) {
        store_[c].dirty = true;
        ++store_[c].changes;
      }
    }

    Tree result = reduce(glue(Context{}));
    if (stats) {
      stats->max_recursion_depth = max_depth;
      stats->rounds = rounds;
      for (const auto& [ctx, entry] : store_) {
        auto names = names_of(index_, ctx);
        stats->changes[names] = entry.changes;
        stats->sublogs[names] = index_.export_log(entry.log);
        stats->models[names] = entry.model;
      }
    }
    return result;
  }

 private:
  Tree glue(const Context& ctx) { return splice(store_.at(ctx).model, ctx); }

  Tree splice(const Tree& t, const Context& ctx) {
    if (t.kind() == NodeKind::Sub) {
      Context inner = ctx;
      inner.push_back(*index_.find_sym(t.label()));
      return Tree::sub(t.label(), glue(inner));
    }
    if (t.children().empty()) return t;
    std::vector<Tree> kids;
    for (const auto& c : t.children()) kids.push_back(splice(c, ctx));
    return Tree::op(t.kind(), std::move(kids));
  }

  LogIndex& index_;
  const DiscoveryConfig& config_;
  std::map<Context, StoreEntry> store_;
};

Tree run_naive(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats) {
  LogIndex index;
  ILog il = index.import(log);
  Runner runner(index, config.paths, false);
  Tree t = runner.run(il, {});
  if (stats) {
    stats->max_recursion_depth = runner.max_depth();
    stats->rounds = 1;
  }
  return t;
}

}  // namespace

Tree naive_discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats) {
  config.validate();
  return run_naive(log, config, stats);
}

Tree rad_discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats) {
  config.validate();
  LogIndex index;
  ILog il = index.import(log);
  return Fixpoint(index, config).run(il, stats);
}

Tree flat_discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats) {
  config.validate();
  return run_naive(flatten(log, "."), config, stats);
}

Tree discover(const HierLog& log, const DiscoveryConfig& config, DiscoveryStats* stats) {
  switch (config.mode) {
    case DiscoveryMode::Naive: return naive_discover(log, config, stats);
    case DiscoveryMode::Rad: return rad_discover(log, config, stats);
    case DiscoveryMode::Flat: return flat_discover(log, config, stats);
  }
  return Tree::silent();
}

std::string sublog_store_json(const DiscoveryStats& stats) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& [ctx, log] : stats.sublogs) {
    nlohmann::ordered_json entry;
    entry["context"] = ctx;
    auto it = stats.changes.find(ctx);
    entry["changes"] = it == stats.changes.end() ? 0 : it->second;
    nlohmann::ordered_json traces = nlohmann::ordered_json::array();
    for (const auto& t : log.traces) traces.push_back(shape(t));
    entry["traces"] = std::move(traces);
    out.push_back(std::move(entry));
  }
  return out.dump();
}

}  // namespace hpm
