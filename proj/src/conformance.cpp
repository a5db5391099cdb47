#include "hpm/conformance.hpp"

#include <algorithm>

#include <json.hpp>

namespace hpm {

FitnessReport fitness(const Tree& tree, const HierLog& log) {
  Acceptor acceptor(tree);
  FitnessReport r;
  for (const auto& t : log.traces) {
    bool ok = acceptor.accepts(shape(t));
    r.verdicts.push_back(ok);
    (ok ? r.accepted : r.rejected) += 1;
  }
  const std::size_t total = r.accepted + r.rejected;
  r.trace_fitness = total == 0 ? 1.0 : static_cast<double>(r.accepted) / static_cast<double>(total);
  return r;
}

PrecisionReport precision_estimate(const Tree& tree, const HierLog& log, const LangBound& bound) {
  Acceptor acceptor(tree);
  std::set<Path> candidates = acceptor.event_alphabet(bound.max_recursion_depth);

  // Observed continuations per prefix; an empty optional marks end of trace.
  std::map<ActivityTrace, std::set<std::optional<Path>>> observed;
  for (const auto& t : log.traces) {
    ActivityTrace s = shape(t);
    for (const auto& e : s) candidates.insert(e);
    ActivityTrace prefix;
    for (const auto& e : s) {
      observed[prefix].insert(e);
      prefix.push_back(e);
    }
    observed[prefix].insert(std::nullopt);
  }

  PrecisionReport r;
  for (const auto& [prefix, taken] : observed) {
    if (!acceptor.accepts_prefix(prefix)) continue;
    ++r.visited_states;
    auto count = [&](const std::optional<Path>& next) {
      ++r.enabled_edges;
      if (!taken.count(next)) ++r.escaping_edges;
    };
    ActivityTrace probe = prefix;
    for (const auto& e : candidates) {
      probe.push_back(e);
      if (acceptor.accepts_prefix(probe)) count(e);
      probe.pop_back();
    }
    if (acceptor.accepts(prefix)) count(std::nullopt);
  }
  r.precision = r.enabled_edges == 0
                    ? 1.0
                    : 1.0 - static_cast<double>(r.escaping_edges) / static_cast<double>(r.enabled_edges);
  return r;
}

std::string to_json(const FitnessReport& report) {
  nlohmann::ordered_json j;
  j["trace_fitness"] = report.trace_fitness;
  j["accepted"] = report.accepted;
  j["rejected"] = report.rejected;
  return j.dump();
}

std::string to_json(const PrecisionReport& report) {
  nlohmann::ordered_json j;
  j["precision"] = report.precision;
  j["escaping_edges"] = report.escaping_edges;
  j["enabled_edges"] = report.enabled_edges;
  j["visited_states"] = report.visited_states;
  return j.dump();
}

Path fold_context(const Path& prefix) {
  Path out;
  for (const auto& a : prefix) {
    auto it = std::find(out.begin(), out.end(), a);
    if (it != out.end())
      out.erase(it + 1, out.end());
    else
      out.push_back(a);
  }
  return out;
}

bool DfRelations::covers(const DfRelations& other) const {
  auto subset = [](const auto& a, const auto& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); };
  for (const auto& [ctx, lvl] : other.levels) {
    auto it = levels.find(ctx);
    if (it == levels.end()) {
      if (!lvl.pairs.empty() || !lvl.starts.empty() || !lvl.ends.empty() || !lvl.alphabet.empty()) return false;
      continue;
    }
    const auto& mine = it->second;
    if (!subset(lvl.pairs, mine.pairs) || !subset(lvl.starts, mine.starts) || !subset(lvl.ends, mine.ends) ||
        !subset(lvl.alphabet, mine.alphabet))
      return false;
  }
  return true;
}

namespace {

void add_trace(DfRelations& rel, const ActivityTrace& t) {
  std::size_t max_len = 0;
  for (const auto& e : t) max_len = std::max(max_len, e.size());
  for (std::size_t k = 0; k < max_len; ++k) {
    std::size_t i = 0;
    while (i < t.size()) {
      if (t[i].size() <= k) {
        ++i;
        continue;
      }
      auto same_prefix = [&](const Path& e) {
        return e.size() > k && std::equal(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(k), t[i].begin());
      };
      std::size_t j = i;
      while (j < t.size() && same_prefix(t[j])) ++j;
      Path prefix(t[i].begin(), t[i].begin() + static_cast<std::ptrdiff_t>(k));
      auto& lvl = rel.levels[fold_context(prefix)];
      lvl.starts.insert(t[i][k]);
      lvl.ends.insert(t[j - 1][k]);
      for (std::size_t q = i; q < j; ++q) {
        lvl.alphabet.insert(t[q][k]);
        if (q > i) lvl.pairs.emplace(t[q - 1][k], t[q][k]);
      }
      i = j;
    }
  }
}

// Starts, ends, pairs and alphabet of one node at its own level.
struct Summary {
  std::set<Activity> starts, ends, alphabet;
  std::set<std::pair<Activity, Activity>> pairs;
  bool nullable = false;
};

Summary summarize(const Tree& t, const Path& ctx, DfRelations& rel) {
  Summary s;
  switch (t.kind()) {
    case NodeKind::Silent: s.nullable = true; return s;
    case NodeKind::Activity:
    case NodeKind::Rec: s.starts = s.ends = s.alphabet = {t.label()}; return s;
    case NodeKind::Sub: {
      s.starts = s.ends = s.alphabet = {t.label()};
      Path inner = ctx;
      inner.push_back(t.label());
      inner = fold_context(inner);
      Summary body = summarize(t.child(0), inner, rel);
      if (!body.alphabet.empty()) {
        auto& lvl = rel.levels[inner];
        lvl.starts.insert(body.starts.begin(), body.starts.end());
        lvl.ends.insert(body.ends.begin(), body.ends.end());
        lvl.alphabet.insert(body.alphabet.begin(), body.alphabet.end());
        lvl.pairs.insert(body.pairs.begin(), body.pairs.end());
      }
      return s;
    }
    default: break;
  }
  std::vector<Summary> kids;
  for (const auto& c : t.children()) kids.push_back(summarize(c, ctx, rel));
  for (const auto& k : kids) {
    s.alphabet.insert(k.alphabet.begin(), k.alphabet.end());
    s.pairs.insert(k.pairs.begin(), k.pairs.end());
  }
  auto cross = [&](const std::set<Activity>& a, const std::set<Activity>& b) {
    for (const auto& x : a)
      for (const auto& y : b) s.pairs.emplace(x, y);
  };
  switch (t.kind()) {
    case NodeKind::Xor:
      for (const auto& k : kids) {
        s.starts.insert(k.starts.begin(), k.starts.end());
        s.ends.insert(k.ends.begin(), k.ends.end());
        s.nullable |= k.nullable;
      }
      break;
    case NodeKind::Par:
      s.nullable = true;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        s.starts.insert(kids[i].starts.begin(), kids[i].starts.end());
        s.ends.insert(kids[i].ends.begin(), kids[i].ends.end());
        s.nullable &= kids[i].nullable;
        for (std::size_t j = 0; j < kids.size(); ++j)
          if (i != j) cross(kids[i].alphabet, kids[j].alphabet);
      }
      break;
    case NodeKind::Seq: {
      s.nullable = true;
      std::set<Activity> open_ends;  // ends reachable so far through nullable tails
      for (const auto& k : kids) {
        cross(open_ends, k.starts);
        if (s.nullable) s.starts.insert(k.starts.begin(), k.starts.end());
        if (k.nullable) {
          open_ends.insert(k.ends.begin(), k.ends.end());
        } else {
          open_ends = k.ends;
        }
        s.nullable &= k.nullable;
      }
      s.ends = open_ends;
      break;
    }
    case NodeKind::Loop: {
      const Summary& body = kids[0];
      std::set<Activity> redo_starts, redo_ends;
      bool redo_nullable = false;
      for (std::size_t r = 1; r < kids.size(); ++r) {
        redo_starts.insert(kids[r].starts.begin(), kids[r].starts.end());
        redo_ends.insert(kids[r].ends.begin(), kids[r].ends.end());
        redo_nullable |= kids[r].nullable;
      }
      cross(body.ends, redo_starts);
      cross(redo_ends, body.starts);
      if (redo_nullable) cross(body.ends, body.starts);
      s.nullable = body.nullable;
      s.starts = body.starts;
      s.ends = body.ends;
      if (body.nullable) {
        s.starts.insert(redo_starts.begin(), redo_starts.end());
        s.ends.insert(redo_ends.begin(), redo_ends.end());
        cross(redo_ends, redo_starts);
      }
      break;
    }
    default: break;
  }
  return s;
}

}  // namespace

DfRelations df_relations(const HierLog& log) {
  DfRelations rel;
  for (const auto& t : log.traces) add_trace(rel, shape(t));
  return rel;
}

DfRelations df_relations(const Language& language) {
  DfRelations rel;
  for (const auto& t : language) add_trace(rel, t);
  return rel;
}

DfRelations df_relations(const Tree& tree) {
  check_recursion_bound(tree);
  DfRelations rel;
  Summary root = summarize(tree, {}, rel);
  if (!root.alphabet.empty()) {
    auto& lvl = rel.levels[Path{}];
    lvl.starts.insert(root.starts.begin(), root.starts.end());
    lvl.ends.insert(root.ends.begin(), root.ends.end());
    lvl.alphabet.insert(root.alphabet.begin(), root.alphabet.end());
    lvl.pairs.insert(root.pairs.begin(), root.pairs.end());
  }
  return rel;
}

bool is_df_complete(const HierLog& log, const Tree& tree, const LangBound& bound) {
  return df_relations(log).covers(df_relations(language(tree, bound)));
}

}  // namespace hpm
