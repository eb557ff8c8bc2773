#pragma once

#include <algorithm>
#include <deque>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tpn/aclass.hpp"
#include "tpn/agglomeration.hpp"
#include "tpn/net.hpp"
#include "tpn/pclass.hpp"
#include "tpn/semantics.hpp"

namespace tpn {

enum class Reduction { none, inclusion, convex_union, step_aggl };

inline const char* to_string(Reduction r) {
  switch (r) {
    case Reduction::none: return "none";
    case Reduction::inclusion: return "inclusion";
    case Reduction::convex_union: return "convex-union";
    case Reduction::step_aggl: return "step-aggl";
  }
  return "?";
}

struct ExploreConfig {
  GraphKind graph = GraphKind::cscg;
  Reduction reduce = Reduction::none;
  std::size_t budget = 100000;  // max nodes
  std::optional<std::size_t> max_depth;
  unsigned jobs = 1;
};

/// Edge label: a transition, Err, or a set of concurrent transitions.
struct Label {
  enum class Kind { transition, err, set };
  Kind kind = Kind::transition;
  TransitionSeq ts;  // sorted; one element for a transition, empty for Err

  static Label transition(std::size_t t) { return {Kind::transition, {t}}; }
  static Label err() { return {Kind::err, {}}; }
  static Label set(TransitionSeq ts) {
    std::sort(ts.begin(), ts.end());
    return {Kind::set, std::move(ts)};
  }
  /// Number of trace symbols the edge consumes.
  std::size_t length() const { return kind == Kind::err ? 1 : ts.size(); }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;
};

inline std::string to_string(const NetStructure& net, const Label& l) {
  if (l.kind == Label::Kind::err) return "Err";
  if (l.kind == Label::Kind::transition) return net.transitions[l.ts.front()];
  std::string s = "{";
  for (std::size_t i = 0; i < l.ts.size(); ++i) s += (i ? "," : "") + net.transitions[l.ts[i]];
  return s + "}";
}

struct Edge {
  std::size_t src;
  Label label;
  std::size_t dst;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t err_edges = 0;
  std::size_t all_dead_terminals = 0;
  std::size_t merges_equal = 0;
  std::size_t merges_inclusion = 0;
  std::size_t merges_convex = 0;
  bool truncated = false;
};

/// Nodes are numbered densely from 0 (the initial class); edges are sorted.
template <class Class>
struct ClassGraph {
  std::vector<Class> nodes;
  std::vector<Edge> edges;
  GraphStats stats;
};

/// Uniform access to the P-TPN and A-TPN class operations.
template <class Net>
struct ModelOps;

template <>
struct ModelOps<PNet> {
  using Class = PClass;
  static Class initial(const PNet& n, GraphKind k) { return initial_class(n, k); }
  static bool firable(const PNet& n, const Class& c, std::size_t t) { return tpn::firable(n, c, t); }
  static Class fire(const PNet& n, const Class& c, std::size_t t) { return tpn::fire(n, c, t); }
  static bool err_firable(const PNet& n, const Class& c) { return !tpn::err_firable(n, c).empty(); }
  static Class fire_err(const PNet& n, const Class& c) { return fire_err_class(n, c); }
  static Class aggl(const PNet& n, const Class& c, const TransitionSeq& tm) { return aggl_successor(n, c, tm); }
  static bool jointly_firable(const PNet& n, const Class& c, const TransitionSeq& tm) {
    return is_consistent(set_condition(n, c, tm));
  }
  static std::string live_key(const PNet&, const Class& c) {
    std::string k;
    for (auto p : c.live()) k += std::to_string(p) + ',';
    return k;
  }
  static bool all_dead(const PNet&, const Class& c) { return !c.dead.empty() && c.live().empty(); }
  static std::string str(const PNet& n, const Class& c) { return to_string(n, c); }
};

template <>
struct ModelOps<ANet> {
  using Class = AClass;
  static Class initial(const ANet& n, GraphKind k) { return initial_class_a(n, k); }
  static bool firable(const ANet& n, const Class& c, std::size_t t) { return firable_a(n, c, t); }
  static Class fire(const ANet& n, const Class& c, std::size_t t) { return fire_a(n, c, t); }
  static bool err_firable(const ANet& n, const Class& c) { return !err_firable_a(n, c).empty(); }
  static Class fire_err(const ANet& n, const Class& c) { return fire_err_class_a(n, c); }
  static Class aggl(const ANet& n, const Class& c, const TransitionSeq& tm) { return aggl_successor_a(n, c, tm); }
  static bool jointly_firable(const ANet& n, const Class& c, const TransitionSeq& tm) {
    return is_consistent(set_condition_a(n, c, tm));
  }
  static std::string live_key(const ANet& n, const Class& c) {
    std::string k;
    for (const auto& [p, t] : c.live(n)) k += std::to_string(p) + '.' + std::to_string(t) + ',';
    return k;
  }
  static bool all_dead(const ANet& n, const Class& c) { return !c.dead.empty() && c.live(n).empty(); }
  static std::string str(const ANet& n, const Class& c) { return to_string(n, c); }
};

namespace detail {

/// Two transitions may be agglomerated when they do not share input places
/// and neither can put a token where the other one takes or puts one.
inline bool independent(const NetStructure& net, std::size_t a, std::size_t b) {
  if (in_conflict(net, a, b)) return false;
  auto meets = [](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    return std::find_first_of(x.begin(), x.end(), y.begin(), y.end()) != x.end();
  };
  return !meets(net.post[a], net.pre[b]) && !meets(net.post[b], net.pre[a]) && !meets(net.post[a], net.post[b]);
}

/// Maximal cliques (Bron-Kerbosch with pivoting) of an undirected graph
/// given as adjacency sets over `vertices`.
inline void maximal_cliques(std::vector<std::size_t>& r, std::vector<std::size_t> p, std::vector<std::size_t> x,
                            const std::map<std::size_t, std::set<std::size_t>>& adj,
                            std::vector<std::vector<std::size_t>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  std::size_t pivot = p.empty() ? x.front() : p.front();
  const auto& np = adj.at(pivot);
  const std::vector<std::size_t> candidates = [&] {
    std::vector<std::size_t> v;
    for (auto u : p)
      if (!np.count(u)) v.push_back(u);
    return v;
  }();
  for (auto v : candidates) {
    const auto& nv = adj.at(v);
    std::vector<std::size_t> p2, x2;
    for (auto u : p)
      if (nv.count(u)) p2.push_back(u);
    for (auto u : x)
      if (nv.count(u)) x2.push_back(u);
    r.push_back(v);
    maximal_cliques(r, p2, x2, adj, out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace detail

/// Sets of at least two firable transitions that are pairwise independent
/// and jointly firable, one per maximal clique; cliques whose members are
/// not jointly firable are split greedily in index order.
template <class Net>
std::vector<TransitionSeq> concurrent_sets(const Net& net, const typename ModelOps<Net>::Class& c,
                                           const std::vector<std::size_t>& firable) {
  using Ops = ModelOps<Net>;
  std::map<std::size_t, std::set<std::size_t>> adj;
  for (auto a : firable) adj[a];
  for (std::size_t i = 0; i < firable.size(); ++i)
    for (std::size_t j = i + 1; j < firable.size(); ++j) {
      const auto a = firable[i], b = firable[j];
      if (detail::independent(net, a, b) && Ops::jointly_firable(net, c, {a, b})) {
        adj[a].insert(b);
        adj[b].insert(a);
      }
    }
  std::vector<std::vector<std::size_t>> cliques;
  std::vector<std::size_t> r;
  detail::maximal_cliques(r, firable, {}, adj, cliques);

  std::set<TransitionSeq> out;
  for (auto& clique : cliques) {
    std::sort(clique.begin(), clique.end());
    std::vector<std::size_t> rest = clique;
    while (rest.size() >= 2) {
      TransitionSeq group;
      std::vector<std::size_t> left;
      for (auto t : rest) {
        TransitionSeq trial = group;
        trial.push_back(t);
        if (group.empty() || Ops::jointly_firable(net, c, trial))
          group = std::move(trial);
        else
          left.push_back(t);
      }
      if (group.size() >= 2) out.insert(group);
      rest = std::move(left);
    }
  }
  return {out.begin(), out.end()};
}

/// True when, after firing `first` and then any further members of `set`
/// one by one, the only firable transitions are the members not yet fired
/// and Err is never firable: every behaviour starting with `first` then
/// runs through the whole set before anything else happens.
template <class Net>
bool closed_from(const Net& net, const typename ModelOps<Net>::Class& c, const TransitionSeq& set, std::size_t first) {
  using Ops = ModelOps<Net>;
  using Class = typename ModelOps<Net>::Class;
  auto rec = [&](auto& self, const Class& cur, std::vector<std::size_t> remaining) -> bool {
    if (remaining.empty()) return true;
    if (Ops::err_firable(net, cur)) return false;
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      if (!Ops::firable(net, cur, t)) continue;
      auto it = std::find(remaining.begin(), remaining.end(), t);
      if (it == remaining.end()) return false;
      std::vector<std::size_t> rest = remaining;
      rest.erase(rest.begin() + (it - remaining.begin()));
      if (!self(self, Ops::fire(net, cur, t), rest)) return false;
    }
    return true;
  };
  std::vector<std::size_t> remaining;
  for (auto t : set)
    if (t != first) remaining.push_back(t);
  return rec(rec, Ops::fire(net, c, first), remaining);
}

/// Outgoing edges of a class under the given reduction.
template <class Net>
std::vector<std::pair<Label, typename ModelOps<Net>::Class>> successors(const Net& net,
                                                                        const typename ModelOps<Net>::Class& c,
                                                                        Reduction reduce) {
  using Ops = ModelOps<Net>;
  std::vector<std::pair<Label, typename Ops::Class>> out;
  std::vector<std::size_t> firable;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (Ops::firable(net, c, t)) firable.push_back(t);

  if (reduce != Reduction::step_aggl) {
    for (auto t : firable) out.emplace_back(Label::transition(t), Ops::fire(net, c, t));
  } else {
    const auto sets = concurrent_sets(net, c, firable);
    for (const auto& s : sets) out.emplace_back(Label::set(s), Ops::aggl(net, c, s));
    for (auto t : firable) {
      const bool covered = std::any_of(sets.begin(), sets.end(), [&](const TransitionSeq& s) {
        return std::find(s.begin(), s.end(), t) != s.end() && closed_from(net, c, s, t);
      });
      if (!covered) out.emplace_back(Label::transition(t), Ops::fire(net, c, t));
    }
  }
  if (Ops::err_firable(net, c)) out.emplace_back(Label::err(), Ops::fire_err(net, c));
  return out;
}

/// Breadth-first construction of the class graph.
template <class Net>
ClassGraph<typename ModelOps<Net>::Class> explore(const Net& net, const ExploreConfig& cfg) {
  using Ops = ModelOps<Net>;
  using Class = typename Ops::Class;
  if (cfg.reduce == Reduction::step_aggl && cfg.graph != GraphKind::cscg)
    throw std::invalid_argument("step-aggl requires the CSCG");

  struct Node {
    Class cls;
    std::string live;
    std::string dom;  // canonical rendering
    std::size_t depth;
    std::size_t version = 0;
    std::optional<std::size_t> merged_into;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::string, std::vector<std::size_t>> by_live;
  std::map<std::size_t, std::vector<Edge>> out_edges;
  GraphStats stats;

  auto resolve = [&](std::size_t n) {
    while (nodes[n].merged_into) n = *nodes[n].merged_into;
    return n;
  };
  auto make_node = [&](Class c, std::size_t depth) {
    Node n{std::move(c), "", "", depth, 0, std::nullopt};
    n.live = Ops::live_key(net, n.cls);
    n.dom = to_string(n.cls.dom);
    return n;
  };

  std::deque<std::pair<std::size_t, std::size_t>> queue;  // (node, version)
  auto enqueue = [&](std::size_t id) { queue.emplace_back(id, nodes[id].version); };

  // Folds `from` into `into` (the lower index survives).
  auto absorb = [&](std::size_t into, std::size_t from) {
    nodes[from].merged_into = into;
    out_edges.erase(from);
    auto& bucket = by_live[nodes[from].live];
    bucket.erase(std::find(bucket.begin(), bucket.end(), from));
  };
  auto widen = [&](std::size_t id, Class c) {
    nodes[id].cls = std::move(c);
    nodes[id].dom = to_string(nodes[id].cls.dom);
    ++nodes[id].version;
    out_edges.erase(id);
    enqueue(id);
  };
  // Repeats inclusion / convex-union merging around `id` until stable.
  auto settle = [&](std::size_t id) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto other : std::vector<std::size_t>(by_live[nodes[id].live])) {
        if (other == id) continue;
        const auto& a = nodes[id].cls.dom;
        const auto& b = nodes[other].cls.dom;
        std::optional<Dbm> merged;
        bool inclusion = true;
        if (includes(a, b)) merged = a;
        else if (includes(b, a)) merged = b;
        else if (cfg.reduce == Reduction::convex_union) {
          merged = convex_union(a, b);
          inclusion = false;
        }
        if (!merged) continue;
        ++(inclusion ? stats.merges_inclusion : stats.merges_convex);
        const std::size_t keep = std::min(id, other), drop = std::max(id, other);
        Class c = nodes[keep].cls;
        c.dom = *merged;
        absorb(keep, drop);
        if (!(c.dom == nodes[keep].cls.dom)) widen(keep, std::move(c));
        id = keep;
        changed = true;
        break;
      }
    }
    return id;
  };

  // Returns the representative node for a freshly computed class.
  auto insert = [&](Class c, std::size_t depth) -> std::optional<std::size_t> {
    Node n = make_node(std::move(c), depth);
    auto& bucket = by_live[n.live];
    for (auto id : bucket)
      if (nodes[id].dom == n.dom) {
        ++stats.merges_equal;
        return id;
      }
    if (cfg.reduce == Reduction::inclusion || cfg.reduce == Reduction::convex_union) {
      for (auto id : bucket)
        if (includes(nodes[id].cls.dom, n.cls.dom)) {
          ++stats.merges_inclusion;
          return id;
        }
    }
    if (nodes.size() >= cfg.budget) {
      stats.truncated = true;
      return std::nullopt;
    }
    const std::size_t id = nodes.size();
    nodes.push_back(std::move(n));
    bucket.push_back(id);
    enqueue(id);
    if (cfg.reduce == Reduction::inclusion || cfg.reduce == Reduction::convex_union) return settle(id);
    return id;
  };

  insert(Ops::initial(net, cfg.graph), 0);

  while (!queue.empty()) {
    // One batch: every queued entry still current, expanded (possibly in parallel).
    std::vector<std::size_t> batch;
    while (!queue.empty()) {
      auto [id, version] = queue.front();
      queue.pop_front();
      if (nodes[id].merged_into || nodes[id].version != version) continue;
      if (cfg.max_depth && nodes[id].depth >= *cfg.max_depth) continue;
      if (std::find(batch.begin(), batch.end(), id) == batch.end()) batch.push_back(id);
    }
    std::vector<std::vector<std::pair<Label, Class>>> results(batch.size());
    auto work = [&](std::size_t i) { results[i] = successors(net, nodes[batch[i]].cls, cfg.reduce); };
    if (cfg.jobs > 1 && batch.size() > 1) {
      for (std::size_t start = 0; start < batch.size(); start += cfg.jobs) {
        std::vector<std::future<void>> fs;
        for (std::size_t i = start; i < std::min(batch.size(), start + cfg.jobs); ++i)
          fs.push_back(std::async(std::launch::async, work, i));
        for (auto& f : fs) f.get();
      }
    } else {
      for (std::size_t i = 0; i < batch.size(); ++i) work(i);
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const std::size_t src = batch[i];
      if (nodes[src].merged_into) continue;
      const std::size_t version = nodes[src].version;
      for (auto& [label, cls] : results[i]) {
        auto dst = insert(std::move(cls), nodes[src].depth + 1);
        if (nodes[src].merged_into || nodes[src].version != version) break;  // src was widened meanwhile
        if (dst) out_edges[src].push_back({src, label, *dst});
      }
    }
  }

  // Compact: drop merged nodes, renumber densely in creation order.
  ClassGraph<Class> g;
  std::vector<std::size_t> index(nodes.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!nodes[i].merged_into) {
      index[i] = g.nodes.size();
      g.nodes.push_back(nodes[i].cls);
    }
  std::set<Edge> edges;
  for (const auto& [src, es] : out_edges) {
    if (nodes[src].merged_into) continue;
    for (const auto& e : es) edges.insert({index[src], e.label, index[resolve(e.dst)]});
  }
  g.edges.assign(edges.begin(), edges.end());
  stats.nodes = g.nodes.size();
  stats.edges = g.edges.size();
  stats.err_edges = static_cast<std::size_t>(
      std::count_if(g.edges.begin(), g.edges.end(), [](const Edge& e) { return e.label.kind == Label::Kind::err; }));
  for (const auto& c : g.nodes)
    if (Ops::all_dead(net, c)) ++stats.all_dead_terminals;
  g.stats = stats;
  return g;
}

/// True iff `trace` labels a path from node 0. A set edge consumes its
/// members in any order as a consecutive block; the trace may end inside
/// a block.
template <class Class>
bool untimed_language_accepts(const ClassGraph<Class>& g, const Trace& trace) {
  if (g.stats.truncated) throw std::invalid_argument("graph is truncated");
  if (g.nodes.empty()) return trace.empty();
  std::vector<std::vector<const Edge*>> out(g.nodes.size());
  for (const auto& e : g.edges) out[e.src].push_back(&e);

  // Configuration: at a node, or inside a set edge with some members consumed.
  struct Config {
    std::size_t node;
    const Edge* edge;
    std::vector<std::size_t> pending;
    auto operator<=>(const Config&) const = default;
  };
  std::set<Config> cur{{0, nullptr, {}}};
  for (auto sym : trace) {
    std::set<Config> next;
    auto step_from = [&](std::size_t node) {
      for (const Edge* e : out[node]) {
        if (e->label.kind == Label::Kind::err) {
          if (sym == kErr) next.insert({e->dst, nullptr, {}});
        } else if (e->label.kind == Label::Kind::transition) {
          if (e->label.ts.front() == sym) next.insert({e->dst, nullptr, {}});
        } else if (std::find(e->label.ts.begin(), e->label.ts.end(), sym) != e->label.ts.end()) {
          std::vector<std::size_t> pending;
          for (auto t : e->label.ts)
            if (t != sym) pending.push_back(t);
          if (pending.empty()) next.insert({e->dst, nullptr, {}});
          else next.insert({e->dst, e, std::move(pending)});
        }
      }
    };
    for (const auto& c : cur) {
      if (!c.edge) {
        step_from(c.node);
        continue;
      }
      auto it = std::find(c.pending.begin(), c.pending.end(), sym);
      if (it == c.pending.end()) continue;
      std::vector<std::size_t> pending = c.pending;
      pending.erase(pending.begin() + (it - c.pending.begin()));
      if (pending.empty()) next.insert({c.node, nullptr, {}});
      else next.insert({c.node, c.edge, std::move(pending)});
    }
    if (next.empty()) return false;
    cur = std::move(next);
  }
  return true;
}

/// Words spelled by paths from node 0 with at most `depth` symbols; set
/// edges contribute every ordering of their members, possibly cut short at
/// the end of the word. Words are grouped by path.
template <class Class>
std::vector<std::set<Trace>> path_words(const ClassGraph<Class>& g, std::size_t depth) {
  std::vector<std::set<Trace>> out;
  std::vector<std::vector<const Edge*>> adj(g.nodes.size());
  for (const auto& e : g.edges) adj[e.src].push_back(&e);
  std::vector<const Edge*> path;
  auto expand = [&]() {
    std::set<Trace> words{Trace{}};
    std::size_t used = 0;
    for (const Edge* e : path) {
      std::set<Trace> next;
      const std::size_t room = depth - used;
      for (const auto& w : words) {
        if (e->label.kind == Label::Kind::err) {
          Trace x = w;
          x.push_back(kErr);
          next.insert(std::move(x));
          continue;
        }
        TransitionSeq perm = e->label.ts;
        do {
          Trace x = w;
          x.insert(x.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(std::min(room, perm.size())));
          next.insert(std::move(x));
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
      used += e->label.length();
      words = std::move(next);
    }
    out.push_back(std::move(words));
  };
  auto rec = [&](auto& self, std::size_t node, std::size_t used) -> void {
    expand();
    if (used >= depth) return;
    for (const Edge* e : adj[node]) {
      path.push_back(e);
      self(self, e->dst, used + e->label.length());
      path.pop_back();
    }
  };
  if (!g.nodes.empty()) rec(rec, 0, 0);
  return out;
}

/// All words of at most `depth` symbols accepted by the graph.
template <class Class>
std::set<Trace> graph_language(const ClassGraph<Class>& g, std::size_t depth) {
  std::set<Trace> out;
  for (auto& words : path_words(g, depth)) out.insert(words.begin(), words.end());
  return out;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

template <class Net, class Class>
std::string to_dot(const Net& net, const ClassGraph<Class>& g) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(net.name) << "\" {\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    os << "  n" << i << " [label=\"" << dot_escape(ModelOps<Net>::str(net, g.nodes[i])) << "\"];\n";
  for (const auto& e : g.edges)
    os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << dot_escape(to_string(net, e.label)) << "\"];\n";
  os << "}\n";
  return os.str();
}

/// One line per node and edge.
template <class Net, class Class>
std::string to_text(const Net& net, const ClassGraph<Class>& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) os << "n" << i << " " << ModelOps<Net>::str(net, g.nodes[i]) << "\n";
  for (const auto& e : g.edges) os << "n" << e.src << " -" << to_string(net, e.label) << "-> n" << e.dst << "\n";
  return os.str();
}

}  // namespace tpn
