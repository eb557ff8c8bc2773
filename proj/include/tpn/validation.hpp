#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "tpn/agglomeration.hpp"
#include "tpn/explorer.hpp"
#include "tpn/semantics.hpp"

namespace tpn {

/// Outcome of one cross-validation property over one or more nets.
struct SuiteResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<std::string> failures;

  explicit SuiteResult(std::string n = {}) : name(std::move(n)) {}

  bool passed() const { return failures.empty(); }
  void fail(std::string what) {
    if (failures.size() < 20) failures.push_back(std::move(what));
    else if (failures.size() == 20) failures.push_back("...");
  }
  void merge(const SuiteResult& o) {
    checked += o.checked;
    skipped += o.skipped;
    for (const auto& f : o.failures) fail(f);
  }
};

struct AgglCheckConfig {
  std::size_t depth = 3;     // classes reachable within this many firings
  std::size_t min_size = 2;  // set sizes examined
  std::size_t max_size = 3;
  SetConditionForm form = SetConditionForm::complete;  // A-TPN only
};

namespace detail {

/// Subsets of `items` with sizes in [lo, hi] whose members pairwise satisfy `ok`.
inline std::vector<TransitionSeq> compatible_subsets(const std::vector<std::size_t>& items, std::size_t lo,
                                                     std::size_t hi, auto ok) {
  std::vector<TransitionSeq> out;
  TransitionSeq cur;
  auto rec = [&](auto& self, std::size_t start) -> void {
    if (cur.size() >= lo) out.push_back(cur);
    if (cur.size() == hi) return;
    for (std::size_t i = start; i < items.size(); ++i) {
      if (!std::all_of(cur.begin(), cur.end(), [&](std::size_t t) { return ok(t, items[i]); })) continue;
      cur.push_back(items[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

inline std::string seq_str(const NetStructure& net, const TransitionSeq& s) {
  std::string out;
  for (auto t : s) out += (out.empty() ? "" : " ") + net.transitions[t];
  return out;
}

template <class Net>
std::vector<typename ModelOps<Net>::Class> cscg_classes(const Net& net, std::size_t depth) {
  ExploreConfig cfg;
  cfg.graph = GraphKind::cscg;
  cfg.max_depth = depth;
  return explore(net, cfg).nodes;
}

template <class Class>
bool same_class(const NetStructure& net, const Class& a, const Class& b) {
  if constexpr (std::is_same_v<Class, PClass>) {
    (void)net;
    return a.m == b.m && a.dead == b.dead && class_equal(a, b);
  } else {
    return a.m == b.m && a.dead == b.dead && class_equal(static_cast<const ANet&>(net), a, b);
  }
}

}  // namespace detail

/// For every CSCG class within the configured depth and every set of
/// pairwise non-conflicting firable transitions: the stepwise successors
/// over all orderings have a convex union equal to the direct agglomerated
/// successor; each ordering's sequence condition is consistent exactly when
/// the ordering fires stepwise; the result does not depend on listing order.
template <class Net>
SuiteResult check_agglomeration(const Net& net, const AgglCheckConfig& cfg = {}) {
  constexpr bool is_p = std::is_same_v<Net, PNet>;
  SuiteResult r{is_p ? "agglomeration (P-TPN)" : "agglomeration (A-TPN)"};
  using Ops = ModelOps<Net>;
  for (const auto& c : detail::cscg_classes(net, cfg.depth)) {
    std::vector<std::size_t> firable;
    for (std::size_t t = 0; t < net.transition_count(); ++t)
      if (Ops::firable(net, c, t)) firable.push_back(t);
    const auto sets = detail::compatible_subsets(firable, cfg.min_size, cfg.max_size, [&](std::size_t a, std::size_t b) {
      return !in_conflict(net, a, b);
    });
    for (const auto& tm : sets) {
      const std::string where = Ops::str(net, c) + " with {" + detail::seq_str(net, tm) + "}";
      try {
        detail::require_safe_set(net, c.m, tm);
      } catch (const SafetyViolation&) {
        ++r.skipped;
        continue;
      }
      ++r.checked;
      try {
        std::vector<typename Ops::Class> steps;
        if constexpr (is_p) steps = stepwise_union(net, c, tm);
        else steps = stepwise_union_a(net, c, tm);

        // Sequence condition versus stepwise firability, ordering by ordering.
        TransitionSeq order = tm;
        std::size_t feasible = 0;
        do {
          Dbm cond;
          bool fires = true;
          auto cur = c;
          for (auto t : order) {
            if (!Ops::firable(net, cur, t)) {
              fires = false;
              break;
            }
            cur = Ops::fire(net, cur, t);
          }
          if constexpr (is_p) cond = seq_condition(net, c, order);
          else cond = seq_condition_a(net, c, order);
          if (is_consistent(cond) != fires)
            r.fail(where + ": sequence condition disagrees with stepwise firing of " + detail::seq_str(net, order));
          feasible += fires;
        } while (std::next_permutation(order.begin(), order.end()));

        std::optional<typename Ops::Class> direct;
        try {
          if constexpr (is_p) direct = aggl_successor(net, c, tm);
          else direct = aggl_successor_a(net, c, tm, cfg.form);
        } catch (const NotFirable&) {
        }
        if (!direct) {
          if (feasible != 0) r.fail(where + ": direct successor empty but some ordering fires");
          continue;
        }
        if (steps.empty()) {
          r.fail(where + ": direct successor nonempty but no ordering fires");
          continue;
        }
        std::vector<Dbm> doms;
        for (const auto& s : steps) {
          doms.push_back(s.dom);
          if (s.m != direct->m || s.dead != direct->dead) r.fail(where + ": marking or dead set differs");
        }
        const auto hull = convex_union(std::span<const Dbm>(doms));
        if (!hull) {
          r.fail(where + ": union of interleavings is not convex");
          continue;
        }
        if (!(triangular_view(*hull) == direct->dom))
          r.fail(where + ": union " + to_string(*hull) + " differs from direct " + to_string(direct->dom));

        TransitionSeq reversed(tm.rbegin(), tm.rend());
        typename Ops::Class again = *direct;
        if constexpr (is_p) again = aggl_successor(net, c, reversed);
        else again = aggl_successor_a(net, c, reversed, cfg.form);
        if (!detail::same_class(net, again, *direct)) r.fail(where + ": result depends on listing order");
      } catch (const SafetyViolation&) {
        ++r.skipped;
        --r.checked;
      } catch (const std::exception& e) {
        r.fail(where + ": " + e.what());
      }
    }
  }
  return r;
}

/// Sequence condition of every ordering versus the order-free condition
/// conjoined with that ordering's chain: identical canonical forms.
template <class Net>
SuiteResult check_redundancy(const Net& net, const AgglCheckConfig& cfg = {}) {
  constexpr bool is_p = std::is_same_v<Net, PNet>;
  SuiteResult r{is_p ? "redundancy (P-TPN)" : "redundancy (A-TPN)"};
  using Ops = ModelOps<Net>;
  for (const auto& c : detail::cscg_classes(net, cfg.depth)) {
    std::vector<std::size_t> firable;
    for (std::size_t t = 0; t < net.transition_count(); ++t)
      if (Ops::firable(net, c, t)) firable.push_back(t);
    for (auto tm : detail::compatible_subsets(firable, std::max<std::size_t>(cfg.min_size, 1), cfg.max_size,
                                              [&](std::size_t a, std::size_t b) { return !in_conflict(net, a, b); })) {
      do {
        ++r.checked;
        Dbm lhs, rhs;
        if constexpr (is_p) {
          lhs = seq_condition(net, c, tm);
          rhs = chained_set_condition(net, c, tm);
        } else {
          lhs = seq_condition_a(net, c, tm);
          rhs = chained_set_condition_a(net, c, tm, cfg.form);
        }
        if (!(lhs == rhs))
          r.fail(Ops::str(net, c) + " ordering " + detail::seq_str(net, tm) + ": " + to_string(lhs) + " vs " +
                 to_string(rhs));
      } while (std::next_permutation(tm.begin(), tm.end()));
    }
  }
  return r;
}

/// Every untimed trace of the concrete semantics (bounded horizon, delay
/// grid) is accepted by the unreduced SCG and CSCG.
template <class Net>
SuiteResult check_containment(const Net& net, const RunConfig& runs) {
  SuiteResult r{"oracle containment"};
  const auto traces = untimed_traces(net, runs);
  for (auto kind : {GraphKind::scg, GraphKind::cscg}) {
    ExploreConfig cfg;
    cfg.graph = kind;
    cfg.max_depth = runs.horizon;
    const auto g = explore(net, cfg);
    for (const auto& tr : traces) {
      ++r.checked;
      if (!untimed_language_accepts(g, tr))
        r.fail(std::string(to_string(kind)) + " rejects concrete trace '" + trace_str(net, tr) + "'");
    }
  }
  return r;
}

/// The step-agglomerated CSCG and the classic CSCG describe the same
/// behaviours up to `depth` symbols: every classic word is accepted by the
/// reduced graph, and every path of the reduced graph has an ordering of
/// its set edges accepted by the classic graph.
template <class Net>
SuiteResult check_step_equivalence(const Net& net, std::size_t depth) {
  SuiteResult r{"step-aggl trace equivalence"};
  ExploreConfig cfg;
  cfg.graph = GraphKind::cscg;
  cfg.max_depth = depth;
  const auto classic = explore(net, cfg);
  cfg.reduce = Reduction::step_aggl;
  const auto reduced = explore(net, cfg);
  for (const auto& w : graph_language(classic, depth)) {
    ++r.checked;
    if (!untimed_language_accepts(reduced, w)) r.fail("reduced graph rejects '" + trace_str(net, w) + "'");
  }
  for (const auto& words : path_words(reduced, depth)) {
    ++r.checked;
    const bool some = std::any_of(words.begin(), words.end(),
                                  [&](const Trace& w) { return untimed_language_accepts(classic, w); });
    if (!some) r.fail("no ordering of a reduced path is classic, e.g. '" + trace_str(net, *words.begin()) + "'");
  }
  return r;
}

}  // namespace tpn
