#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tpn/aclass.hpp"
#include "tpn/dbm.hpp"
#include "tpn/net.hpp"
#include "tpn/pclass.hpp"

namespace tpn {

/// Ordered list of pairwise non-conflicting transitions.
using TransitionSeq = std::vector<std::size_t>;

namespace detail {

inline void le(Dbm& d, std::string_view x, std::string_view y, const Rational& c) {
  d.tighten(d.require(x), d.require(y), Bound::le(c));
}

inline void window(Dbm& d, std::string_view x, std::string_view from, const Interval& iv) {
  le(d, from, x, -iv.lo);
  if (iv.hi) le(d, x, from, *iv.hi);
}

inline void require_independent(const NetStructure& net, const TransitionSeq& seq) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] >= net.transition_count()) throw std::invalid_argument("unknown transition index");
    for (std::size_t j = 0; j < i; ++j) {
      if (seq[i] == seq[j]) throw std::invalid_argument("transition listed twice: " + net.transitions[seq[i]]);
      if (in_conflict(net, seq[i], seq[j]))
        throw std::invalid_argument("conflict detected between " + net.transitions[seq[j]] + " and " +
                                    net.transitions[seq[i]]);
    }
  }
}

/// Every member's output places must be free in every interleaving: no two
/// members create the same place, no member creates a place that stays
/// marked, and no member refills a place another member consumes.
inline void require_safe_set(const NetStructure& net, const PlaceSet& m, const TransitionSeq& seq) {
  PlaceSet consumed;
  for (auto t : seq) consumed.insert(net.pre[t].begin(), net.pre[t].end());
  std::map<std::size_t, std::size_t> creator;
  for (auto t : seq)
    for (auto p : net.post[t]) {
      auto [it, fresh] = creator.emplace(p, t);
      if (!fresh)
        throw SafetyViolation(net.transitions[it->second] + " and " + net.transitions[t] +
                              " both put a token in place " + net.places[p]);
      if (m.count(p) && !net.consumes(t, p))
        throw SafetyViolation("firing " + net.transitions[t] + " may put a second token in place " + net.places[p]);
    }
}

inline TransitionSeq sorted_set(const TransitionSeq& tm) {
  TransitionSeq out = tm;
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> instance_vars_p(const PNet& net, const TransitionSeq& seq) {
  std::vector<std::string> out;
  for (auto t : seq)
    for (auto p : net.post[t]) out.push_back(vars::instance(net, p, t));
  return out;
}

inline std::vector<std::pair<Arc, std::size_t>> created_arcs(const NetStructure& net, const TransitionSeq& seq) {
  std::vector<std::pair<Arc, std::size_t>> out;  // ((place, output), creator)
  for (auto t : seq)
    for (auto p : net.post[t])
      for (auto l : net.outputs(p)) out.push_back({{p, l}, t});
  return out;
}

inline Dbm with_step_vars(const Dbm& dom, const NetStructure& net, const TransitionSeq& seq,
                          const std::vector<std::string>& instances) {
  std::vector<std::string> extra;
  for (auto t : seq) extra.push_back(vars::firing(net, t));
  extra.insert(extra.end(), instances.begin(), instances.end());
  return extend(dom, extra);
}

}  // namespace detail

/// Firing condition of the sequence `seq` from a P-TPN class: ordering
/// chain, inputs equal to firing delays, each firing no later than every
/// token present at that point, and created-token windows.
inline Dbm seq_condition(const PNet& net, const PClass& c, const TransitionSeq& seq) {
  detail::require_independent(net, seq);
  const PlaceSet live = c.live();
  for (auto t : seq)
    for (auto p : net.pre[t])
      if (!live.count(p)) throw std::invalid_argument("preset of " + net.transitions[t] + " is not alive");

  Dbm d = detail::with_step_vars(c.dom, net, seq, detail::instance_vars_p(net, seq));
  PlaceSet consumed_before;
  for (std::size_t f = 0; f < seq.size(); ++f) {
    const std::size_t t = seq[f];
    const std::string tf = vars::firing(net, t);
    if (f > 0) detail::le(d, vars::firing(net, seq[f - 1]), tf, 0);
    for (auto p : net.pre[t]) {
      detail::le(d, vars::token(net, p), tf, 0);
      detail::le(d, tf, vars::token(net, p), 0);
    }
    for (auto p : live)
      if (!consumed_before.count(p)) detail::le(d, tf, vars::token(net, p), 0);
    for (std::size_t k = 0; k < f; ++k)
      for (auto p : net.post[seq[k]]) detail::le(d, tf, vars::instance(net, p, seq[k]), 0);
    for (auto p : net.post[t]) detail::window(d, vars::instance(net, p, t), tf, net.isp[p]);
    consumed_before.insert(net.pre[t].begin(), net.pre[t].end());
  }
  return canonicalize(std::move(d));
}

/// Order-free firing condition of the set `tm` (before any elimination):
/// inputs equal to firing delays, created-token windows, and every firing
/// no later than every surviving token and every created token.
inline Dbm set_condition(const PNet& net, const PClass& c, const TransitionSeq& tm) {
  const TransitionSeq seq = detail::sorted_set(tm);
  detail::require_independent(net, seq);
  const PlaceSet live = c.live();
  PlaceSet consumed;
  for (auto t : seq)
    for (auto p : net.pre[t]) {
      if (!live.count(p)) throw std::invalid_argument("preset of " + net.transitions[t] + " is not alive");
      consumed.insert(p);
    }

  Dbm d = detail::with_step_vars(c.dom, net, seq, detail::instance_vars_p(net, seq));
  for (auto t : seq) {
    const std::string tf = vars::firing(net, t);
    for (auto p : net.pre[t]) {
      detail::le(d, vars::token(net, p), tf, 0);
      detail::le(d, tf, vars::token(net, p), 0);
    }
    for (auto p : net.post[t]) detail::window(d, vars::instance(net, p, t), tf, net.isp[p]);
    for (auto p : live)
      if (!consumed.count(p)) detail::le(d, tf, vars::token(net, p), 0);
    for (auto k : seq)
      for (auto p : net.post[k]) detail::le(d, tf, vars::instance(net, p, k), 0);
  }
  return canonicalize(std::move(d));
}

/// Union of the successors of a CSCG class over all interleavings of `tm`,
/// computed directly from the order-free condition.
inline PClass aggl_successor(const PNet& net, const PClass& c, const TransitionSeq& tm) {
  if (c.kind != GraphKind::cscg) throw std::invalid_argument("agglomeration requires a CSCG class");
  const TransitionSeq seq = detail::sorted_set(tm);
  detail::require_independent(net, seq);
  for (auto t : seq)
    if (!firable(net, c, t)) throw NotFirable(net.transitions[t] + " is not firable");
  detail::require_safe_set(net, c.m, seq);

  Dbm d = set_condition(net, c, seq);
  if (d.is_empty()) throw NotFirable("the set is not jointly firable");

  std::vector<std::string> drop;
  PlaceSet m2 = c.m;
  for (auto t : seq) {
    drop.push_back(vars::firing(net, t));
    for (auto p : net.pre[t]) {
      drop.push_back(vars::token(net, p));
      m2.erase(p);
    }
  }
  d = project_out(d, drop);
  std::map<std::string, std::string> names;
  for (auto t : seq)
    for (auto p : net.post[t]) {
      names.emplace(vars::instance(net, p, t), vars::token(net, p));
      m2.insert(p);
    }
  d = triangular_view(rename(d, names));

  PClass out{std::move(m2), c.dead, Dbm{}, GraphKind::cscg};
  out.dom = reorder(d, detail::token_vars(net, out.live()));
  return out;
}

/// Classes reached by iterated fire_cscg along every ordering of `tm`, in
/// lexicographic order of the orderings. Infeasible orderings are skipped.
inline std::vector<PClass> stepwise_union(const PNet& net, const PClass& c, const TransitionSeq& tm) {
  if (c.kind != GraphKind::cscg) throw std::invalid_argument("agglomeration requires a CSCG class");
  TransitionSeq seq = detail::sorted_set(tm);
  detail::require_independent(net, seq);
  std::vector<PClass> out;
  do {
    PClass cur = c;
    bool ok = true;
    for (auto t : seq) {
      if (!firable(net, cur, t)) {
        ok = false;
        break;
      }
      cur = fire_cscg(net, cur, t);
    }
    if (ok) out.push_back(std::move(cur));
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

// A-TPN counterparts.

namespace detail {

inline std::vector<std::string> instance_vars_a(const NetStructure& net, const TransitionSeq& seq) {
  std::vector<std::string> out;
  for (const auto& [a, t] : created_arcs(net, seq)) out.push_back(vars::arc_instance(net, a.first, a.second, t));
  return out;
}

inline void require_arcs_alive(const ANet& net, const ArcSet& live, const TransitionSeq& seq) {
  for (auto t : seq)
    if (!arcs_alive(net, live, t))
      throw std::invalid_argument("an input arc of " + net.transitions[t] + " is not alive");
}

}  // namespace detail

/// Which formula the A-TPN set condition uses.
///
/// `complete` additionally requires each member to fire no later than the
/// other live output arcs of the places it consumes. `as_stated` omits those
/// constraints; it is kept to exhibit the resulting discrepancy in tests.
enum class SetConditionForm { complete, as_stated };

inline Dbm seq_condition_a(const ANet& net, const AClass& c, const TransitionSeq& seq) {
  detail::require_independent(net, seq);
  const ArcSet live = c.live(net);
  detail::require_arcs_alive(net, live, seq);

  Dbm d = detail::with_step_vars(c.dom, net, seq, detail::instance_vars_a(net, seq));
  PlaceSet consumed_before;
  for (std::size_t f = 0; f < seq.size(); ++f) {
    const std::size_t t = seq[f];
    const std::string tf = vars::firing(net, t);
    if (f > 0) detail::le(d, vars::firing(net, seq[f - 1]), tf, 0);
    for (auto p : net.pre[t]) {
      detail::le(d, vars::arc(net, p, t), tf, 0);
      detail::le(d, tf, vars::arc(net, p, t), 0);
    }
    for (const auto& [p, k] : live)
      if (!consumed_before.count(p)) detail::le(d, tf, vars::arc(net, p, k), 0);
    for (std::size_t k = 0; k < f; ++k)
      for (auto p : net.post[seq[k]])
        for (auto l : net.outputs(p)) detail::le(d, tf, vars::arc_instance(net, p, l, seq[k]), 0);
    for (auto p : net.post[t])
      for (auto l : net.outputs(p))
        detail::window(d, vars::arc_instance(net, p, l, t), tf, net.arc_interval(p, l));
    consumed_before.insert(net.pre[t].begin(), net.pre[t].end());
  }
  return canonicalize(std::move(d));
}

inline Dbm set_condition_a(const ANet& net, const AClass& c, const TransitionSeq& tm,
                           SetConditionForm form = SetConditionForm::complete) {
  const TransitionSeq seq = detail::sorted_set(tm);
  detail::require_independent(net, seq);
  const ArcSet live = c.live(net);
  detail::require_arcs_alive(net, live, seq);
  PlaceSet consumed;
  for (auto t : seq) consumed.insert(net.pre[t].begin(), net.pre[t].end());

  Dbm d = detail::with_step_vars(c.dom, net, seq, detail::instance_vars_a(net, seq));
  for (auto t : seq) {
    const std::string tf = vars::firing(net, t);
    for (auto p : net.pre[t]) {
      detail::le(d, vars::arc(net, p, t), tf, 0);
      detail::le(d, tf, vars::arc(net, p, t), 0);
    }
    for (auto p : net.post[t])
      for (auto l : net.outputs(p))
        detail::window(d, vars::arc_instance(net, p, l, t), tf, net.arc_interval(p, l));
    for (const auto& [p, k] : live) {
      const bool survives = !consumed.count(p);
      const bool own_sibling = form == SetConditionForm::complete && net.consumes(t, p);
      if (survives || own_sibling) detail::le(d, tf, vars::arc(net, p, k), 0);
    }
    for (auto k : seq)
      for (auto p : net.post[k])
        for (auto l : net.outputs(p)) detail::le(d, tf, vars::arc_instance(net, p, l, k), 0);
  }
  return canonicalize(std::move(d));
}

inline AClass aggl_successor_a(const ANet& net, const AClass& c, const TransitionSeq& tm,
                               SetConditionForm form = SetConditionForm::complete) {
  if (c.kind != GraphKind::cscg) throw std::invalid_argument("agglomeration requires a CSCG class");
  const TransitionSeq seq = detail::sorted_set(tm);
  detail::require_independent(net, seq);
  for (auto t : seq)
    if (!firable_a(net, c, t)) throw NotFirable(net.transitions[t] + " is not firable");
  detail::require_safe_set(net, c.m, seq);

  Dbm d = set_condition_a(net, c, seq, form);
  if (d.is_empty()) throw NotFirable("the set is not jointly firable");

  PlaceSet consumed;
  for (auto t : seq) consumed.insert(net.pre[t].begin(), net.pre[t].end());
  std::vector<std::string> drop;
  for (auto t : seq) drop.push_back(vars::firing(net, t));
  for (const auto& [p, k] : c.live(net))
    if (consumed.count(p)) drop.push_back(vars::arc(net, p, k));
  d = project_out(d, drop);

  std::map<std::string, std::string> names;
  for (const auto& [a, t] : detail::created_arcs(net, seq))
    names.emplace(vars::arc_instance(net, a.first, a.second, t), vars::arc(net, a.first, a.second));
  d = triangular_view(rename(d, names));

  PlaceSet m2;
  for (auto p : c.m)
    if (!consumed.count(p)) m2.insert(p);
  for (auto t : seq) m2.insert(net.post[t].begin(), net.post[t].end());
  ArcSet dead2;
  for (const auto& a : c.dead)
    if (!consumed.count(a.first)) dead2.insert(a);

  AClass out{std::move(m2), std::move(dead2), Dbm{}, GraphKind::cscg};
  out.dom = reorder(d, detail::arc_vars(net, out.live(net)));
  return out;
}

inline std::vector<AClass> stepwise_union_a(const ANet& net, const AClass& c, const TransitionSeq& tm) {
  if (c.kind != GraphKind::cscg) throw std::invalid_argument("agglomeration requires a CSCG class");
  TransitionSeq seq = detail::sorted_set(tm);
  detail::require_independent(net, seq);
  std::vector<AClass> out;
  do {
    AClass cur = c;
    bool ok = true;
    for (auto t : seq) {
      if (!firable_a(net, cur, t)) {
        ok = false;
        break;
      }
      cur = fire_a(net, cur, t);
    }
    if (ok) out.push_back(std::move(cur));
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

/// Order-free condition plus the chain t_1 <= ... <= t_m of `order`; equals
/// seq_condition(order) when the dropped constraints are indeed redundant.
inline Dbm chained_set_condition(const PNet& net, const PClass& c, const TransitionSeq& order) {
  Dbm d = set_condition(net, c, order);
  for (std::size_t f = 1; f < order.size(); ++f)
    detail::le(d, vars::firing(net, order[f - 1]), vars::firing(net, order[f]), 0);
  return canonicalize(std::move(d));
}

inline Dbm chained_set_condition_a(const ANet& net, const AClass& c, const TransitionSeq& order,
                                   SetConditionForm form = SetConditionForm::complete) {
  Dbm d = set_condition_a(net, c, order, form);
  for (std::size_t f = 1; f < order.size(); ++f)
    detail::le(d, vars::firing(net, order[f - 1]), vars::firing(net, order[f]), 0);
  return canonicalize(std::move(d));
}

}  // namespace tpn
