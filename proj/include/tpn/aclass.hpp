#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "tpn/dbm.hpp"
#include "tpn/net.hpp"
#include "tpn/pclass.hpp"

namespace tpn {

/// State class of an A-TPN: marking, dead arcs and the domain of the
/// availability delays of the live enabled arcs (one variable per arc).
struct AClass {
  PlaceSet m;
  ArcSet dead;
  Dbm dom;
  GraphKind kind = GraphKind::scg;

  ArcSet live(const NetStructure& net) const {
    ArcSet out;
    for (const auto& a : enabled_arcs(net, m))
      if (!dead.count(a)) out.insert(a);
    return out;
  }
};

namespace detail {

inline std::vector<std::string> arc_vars(const NetStructure& net, const ArcSet& arcs) {
  std::vector<std::string> out;
  for (const auto& [p, t] : arcs) out.push_back(vars::arc(net, p, t));
  return out;
}

inline bool arcs_alive(const NetStructure& net, const ArcSet& live, std::size_t t) {
  return std::all_of(net.pre[t].begin(), net.pre[t].end(),
                     [&](std::size_t p) { return live.count({p, t}) != 0; });
}

/// Transitions whose every input arc is enabled and not dead.
inline TransitionSet live_transitions(const NetStructure& net, const ArcSet& live) {
  TransitionSet out;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (arcs_alive(net, live, t)) out.insert(t);
  return out;
}

}  // namespace detail

inline AClass initial_scg_a(const ANet& net) {
  const ArcSet arcs = enabled_arcs(net, net.m0);
  Dbm d(detail::arc_vars(net, arcs));
  for (const auto& [p, t] : arcs) {
    const auto& iv = net.arc_interval(p, t);
    d = conjoin(d, Constraint::lower(vars::arc(net, p, t), iv.lo));
    if (iv.hi) d = conjoin(d, Constraint::upper(vars::arc(net, p, t), *iv.hi));
  }
  return {net.m0, {}, canonicalize(std::move(d)), GraphKind::scg};
}

inline AClass initial_cscg_a(const ANet& net) {
  const ArcSet arcs = enabled_arcs(net, net.m0);
  Dbm d(detail::arc_vars(net, arcs));
  for (const auto& a : arcs)
    for (const auto& b : arcs) {
      const auto& ia = net.arc_interval(a.first, a.second);
      if (a == b || !ia.hi) continue;
      d = conjoin(d, Constraint::diff(vars::arc(net, a.first, a.second), vars::arc(net, b.first, b.second),
                                      *ia.hi - net.arc_interval(b.first, b.second).lo));
    }
  return {net.m0, {}, canonicalize(std::move(d)), GraphKind::cscg};
}

inline AClass initial_class_a(const ANet& net, GraphKind kind) {
  return kind == GraphKind::scg ? initial_scg_a(net) : initial_cscg_a(net);
}

/// dom AND (pt(i,t) - pt(j,k) <= 0) for every input arc of t and live arc (j,k).
inline Dbm firing_condition_a(const ANet& net, const AClass& c, std::size_t t) {
  Dbm d = c.dom;
  const ArcSet live = c.live(net);
  for (auto pi : net.pre[t]) {
    const std::size_t x = d.require(vars::arc(net, pi, t));
    for (const auto& [pj, tk] : live) {
      const std::size_t y = d.require(vars::arc(net, pj, tk));
      if (x != y) d.tighten(x, y, Bound::zero());
    }
  }
  return canonicalize(std::move(d));
}

inline bool firable_a(const ANet& net, const AClass& c, std::size_t t) {
  if (!detail::arcs_alive(net, c.live(net), t)) return false;
  return !firing_condition_a(net, c, t).is_empty();
}

/// Successor by t: condition, merge the input arcs of t into t_f, drop the
/// other output arcs of consumed places, add the arcs of created tokens
/// relative to t_f, then shift (SCG) or keep differences only (CSCG).
inline AClass fire_a(const ANet& net, const AClass& c, std::size_t t) {
  if (!firable_a(net, c, t)) throw NotFirable(net.transitions[t] + " is not firable");
  const ArcSet live = c.live(net);

  PlaceSet remaining = c.m;
  for (auto p : net.pre[t]) remaining.erase(p);
  detail::require_safe(net, remaining, t);
  PlaceSet m2 = remaining;
  m2.insert(net.post[t].begin(), net.post[t].end());

  ArcSet dead2;
  for (const auto& a : c.dead)
    if (!net.consumes(t, a.first)) dead2.insert(a);

  const std::string tf = vars::firing(net, t);
  std::vector<std::string> inputs;
  for (auto p : net.pre[t]) inputs.push_back(vars::arc(net, p, t));
  Dbm d = detail::merge_into(firing_condition_a(net, c, t), inputs, tf);
  if (net.pre[t].empty()) {
    for (const auto& [p, k] : live) d.tighten(d.require(tf), d.require(vars::arc(net, p, k)), Bound::zero());
    if (c.kind == GraphKind::scg) d.tighten(0, d.require(tf), Bound::zero());
  }

  std::vector<std::string> siblings;
  for (const auto& [p, k] : live)
    if (k != t && net.consumes(t, p)) siblings.push_back(vars::arc(net, p, k));
  d = project_out(d, siblings);

  std::vector<std::pair<std::size_t, std::size_t>> created;
  for (auto p : net.post[t])
    for (auto l : net.outputs(p)) created.emplace_back(p, l);
  std::vector<std::string> created_names;
  for (const auto& [p, l] : created) created_names.push_back(vars::arc(net, p, l));
  d = extend(d, created_names);
  const std::size_t f = d.require(tf);
  for (const auto& [p, l] : created) {
    const auto& iv = net.arc_interval(p, l);
    const std::size_t x = d.require(vars::arc(net, p, l));
    d.tighten(f, x, Bound::le(-iv.lo));
    if (iv.hi) d.tighten(x, f, Bound::le(*iv.hi));
  }

  if (c.kind == GraphKind::scg) {
    std::vector<std::string> shifted;
    for (const auto& v : d.vars())
      if (v != tf) shifted.push_back(v);
    d = project_out(substitute_shift(d, shifted, tf), {tf});
  } else {
    d = triangular_view(project_out(d, {tf}));
  }

  AClass out{std::move(m2), std::move(dead2), Dbm{}, c.kind};
  out.dom = reorder(d, detail::arc_vars(net, out.live(net)));
  return out;
}

/// Live arcs (p_i,t_l) such that for every transition t_f whose input arcs
/// are all live, dom AND (pt(f,t_f) - pt(i,l) <= 0 for f in Pre(t_f)) is
/// inconsistent.
inline ArcSet err_firable_a(const ANet& net, const AClass& c) {
  const ArcSet live = c.live(net);
  const TransitionSet lt = detail::live_transitions(net, live);
  ArcSet out;
  for (const auto& [pi, tl] : live) {
    const std::size_t y = c.dom.require(vars::arc(net, pi, tl));
    bool doomed = true;
    for (auto tf : lt) {
      Dbm d = c.dom;
      for (auto pf : net.pre[tf]) {
        const std::size_t x = d.require(vars::arc(net, pf, tf));
        if (x != y) d.tighten(x, y, Bound::zero());
      }
      if (is_consistent(d)) {
        doomed = false;
        break;
      }
    }
    if (doomed) out.insert({pi, tl});
  }
  return out;
}

inline AClass fire_err_class_a(const ANet& net, const AClass& c) {
  const ArcSet dying = err_firable_a(net, c);
  if (dying.empty()) throw NotFirable("Err is not firable");
  AClass out = c;
  out.dead.insert(dying.begin(), dying.end());
  out.dom = project_out(c.dom, detail::arc_vars(net, dying));
  if (out.kind == GraphKind::cscg) out.dom = triangular_view(out.dom);
  return out;
}

inline bool class_equal(const ANet& net, const AClass& a, const AClass& b) {
  if (a.kind != b.kind) throw std::invalid_argument("class kind mismatch");
  if (a.live(net) != b.live(net)) return false;
  if (a.kind == GraphKind::scg) return a.dom == b.dom;
  return triangular_view(a.dom) == triangular_view(b.dom);
}

inline AClass quotient(const AClass& c) {
  if (c.kind != GraphKind::scg) throw std::invalid_argument("quotient of a CSCG class");
  return {c.m, c.dead, triangular_view(c.dom), GraphKind::cscg};
}

inline std::string to_string(const NetStructure& net, const AClass& c) {
  std::string dead;
  for (const auto& [p, t] : c.dead) {
    if (!dead.empty()) dead += '+';
    dead += vars::arc(net, p, t);
  }
  return "(" + marking_str(net, c.m) + "; dead=" + dead + "; " + to_string(c.dom) + ")";
}

}  // namespace tpn
