#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "tpn/dbm.hpp"
#include "tpn/net.hpp"

namespace tpn {

enum class GraphKind { scg, cscg };

inline const char* to_string(GraphKind k) { return k == GraphKind::scg ? "scg" : "cscg"; }

/// Variable naming shared by the class and agglomeration code.
namespace vars {
inline std::string token(const NetStructure& net, std::size_t p) { return net.places[p]; }
inline std::string firing(const NetStructure& net, std::size_t t) { return "@" + net.transitions[t]; }
/// Token of place p created by transition t inside an agglomerated step.
inline std::string instance(const NetStructure& net, std::size_t p, std::size_t t) {
  return net.places[p] + "^" + net.transitions[t];
}
inline std::string arc(const NetStructure& net, std::size_t p, std::size_t t) {
  return "pt(" + net.places[p] + "," + net.transitions[t] + ")";
}
inline std::string arc_instance(const NetStructure& net, std::size_t p, std::size_t l, std::size_t t) {
  return arc(net, p, l) + "^" + net.transitions[t];
}
}  // namespace vars

/// State class of a P-TPN: marking, dead tokens and the domain of the
/// residence delays of the live tokens (one variable per live place).
struct PClass {
  PlaceSet m;
  PlaceSet dead;
  Dbm dom;
  GraphKind kind = GraphKind::scg;

  PlaceSet live() const {
    PlaceSet out;
    std::set_difference(m.begin(), m.end(), dead.begin(), dead.end(), std::inserter(out, out.end()));
    return out;
  }
};

namespace detail {

inline std::vector<std::string> token_vars(const NetStructure& net, const PlaceSet& places) {
  std::vector<std::string> out;
  for (auto p : places) out.push_back(vars::token(net, p));
  return out;
}

inline void require_safe(const NetStructure& net, const PlaceSet& remaining, std::size_t t) {
  for (auto p : net.post[t])
    if (remaining.count(p))
      throw SafetyViolation("firing " + net.transitions[t] + " puts a second token in place " +
                            net.places[p]);
}

/// Replaces the (pairwise equal) variables in `merged` by a single variable
/// named `target`. With nothing to merge, `target` is added unconstrained.
inline Dbm merge_into(const Dbm& d, const std::vector<std::string>& merged, const std::string& target) {
  if (merged.empty()) return extend(d, {target});
  Dbm out = project_out(d, std::vector<std::string>(merged.begin() + 1, merged.end()));
  return rename(out, {{merged.front(), target}});
}

}  // namespace detail

inline PClass initial_scg(const PNet& net) {
  Dbm d(detail::token_vars(net, net.m0));
  for (auto p : net.m0) {
    const auto& iv = net.isp[p];
    d = conjoin(d, Constraint::lower(vars::token(net, p), iv.lo));
    if (iv.hi) d = conjoin(d, Constraint::upper(vars::token(net, p), *iv.hi));
  }
  return {net.m0, {}, canonicalize(std::move(d)), GraphKind::scg};
}

inline PClass initial_cscg(const PNet& net) {
  Dbm d(detail::token_vars(net, net.m0));
  for (auto pi : net.m0)
    for (auto pj : net.m0) {
      if (pi == pj || !net.isp[pi].hi) continue;
      d = conjoin(d, Constraint::diff(vars::token(net, pi), vars::token(net, pj),
                                      *net.isp[pi].hi - net.isp[pj].lo));
    }
  return {net.m0, {}, canonicalize(std::move(d)), GraphKind::cscg};
}

inline PClass initial_class(const PNet& net, GraphKind kind) {
  return kind == GraphKind::scg ? initial_scg(net) : initial_cscg(net);
}

/// dom AND (p_f - p_i <= 0) for every input p_f of t and live p_i.
inline Dbm firing_condition(const PNet& net, const PClass& c, std::size_t t) {
  Dbm d = c.dom;
  const PlaceSet live = c.live();
  for (auto pf : net.pre[t])
    for (auto pi : live)
      if (pf != pi) d.tighten(d.require(vars::token(net, pf)), d.require(vars::token(net, pi)), Bound::zero());
  return canonicalize(std::move(d));
}

inline bool firable(const PNet& net, const PClass& c, std::size_t t) {
  const PlaceSet live = c.live();
  for (auto p : net.pre[t])
    if (!live.count(p)) return false;
  return !firing_condition(net, c, t).is_empty();
}

namespace detail {

inline PClass fire_p(const PNet& net, const PClass& c, std::size_t t) {
  if (!firable(net, c, t)) throw NotFirable(net.transitions[t] + " is not firable");
  const PlaceSet live = c.live();

  PlaceSet remaining = c.m;
  for (auto p : net.pre[t]) remaining.erase(p);
  require_safe(net, remaining, t);
  PlaceSet m2 = remaining;
  m2.insert(net.post[t].begin(), net.post[t].end());

  const std::string tf = vars::firing(net, t);
  Dbm d = merge_into(firing_condition(net, c, t), token_vars(net, PlaceSet(net.pre[t].begin(), net.pre[t].end())), tf);
  if (net.pre[t].empty()) {
    // A source transition still cannot outlive any live token.
    for (auto p : live) d.tighten(d.require(tf), d.require(vars::token(net, p)), Bound::zero());
    if (c.kind == GraphKind::scg) d.tighten(0, d.require(tf), Bound::zero());
  }

  std::vector<std::string> created;
  for (auto p : net.post[t]) created.push_back(vars::token(net, p));
  d = extend(d, created);
  for (auto p : net.post[t]) {
    const auto& iv = net.isp[p];
    const std::size_t pn = d.require(vars::token(net, p));
    const std::size_t f = d.require(tf);
    d.tighten(f, pn, Bound::le(-iv.lo));
    if (iv.hi) d.tighten(pn, f, Bound::le(*iv.hi));
  }

  if (c.kind == GraphKind::scg) {
    std::vector<std::string> shifted;
    for (const auto& v : d.vars())
      if (v != tf) shifted.push_back(v);
    d = project_out(substitute_shift(d, shifted, tf), {tf});
  } else {
    d = triangular_view(project_out(d, {tf}));
  }

  PlaceSet dead = c.dead;
  PlaceSet live2;
  std::set_difference(m2.begin(), m2.end(), dead.begin(), dead.end(), std::inserter(live2, live2.end()));
  return {std::move(m2), std::move(dead), reorder(d, token_vars(net, live2)), c.kind};
}

}  // namespace detail

/// Successor of an SCG class: condition, merge presets into t_f, created
/// token windows relative to t_f, shift every token by t_f, eliminate t_f.
inline PClass fire_scg(const PNet& net, const PClass& c, std::size_t t) {
  if (c.kind != GraphKind::scg) throw std::invalid_argument("fire_scg on a CSCG class");
  return detail::fire_p(net, c, t);
}

/// Successor of a CSCG class: as fire_scg without the shift; only the
/// difference constraints survive.
inline PClass fire_cscg(const PNet& net, const PClass& c, std::size_t t) {
  if (c.kind != GraphKind::cscg) throw std::invalid_argument("fire_cscg on an SCG class");
  return detail::fire_p(net, c, t);
}

inline PClass fire(const PNet& net, const PClass& c, std::size_t t) { return detail::fire_p(net, c, t); }

/// Live tokens that no enabled transition can consume or outrun: for every
/// enabled t, dom AND (p_f - p_i <= 0 for p_f in Pre(t)) is inconsistent.
/// With no enabled transition every live token qualifies.
inline PlaceSet err_firable(const PNet& net, const PClass& c) {
  const PlaceSet live = c.live();
  const TransitionSet en = enabled(net, live);
  PlaceSet out;
  for (auto pi : live) {
    const std::string vi = vars::token(net, pi);
    bool doomed = true;
    for (auto t : en) {
      Dbm d = c.dom;
      for (auto pf : net.pre[t])
        if (pf != pi) d.tighten(d.require(vars::token(net, pf)), d.require(vi), Bound::zero());
      if (is_consistent(d)) {
        doomed = false;
        break;
      }
    }
    if (doomed) out.insert(pi);
  }
  return out;
}

inline PClass fire_err_class(const PNet& net, const PClass& c) {
  const PlaceSet dying = err_firable(net, c);
  if (dying.empty()) throw NotFirable("Err is not firable");
  PClass out = c;
  out.dead.insert(dying.begin(), dying.end());
  out.dom = project_out(c.dom, detail::token_vars(net, dying));
  if (out.kind == GraphKind::cscg) out.dom = triangular_view(out.dom);
  return out;
}

/// SCG classes are compared on their canonical DBMs, CSCG classes on the
/// triangular entries; dead tokens are ignored.
inline bool class_equal(const PClass& a, const PClass& b) {
  if (a.kind != b.kind) throw std::invalid_argument("class kind mismatch");
  if (a.live() != b.live()) return false;
  if (a.kind == GraphKind::scg) return a.dom == b.dom;
  return triangular_view(a.dom) == triangular_view(b.dom);
}

inline PClass quotient(const PClass& c) {
  if (c.kind != GraphKind::scg) throw std::invalid_argument("quotient of a CSCG class");
  return {c.m, c.dead, triangular_view(c.dom), GraphKind::cscg};
}

inline std::string to_string(const NetStructure& net, const PClass& c) {
  std::string dead;
  for (auto p : c.dead) {
    if (!dead.empty()) dead += '+';
    dead += net.places[p];
  }
  return "(" + marking_str(net, c.m) + "; dead=" + dead + "; " + to_string(c.dom) + ")";
}

}  // namespace tpn
