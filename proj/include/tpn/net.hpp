#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tpn/rational.hpp"

namespace tpn {

/// Closed interval [lo, hi] with 0 <= lo and hi possibly infinite.
struct Interval {
  Rational lo;
  std::optional<Rational> hi;  // nullopt is +inf

  Interval() = default;
  Interval(Rational l, std::optional<Rational> h) : lo(l), hi(h) {
    if (lo < 0) throw std::invalid_argument("interval lower bound is negative");
    if (hi && *hi < lo) throw std::invalid_argument("empty interval");
  }

  bool bounded() const { return hi.has_value(); }
  std::string str() const {
    return "[" + lo.str() + "," + (hi ? hi->str() : std::string("inf")) + "]";
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

using PlaceSet = std::set<std::size_t>;
using TransitionSet = std::set<std::size_t>;
/// Input arc (place index, transition index).
using Arc = std::pair<std::size_t, std::size_t>;
using ArcSet = std::set<Arc>;

/// Raised when firing would put a second token in a marked place.
class SafetyViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a firing operation is requested for a label that is not firable.
class NotFirable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structure shared by P-TPNs and A-TPNs.
///
/// Places and transitions are addressed by dense indices assigned in
/// declaration order; presets and postsets are sorted index lists.
struct NetStructure {
  std::string name;
  std::vector<std::string> places;
  std::vector<std::string> transitions;
  std::vector<std::vector<std::size_t>> pre;   // per transition
  std::vector<std::vector<std::size_t>> post;  // per transition
  PlaceSet m0;

  std::size_t place_count() const { return places.size(); }
  std::size_t transition_count() const { return transitions.size(); }

  std::optional<std::size_t> place_index(const std::string& id) const {
    auto it = std::find(places.begin(), places.end(), id);
    if (it == places.end()) return std::nullopt;
    return static_cast<std::size_t>(it - places.begin());
  }
  std::optional<std::size_t> transition_index(const std::string& id) const {
    auto it = std::find(transitions.begin(), transitions.end(), id);
    if (it == transitions.end()) return std::nullopt;
    return static_cast<std::size_t>(it - transitions.begin());
  }
  std::size_t require_transition(const std::string& id) const {
    if (auto i = transition_index(id)) return *i;
    throw std::invalid_argument("unknown transition '" + id + "'");
  }
  std::size_t require_place(const std::string& id) const {
    if (auto i = place_index(id)) return *i;
    throw std::invalid_argument("unknown place '" + id + "'");
  }

  /// Output transitions of a place (p°), ascending.
  std::vector<std::size_t> outputs(std::size_t place) const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < transitions.size(); ++t)
      if (std::binary_search(pre[t].begin(), pre[t].end(), place)) out.push_back(t);
    return out;
  }

  bool consumes(std::size_t t, std::size_t place) const {
    return std::binary_search(pre[t].begin(), pre[t].end(), place);
  }
  bool produces(std::size_t t, std::size_t place) const {
    return std::binary_search(post[t].begin(), post[t].end(), place);
  }

  /// Checks index ranges and the sortedness of presets and postsets.
  void validate_structure() const {
    if (pre.size() != transitions.size() || post.size() != transitions.size())
      throw std::invalid_argument("preset/postset table size mismatch");
    auto check = [&](const std::vector<std::size_t>& v) {
      if (!std::is_sorted(v.begin(), v.end()) ||
          std::adjacent_find(v.begin(), v.end()) != v.end())
        throw std::invalid_argument("preset/postset must be sorted and duplicate-free");
      for (auto p : v)
        if (p >= places.size()) throw std::invalid_argument("place index out of range");
    };
    for (std::size_t t = 0; t < transitions.size(); ++t) {
      check(pre[t]);
      check(post[t]);
    }
    for (auto p : m0)
      if (p >= places.size()) throw std::invalid_argument("marked place out of range");
  }
};

/// P-Time Petri net: static residence interval per place.
struct PNet : NetStructure {
  std::vector<Interval> isp;  // per place

  void validate() const {
    validate_structure();
    if (isp.size() != places.size())
      throw std::invalid_argument("every place needs a residence interval");
  }
};

/// A-Time Petri net: static availability interval per input arc.
struct ANet : NetStructure {
  std::map<Arc, Interval> isa;  // defined exactly on the input arcs

  const Interval& arc_interval(std::size_t place, std::size_t t) const {
    auto it = isa.find({place, t});
    if (it == isa.end())
      throw std::invalid_argument("no interval on arc (" + places[place] + "," +
                                  transitions[t] + ")");
    return it->second;
  }

  void validate() const {
    validate_structure();
    std::size_t arcs = 0;
    for (std::size_t t = 0; t < transitions.size(); ++t)
      for (auto p : pre[t]) {
        arc_interval(p, t);
        ++arcs;
      }
    if (arcs != isa.size())
      throw std::invalid_argument("arc intervals defined outside the input arcs");
  }
};

/// Transitions whose preset is contained in `m`.
inline TransitionSet enabled(const NetStructure& net, const PlaceSet& m) {
  TransitionSet out;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (std::all_of(net.pre[t].begin(), net.pre[t].end(),
                    [&](std::size_t p) { return m.count(p) != 0; }))
      out.insert(t);
  return out;
}

inline bool in_conflict(const NetStructure& net, std::size_t t1, std::size_t t2) {
  const auto& a = net.pre.at(t1);
  const auto& b = net.pre.at(t2);
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

/// Enabled arcs EE(m) = {(p,t) | p in m, p in Pre(t)}.
inline ArcSet enabled_arcs(const NetStructure& net, const PlaceSet& m) {
  ArcSet out;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    for (auto p : net.pre[t])
      if (m.count(p)) out.insert({p, t});
  return out;
}

/// Every input arc inherits the residence interval of its place.
inline ANet translate_p_to_a(const PNet& net) {
  ANet out;
  static_cast<NetStructure&>(out) = static_cast<const NetStructure&>(net);
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    for (auto p : net.pre[t]) out.isa.emplace(Arc{p, t}, net.isp[p]);
  return out;
}

/// "p1+p2" style rendering of a place set; empty sets render as "0".
inline std::string marking_str(const NetStructure& net, const PlaceSet& m) {
  if (m.empty()) return "0";
  std::string s;
  for (auto p : m) {
    if (!s.empty()) s += '+';
    s += net.places[p];
  }
  return s;
}

}  // namespace tpn
