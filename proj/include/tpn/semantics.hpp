#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "tpn/net.hpp"

namespace tpn {

/// Label of the synthetic transition that kills tokens or arcs.
inline constexpr std::size_t kErr = static_cast<std::size_t>(-1);

using Trace = std::vector<std::size_t>;

inline std::string label_str(const NetStructure& net, std::size_t label) {
  return label == kErr ? std::string("Err") : net.transitions.at(label);
}

inline std::string trace_str(const NetStructure& net, const Trace& tr) {
  std::string s;
  for (auto l : tr) {
    if (!s.empty()) s += ' ';
    s += label_str(net, l);
  }
  return s;
}

/// Which bound of an arc interval marks it dead when Err fires in an A-TPN.
enum class ErrBound { upper, lower };

/// Concrete P-TPN state: marking, dead tokens, residual residence intervals.
struct PState {
  PlaceSet m;
  PlaceSet dead;
  std::map<std::size_t, Interval> ip;

  friend bool operator==(const PState&, const PState&) = default;
};

/// Concrete A-TPN state: marking, dead arcs, residual arc intervals.
struct AState {
  PlaceSet m;
  ArcSet dead;
  std::map<Arc, Interval> ia;

  friend bool operator==(const AState&, const AState&) = default;
};

namespace detail {

inline std::optional<Interval> shift_interval(const Interval& iv, const Rational& d) {
  if (iv.hi && d > *iv.hi) return std::nullopt;
  const Rational lo = iv.lo > d ? iv.lo - d : Rational(0);
  return Interval(lo, iv.hi ? std::optional<Rational>(*iv.hi - d) : std::nullopt);
}

template <class Map>
std::optional<Map> elapse_map(const Map& in, const Rational& d) {
  if (d < 0) throw std::invalid_argument("negative delay");
  Map out;
  for (const auto& [k, iv] : in) {
    auto s = shift_interval(iv, d);
    if (!s) return std::nullopt;
    out.emplace(k, *s);
  }
  return out;
}

}  // namespace detail

inline PState initial_state(const PNet& net) {
  PState s{net.m0, {}, {}};
  for (auto p : net.m0) s.ip.emplace(p, net.isp[p]);
  return s;
}

inline AState initial_state(const ANet& net) {
  AState s{net.m0, {}, {}};
  for (const auto& a : enabled_arcs(net, net.m0)) s.ia.emplace(a, net.arc_interval(a.first, a.second));
  return s;
}

/// Lets d time units pass; nullopt when d overshoots a live upper bound.
inline std::optional<PState> elapse(const PState& s, const Rational& d) {
  auto ip = detail::elapse_map(s.ip, d);
  if (!ip) return std::nullopt;
  return PState{s.m, s.dead, std::move(*ip)};
}

inline std::optional<AState> elapse(const AState& s, const Rational& d) {
  auto ia = detail::elapse_map(s.ia, d);
  if (!ia) return std::nullopt;
  return AState{s.m, s.dead, std::move(*ia)};
}

inline bool is_firable(const PNet& net, const PState& s, std::size_t t) {
  for (auto p : net.pre[t]) {
    auto it = s.ip.find(p);
    if (it == s.ip.end() || it->second.lo != 0) return false;
  }
  return true;
}

inline bool is_firable(const ANet& net, const AState& s, std::size_t t) {
  for (auto p : net.pre[t]) {
    auto it = s.ia.find({p, t});
    if (it == s.ia.end() || it->second.lo != 0) return false;
  }
  return true;
}

inline std::optional<PState> fire(const PNet& net, const PState& s, std::size_t t) {
  if (!is_firable(net, s, t)) return std::nullopt;
  PState out = s;
  for (auto p : net.pre[t]) {
    out.m.erase(p);
    out.ip.erase(p);
  }
  for (auto p : net.post[t]) {
    if (out.m.count(p))
      throw SafetyViolation("firing " + net.transitions[t] + " puts a second token in place " + net.places[p]);
    out.m.insert(p);
    out.ip.emplace(p, net.isp[p]);
  }
  return out;
}

inline std::optional<AState> fire(const ANet& net, const AState& s, std::size_t t) {
  if (!is_firable(net, s, t)) return std::nullopt;
  AState out = s;
  for (auto p : net.pre[t]) out.m.erase(p);
  for (auto p : net.post[t]) {
    if (out.m.count(p))
      throw SafetyViolation("firing " + net.transitions[t] + " puts a second token in place " + net.places[p]);
    out.m.insert(p);
  }
  auto consumed = [&](const Arc& a) { return net.consumes(t, a.first); };
  std::erase_if(out.ia, [&](const auto& kv) { return consumed(kv.first); });
  std::erase_if(out.dead, consumed);
  for (auto p : net.post[t])
    for (auto l : net.outputs(p)) out.ia.emplace(Arc{p, l}, net.arc_interval(p, l));
  return out;
}

template <class Net, class State>
bool any_firable(const Net& net, const State& s) {
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (is_firable(net, s, t)) return true;
  return false;
}

/// Err: no transition firable and some live token has reached its upper
/// bound; exactly those tokens die.
inline std::optional<PState> fire_err(const PNet& net, const PState& s) {
  if (any_firable(net, s)) return std::nullopt;
  PState out = s;
  for (const auto& [p, iv] : s.ip)
    if (iv.hi && *iv.hi == 0) {
      out.dead.insert(p);
      out.ip.erase(p);
    }
  if (out.dead == s.dead) return std::nullopt;
  return out;
}

inline std::optional<AState> fire_err(const ANet& net, const AState& s, ErrBound reading = ErrBound::upper) {
  if (any_firable(net, s)) return std::nullopt;
  const bool due = std::any_of(s.ia.begin(), s.ia.end(),
                               [](const auto& kv) { return kv.second.hi && *kv.second.hi == 0; });
  if (!due) return std::nullopt;
  AState out = s;
  for (const auto& [a, iv] : s.ia) {
    const bool dies = reading == ErrBound::upper ? (iv.hi && *iv.hi == 0) : iv.lo == 0;
    if (dies) {
      out.dead.insert(a);
      out.ia.erase(a);
    }
  }
  return out;
}

struct TimedStep {
  Rational delay;
  std::size_t label;
  friend bool operator==(const TimedStep&, const TimedStep&) = default;
};
using TimedRun = std::vector<TimedStep>;

inline Trace untimed(const TimedRun& run) {
  Trace t;
  for (const auto& s : run) t.push_back(s.label);
  return t;
}

/// "d1 label1 d2 label2 ..." with rationals in lowest terms.
inline std::string run_str(const NetStructure& net, const TimedRun& run) {
  std::string s;
  for (const auto& step : run) {
    if (!s.empty()) s += ' ';
    s += step.delay.str() + ' ' + label_str(net, step.label);
  }
  return s;
}

struct RunConfig {
  std::size_t horizon = 4;
  Rational grid{1, 2};
  std::size_t budget = 1'000'000;  // explored states
  ErrBound err_bound = ErrBound::upper;
};

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Admissible delays: grid multiples up to the earliest live deadline plus
/// every interval endpoint inside the window. With no finite deadline the
/// window stops at the largest lower bound, after which nothing changes.
template <class Map>
std::vector<Rational> candidate_delays(const Map& intervals, const Rational& grid) {
  std::optional<Rational> deadline;
  Rational max_lo = 0;
  for (const auto& [k, iv] : intervals) {
    if (iv.hi && (!deadline || *iv.hi < *deadline)) deadline = *iv.hi;
    max_lo = std::max(max_lo, iv.lo);
  }
  const Rational limit = deadline ? *deadline : max_lo;
  std::set<Rational> out;
  for (Rational d = 0; d <= limit; d += grid) out.insert(d);
  out.insert(limit);
  for (const auto& [k, iv] : intervals) {
    if (iv.lo <= limit) out.insert(iv.lo);
    if (iv.hi && *iv.hi <= limit) out.insert(*iv.hi);
  }
  return {out.begin(), out.end()};
}

inline const auto& intervals_of(const PState& s) { return s.ip; }
inline const auto& intervals_of(const AState& s) { return s.ia; }

inline std::string state_key(const PState& s) {
  std::string k;
  for (auto p : s.m) k += std::to_string(p) + ',';
  k += '|';
  for (auto p : s.dead) k += std::to_string(p) + ',';
  k += '|';
  for (const auto& [p, iv] : s.ip) k += std::to_string(p) + iv.str();
  return k;
}

inline std::string state_key(const AState& s) {
  std::string k;
  for (auto p : s.m) k += std::to_string(p) + ',';
  k += '|';
  for (const auto& [p, t] : s.dead) k += std::to_string(p) + '.' + std::to_string(t) + ',';
  k += '|';
  for (const auto& [a, iv] : s.ia) k += std::to_string(a.first) + '.' + std::to_string(a.second) + iv.str();
  return k;
}

inline std::optional<PState> err_step(const PNet& net, const PState& s, ErrBound) { return fire_err(net, s); }
inline std::optional<AState> err_step(const ANet& net, const AState& s, ErrBound r) { return fire_err(net, s, r); }

/// Every (delay, label, successor) reachable in one step on the delay grid.
template <class Net, class State>
std::vector<std::tuple<Rational, std::size_t, State>> steps(const Net& net, const State& s, const RunConfig& cfg) {
  std::vector<std::tuple<Rational, std::size_t, State>> out;
  for (const auto& d : candidate_delays(intervals_of(s), cfg.grid)) {
    auto s1 = elapse(s, d);
    if (!s1) continue;
    for (std::size_t t = 0; t < net.transition_count(); ++t)
      if (auto s2 = fire(net, *s1, t)) out.emplace_back(d, t, std::move(*s2));
    if (auto s2 = err_step(net, *s1, cfg.err_bound)) out.emplace_back(d, kErr, std::move(*s2));
  }
  return out;
}

}  // namespace detail

/// All runs of length <= horizon (every prefix included, the empty run too)
/// whose delays lie on the grid or on interval endpoints.
template <class Net>
std::vector<TimedRun> enumerate_runs(const Net& net, const RunConfig& cfg = {}) {
  if (cfg.grid <= 0) throw std::invalid_argument("grid must be positive");
  std::vector<TimedRun> out;
  std::size_t visited = 0;
  TimedRun cur;
  auto rec = [&](auto& self, const auto& s, std::size_t depth) -> void {
    if (++visited > cfg.budget) throw BudgetExhausted("run enumeration budget exhausted");
    out.push_back(cur);
    if (depth == cfg.horizon) return;
    for (auto& [d, label, s2] : detail::steps(net, s, cfg)) {
      cur.push_back({d, label});
      self(self, s2, depth + 1);
      cur.pop_back();
    }
  };
  rec(rec, initial_state(net), 0);
  return out;
}

/// Untimed traces of all runs of length <= horizon, memoized per state.
template <class Net>
std::set<Trace> untimed_traces(const Net& net, const RunConfig& cfg = {}) {
  if (cfg.grid <= 0) throw std::invalid_argument("grid must be positive");
  using State = decltype(initial_state(net));
  std::unordered_map<std::string, std::set<Trace>> memo;
  std::size_t visited = 0;
  auto rec = [&](auto& self, const State& s, std::size_t remaining) -> const std::set<Trace>& {
    const std::string key = std::to_string(remaining) + '#' + detail::state_key(s);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (++visited > cfg.budget) throw BudgetExhausted("run enumeration budget exhausted");
    std::set<Trace> traces{Trace{}};
    if (remaining > 0) {
      for (auto& [d, label, s2] : detail::steps(net, s, cfg))
        for (const auto& tail : self(self, s2, remaining - 1)) {
          Trace tr{label};
          tr.insert(tr.end(), tail.begin(), tail.end());
          traces.insert(std::move(tr));
        }
    }
    return memo.emplace(key, std::move(traces)).first->second;
  };
  return rec(rec, initial_state(net), cfg.horizon);
}

}  // namespace tpn
