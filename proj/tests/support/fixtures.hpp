#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "tpn/tpn.hpp"

namespace tpn::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string net_path(const std::string& file) { return std::string(NET_DIR) + "/" + file; }

inline PNet load_pnet(const std::string& file) { return std::get<PNet>(parse_net(read_file(net_path(file)))); }
inline ANet load_anet(const std::string& file) { return std::get<ANet>(parse_net(read_file(net_path(file)))); }

/// lo <= x - y <= hi; "0" as y gives simple bounds.
struct Range {
  std::string x;
  std::string y;
  Rational lo;
  Rational hi;
};

/// Canonical DBM over `vars` built from two-sided difference ranges.
inline Dbm hand_dbm(std::vector<std::string> vars, std::initializer_list<Range> ranges) {
  Dbm d(std::move(vars));
  for (const auto& r : ranges) {
    d = conjoin(d, Constraint::diff(r.x, r.y, r.hi));
    d = conjoin(d, Constraint::diff(r.y, r.x, -r.lo));
  }
  return canonicalize(d);
}

inline std::size_t tid(const NetStructure& net, const std::string& name) { return net.require_transition(name); }

inline TransitionSeq tids(const NetStructure& net, std::initializer_list<const char*> names) {
  TransitionSeq out;
  for (const char* n : names) out.push_back(net.require_transition(n));
  return out;
}

inline Trace trace_of(const NetStructure& net, std::initializer_list<const char*> names) {
  Trace out;
  for (const char* n : names) out.push_back(std::string(n) == "Err" ? kErr : net.require_transition(n));
  return out;
}

}  // namespace tpn::testing
