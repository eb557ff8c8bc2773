#pragma once

#include <string>

#include "json.hpp"
#include "tpn/explorer.hpp"

namespace tpn {

/// Graph statistics in the fixed key order used by the CLI.
inline nlohmann::ordered_json stats_json(const GraphStats& s) {
  nlohmann::ordered_json j;
  j["nodes"] = s.nodes;
  j["edges"] = s.edges;
  j["err_edges"] = s.err_edges;
  j["all_dead_terminals"] = s.all_dead_terminals;
  j["merges"] = {{"equal", s.merges_equal}, {"inclusion", s.merges_inclusion}, {"convex", s.merges_convex}};
  j["truncated"] = s.truncated;
  return j;
}

inline std::string stats_str(const GraphStats& s) { return stats_json(s).dump(); }

}  // namespace tpn
