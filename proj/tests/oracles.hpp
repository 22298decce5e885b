#pragma once

// Independent reference computations used by the tests. None of these call the
// library's traversal code paths they are checking.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "curvesplit/diagram.hpp"

namespace curvesplit::oracle {

/// Labels each arc with the loop it lies on after smoothing, by building the
/// 2-regular graph on arc ends (arc bodies plus smoothing connections) and
/// walking its components with an explicit DFS. Labels are 0..loops-1.
inline std::map<ArcId, int> loop_labels(const CurveDiagram& d, std::uint64_t mask) {
  // node = 2 * position + end
  std::map<ArcId, int> pos;
  std::vector<ArcId> ids;
  for (const auto& [id, a] : d.arcs()) {
    pos.emplace(id, static_cast<int>(ids.size()));
    ids.push_back(id);
  }
  const int n = static_cast<int>(ids.size()) * 2;
  std::vector<std::vector<int>> adj(n);
  for (const auto& [id, p] : pos) {
    adj[2 * p].push_back(2 * p + 1);
    adj[2 * p + 1].push_back(2 * p);
  }
  auto node = [&](const ArcEnd& e) { return 2 * pos.at(e.arc) + static_cast<int>(e.end); };
  int bit = 0;
  for (const auto& [cid, c] : d.crossings()) {
    const bool b = (mask >> bit) & 1u;
    ++bit;
    // A joins slots (0,1) and (2,3); B joins (0,3) and (1,2).
    const int pairs[2][2][2] = {{{0, 1}, {2, 3}}, {{0, 3}, {1, 2}}};
    for (const auto& pr : pairs[b ? 1 : 0]) {
      const int u = node(c.slots[pr[0]]);
      const int v = node(c.slots[pr[1]]);
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
  }
  std::vector<int> comp(n, -1);
  int comps = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = comps;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = comps;
          stack.push_back(v);
        }
      }
    }
    ++comps;
  }
  std::map<ArcId, int> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], comp[2 * i]);
  return out;
}

inline int loop_count(const CurveDiagram& d, std::uint64_t mask) {
  std::set<int> labels;
  for (const auto& [arc, label] : loop_labels(d, mask)) labels.insert(label);
  return static_cast<int>(labels.size());
}

/// Number of resolutions (out of all 2^j) whose smoothing has exactly `loops` loops.
inline int resolutions_with_loops(const CurveDiagram& d, int loops) {
  const std::uint64_t total = std::uint64_t{1} << d.crossing_count();
  int hits = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (loop_count(d, mask) == loops) ++hits;
  }
  return hits;
}

}  // namespace curvesplit::oracle
