#pragma once

#include <cstdint>
#include <vector>

namespace psbm {

// Rooted broadcasting tree in BFS order: node 0 is the root and the children
// of node v are the contiguous id range [child_begin[v], child_begin[v] +
// child_count[v]). Storing child ranges instead of nested vectors keeps the
// per-node overhead flat; trees at experiment scale run to ~10^5 nodes.
struct BroadcastTree {
  int k = 2;
  std::vector<int> parent;            // -1 for the root
  std::vector<int> depth;
  std::vector<int> label;             // 0..k-1
  std::vector<std::uint8_t> revealed;
  std::vector<int> child_begin;
  std::vector<int> child_count;

  int size() const { return static_cast<int>(parent.size()); }
  int root() const { return 0; }

  void check() const;  // structural invariants; throws on violation
};

}  // namespace psbm
