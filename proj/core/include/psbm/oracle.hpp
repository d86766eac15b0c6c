#pragma once

#include <cstdint>
#include <vector>

#include "psbm/model.hpp"
#include "psbm/tree.hpp"

namespace psbm {

// Brute-force ground truth on small trees. Everything here is exact or
// refuses (std::length_error) when the input exceeds the enumeration budget.

struct EnumerationResult {
  std::vector<double> posterior;  // over root labels, sums to 1
  std::int64_t configurations_enumerated = 0;  // k^(unrevealed non-root nodes)
};

// Root posterior by summing the broadcast likelihood over every joint
// assignment of the unrevealed non-root labels (log domain, logsumexp).
// Budget: at most 14 unrevealed non-root nodes.
EnumerationResult exact_posterior_enumeration(const BroadcastTree& tree,
                                              const TreeParams& tp);

struct DistanceResult {
  double chi2 = 0.0;  // chi^2(mu_i || mu_j), first root label in the numerator
  double tv = 0.0;
  std::int64_t support_size = 0;  // distinct canonical revealed-label outcomes
};

// Exact chi^2 / TV between the revealed-label distributions of a regular
// tree (round(delta d) revealed plus round((1-delta) d) unrevealed children
// per node) conditioned on root label i versus j. Outcomes are keyed
// canonically: per-node label-count multisets, since the channel is
// exchangeable across children. Budget: at most 12 revealed nodes.
DistanceResult exact_distance_enumeration(const TreeParams& tp, int depth,
                                          int root_i, int root_j);

}  // namespace psbm
