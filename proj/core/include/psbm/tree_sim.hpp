#pragma once

#include <optional>
#include <vector>

#include "psbm/model.hpp"
#include "psbm/rng.hpp"

namespace psbm {

// Samples the root AMP message of a regular broadcasting tree without
// materializing the tree. The linearized recursion makes the root message a
// weighted sum over layers of the revealed-children votes, and conditioned on
// the per-layer label counts every per-node binomial collapses into a few
// aggregate binomial draws (sums of independent equal-p binomials are
// binomial), so the sampled message has exactly the distribution of running
// amp_binary on a generated tree. Cost is O(depth) draws per sample, which is
// what makes depth-6 Monte Carlo feasible (those trees have ~10^7 nodes).

struct RootSample {
  int root_label = 0;
  double message = 0.0;
  int decision = 0;
  bool tie_coin_used = false;
};

RootSample sample_amp_root_binary(const TreeParams& tp, int depth, Seed seed,
                                  std::optional<int> forced_root = std::nullopt);

// k-label variant: tracks per-label counts of unrevealed nodes layer by layer
// (multinomial transitions), so the joint law of all k-1 reference messages
// is preserved. Decision rule matches amp_k.
struct RootSampleK {
  int root_label = 0;
  std::vector<double> messages;  // M^(i->j), slot ref_label is 0
  int decision = 0;
};

RootSampleK sample_amp_root_k(const TreeParams& tp, int depth, int ref_label, Seed seed,
                              std::optional<int> forced_root = std::nullopt);

}  // namespace psbm
