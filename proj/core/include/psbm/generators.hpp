#pragma once

#include <optional>
#include <vector>

#include "psbm/model.hpp"
#include "psbm/rng.hpp"
#include "psbm/tree.hpp"

namespace psbm {

// Optional bijection on {0..k-1} applied to every fresh label draw (root
// draws, broadcast re-draws, block assignment). Generation with a permutation
// equals relabeling the unpermuted output, which is what the equivariance
// tests pin down. Identity when empty.
using LabelPermutation = std::vector<int>;

// Balanced planted partition: exactly n/k nodes per block (shuffled), each
// same-block pair joined with probability p and cross-block pair with q,
// each node revealed independently with probability delta.
// Requires n divisible by k.
LabeledGraph gen_psbm(const ModelParams& params, Seed seed,
                      const LabelPermutation& perm = {});

// Regular broadcasting tree: every node above the bottom layer has
// round(delta*d) revealed children and round((1-delta)*d) unrevealed ones.
// Revealed nodes are leaves (they carry information, not messages). The root
// label is drawn uniformly unless forced_root is given; the root is never
// revealed.
BroadcastTree gen_regular_tree(const TreeParams& tp, int depth, Seed seed,
                               std::optional<int> forced_root = std::nullopt,
                               const LabelPermutation& perm = {});

// Galton-Watson broadcasting tree: offspring counts i.i.d. Poisson(d), each
// child revealed independently with probability delta (revealed nodes are
// leaves). Extinction before the requested depth is a valid outcome.
BroadcastTree gen_galton_watson_tree(const TreeParams& tp, int depth, Seed seed,
                                     std::optional<int> forced_root = std::nullopt,
                                     const LabelPermutation& perm = {});

// Re-draw the reveal mask of an existing graph (used for replicate sweeps on
// a fixed input graph).
void redraw_reveals(LabeledGraph& graph, double delta, Seed seed);

// Apply a label permutation to truth labels in place (test helper for the
// equivariance properties).
void permute_labels(std::vector<int>& labels, const LabelPermutation& perm);

}  // namespace psbm
