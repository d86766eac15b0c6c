#pragma once

#include <cstdint>
#include <vector>

#include "psbm/model.hpp"
#include "psbm/rng.hpp"
#include "psbm/tree.hpp"

namespace psbm {

// Binary trees use the spin convention: label 0 plays "+", label 1 plays "-".
// A root message M is the (exact or linearized) log ratio
// log P(root = 0 | revealed) / P(root = 1 | revealed).

// 2 atanh(theta tanh(x/2)), evaluated as sign(x) * log1p(2 theta (1 - e^-|x|)
// / ((1-theta) + (1+theta) e^-|x|)), which is exactly odd, saturates cleanly
// at log((1+theta)/(1-theta)) for large |x|, and loses no precision near 0.
// theta outside [0,1] throws.
double f_theta(double theta, double x);

// log(1 + k*theta/(1-theta)): the per-vote weight of one revealed child.
// For k=2 this is log((1+theta)/(1-theta)).
double vote_weight(double theta, int k);

// (N_+ - N_-) * vote_weight over the revealed children of v; 0 if none.
double init_message_binary(const BroadcastTree& tree, int v, const TreeParams& tp);

// Per-node messages after a full bottom-up pass (node 0 holds the root's).
struct MessageState {
  std::vector<double> m;
  int layers = 0;
};

// Exact posterior log-ratio at the root (k=2 only). Each node contributes its
// revealed-children votes plus f_theta of each unrevealed child's message.
double bp_binary(const BroadcastTree& tree, const TreeParams& tp);
MessageState bp_binary_messages(const BroadcastTree& tree, const TreeParams& tp);

struct AmpResult {
  double message = 0.0;
  int decision = 0;            // 0 or 1
  bool tie_coin_used = false;  // message was exactly 0
};

// Linearized recursion: f_theta replaced by multiplication with theta.
// Decision is the sign of the root message; an exact zero falls back to a
// fair coin drawn from tie_seed.
AmpResult amp_binary(const BroadcastTree& tree, const TreeParams& tp, Seed tie_seed);
MessageState amp_binary_messages(const BroadcastTree& tree, const TreeParams& tp);

struct PosteriorState {
  std::vector<double> probs;  // over labels 0..k-1, sums to 1
};

// Exact root posterior for any k >= 2, computed in log domain bottom-up:
// w_i(v) = N_i(v) * vote_weight + sum_u log1p(k theta/(1-theta) * X_u[i]),
// X_v = softmax(w). Requires theta < 1.
PosteriorState bp_k(const BroadcastTree& tree, const TreeParams& tp);

struct AmpKResult {
  std::vector<double> messages;  // M^(i->j) indexed by i; slot j is 0
  int ref_label = 0;
  int decision = 0;
};

// Linearized k-label recursion against a fixed reference label j:
// M_i(v) = (N_i(v) - N_j(v)) * w + theta * sum over unrevealed children,
// where w defaults to vote_weight(theta, k). Decision: argmax_i M_i if the
// max is positive (ties to the smallest index), otherwise j. The init weight
// can be overridden (init_weight_override > 0) for sensitivity checks.
AmpKResult amp_k(const BroadcastTree& tree, const TreeParams& tp, int ref_label,
                 double init_weight_override = 0.0);

// Attenuated revealed-label counts for boundary-layer initialization in the
// sparse regime (expected revealed children per node below 1). t0 is the
// smallest positive integer with delta * ((1-delta) d)^t0 > 1. For every
// unrevealed node at boundary_depth, each revealed node at relative depth
// r <= t0 inside its subtree contributes theta^r to the count of its label.
struct SparseInit {
  int t0 = 0;
  int boundary_depth = 0;
  std::vector<std::vector<double>> weighted_counts;  // [node][label]
  std::vector<std::uint8_t> no_labels;  // boundary node saw no revealed label
};

// Smallest positive integer t with delta * ((1-delta) d)^t > 1, capped at
// max_t (returns max_t when no t qualifies, e.g. (1-delta) d <= 1).
int sparse_subtree_depth(const TreeParams& tp, int max_t = 64);

// Boundary depth defaults to (max tree depth - t0), floored at 0. Throws
// outside the sparse regime (delta * round((1-delta) d) >= 1), where the
// standard depth-1 initialization is the right tool.
SparseInit sparse_init(const BroadcastTree& tree, const TreeParams& tp,
                       int boundary_depth = -1);

}  // namespace psbm
