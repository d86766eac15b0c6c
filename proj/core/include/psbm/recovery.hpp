#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psbm/model.hpp"
#include "psbm/rng.hpp"
#include "psbm/tree.hpp"

namespace psbm {

// Per-node graph recovery: open the BFS neighborhood of a node as a tree,
// seed messages on a boundary layer, and run the linearized pass upward.

struct LocalTree {
  BroadcastTree tree;              // node 0 is the origin
  std::vector<int> graph_node;    // tree id -> graph id
  int origin = -1;
  std::int64_t cycle_edges_dropped = 0;  // distinct non-tree edges seen
  int depth_used = 0;
  int split_layer = 0;  // boundary layer; filled in by recover_node
};

struct RecoverConfig {
  TreeParams tp;    // channel parameters the algorithm assumes
  int t_bar = 1;    // neighborhood exploration depth
  // Stop exploring below revealed interior nodes. Off by default: exploration
  // passes through them, and the upward pass still consumes them as votes
  // only (a revealed node screens its own subtree either way).
  bool sever_at_revealed = false;
  int threads = 0;  // recover_all workers; 0 = hardware concurrency
  Seed seed{0};     // master seed; per-node streams derived from node ids
  double init_weight_override = 0.0;  // >0 replaces vote_weight everywhere
};

struct NodeRecovery {
  int decision = 0;
  double confidence = 0.0;  // root message magnitude (max over slots for k>2)
  bool no_information = false;  // no revealed vote reached the origin
  std::int64_t cycle_edges_dropped = 0;
  int depth_used = 0;
  int split_layer = 0;
};

struct RecoveryReport {
  // Indexed by graph node; decision is -1 on revealed nodes (not estimated).
  std::vector<int> decision;
  std::vector<double> confidence;
  std::vector<std::uint8_t> no_information;
  std::int64_t unrevealed_count = 0;
  std::int64_t wrong_count = 0;  // decision != truth, or no information
  std::int64_t no_information_count = 0;
  double misclassification_rate = 0.0;  // wrong / unrevealed; 0 when vacuous
  bool vacuous = false;                 // no unrevealed nodes at all
  double mean_cycle_edges_dropped = 0.0;
};

// Breadth-first neighborhood of v to depth t_bar, cycles broken at first
// discovery (each dropped non-tree edge counted once). v must be unrevealed;
// t_bar >= 1. An isolated v yields a root-only tree.
LocalTree extract_local_tree(const LabeledGraph& graph, int v, int t_bar,
                             bool sever_at_revealed = false);

// Extract the local tree, then decide v's label. The boundary layer sits
// t0 levels above the realized depth (t0 = sparse_subtree_depth of cfg.tp,
// clamped to [1, t_bar-1]); each unrevealed boundary node is initialized
// from its own revealed children when it has any, and otherwise from the
// revealed nodes within t0 levels below it, attenuated by theta^depth. The
// linearized pass then runs upward. A node that never sees a revealed vote
// is flagged no_information (its decision is a fair coin for k=2, the
// reference label otherwise) and counts as misclassified.
NodeRecovery recover_node(const LabeledGraph& graph, int v,
                          const RecoverConfig& cfg);

// recover_node over every unrevealed node, distributed across cfg.threads
// workers. Deterministic for a fixed (graph, cfg): per-node randomness is
// derived from the node id, so the schedule does not matter.
RecoveryReport recover_all(const LabeledGraph& graph, const RecoverConfig& cfg);

// Plug-in estimates from revealed nodes only: p and q from edge frequencies
// among same-block / cross-block revealed pairs, delta from the revealed
// count. Throws std::runtime_error when either pair population is empty.
ModelParams estimate_params(const LabeledGraph& graph);

// CSV rows (node, decision, truth, confidence, no_information) for the
// unrevealed nodes, with a header line.
std::string recovery_report_csv(const RecoveryReport& report,
                                const LabeledGraph& graph);

}  // namespace psbm
