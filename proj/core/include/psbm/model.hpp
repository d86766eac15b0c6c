#pragma once

#include <cstdint>
#include <vector>

namespace psbm {

// Planted-partition graph model with a revealed fraction of labels.
// Assortative regime: 0 <= q < p <= 1.
struct ModelParams {
  int n = 0;         // node count
  int k = 2;         // community count, >= 2
  double p = 0.0;    // intra-block edge probability
  double q = 0.0;    // inter-block edge probability
  double delta = 0;  // fraction of labels revealed

  void validate() const;  // throws std::invalid_argument on violation
};

// Broadcasting-tree parameters. A child copies its parent's label with
// probability theta + (1-theta)/k, otherwise picks one of the other k-1
// labels uniformly.
struct TreeParams {
  double theta = 0.0;  // bias, in (0,1) for the analysis; 0 and 1 handled as limits
  double d = 0.0;      // branching number, > 0
  double delta = 0.0;  // reveal fraction
  int k = 2;           // label alphabet size, >= 2

  void validate() const;
};

// Undirected simple graph with ground-truth labels and a reveal mask.
// Labels are 0-based: 0..k-1.
struct LabeledGraph {
  int n = 0;
  int k = 2;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists, no self-loops
  std::vector<int> truth;             // size n
  std::vector<std::uint8_t> revealed; // size n

  std::size_t edge_count() const;
  void check() const;  // structural invariants; throws on violation
};

struct SnrReport {
  double snr = 0.0;
  double alpha = 0.0;      // (1-delta) * theta^2 * d under the tree mapping
  int coupling_depth = 0;
};

// (1-delta) * n(p-q)^2 / (k^2 (q + (p-q)/k)).
double snr(const ModelParams& params);

// d = n(q + (p-q)/k), theta = (p-q) / (k (q + (p-q)/k)); delta and k carried over.
TreeParams tree_params_from_sbm(const ModelParams& params);

// Largest depth at which the graph neighborhood still looks like a tree:
// floor(c * log n / log(k n (q + (p-q)/k))). The scale constant c is not
// pinned by the analysis; 1/2 keeps default depths conservative.
int coupling_depth(const ModelParams& params, double c = 0.5);

SnrReport snr_report(const ModelParams& params, double c = 0.5);

}  // namespace psbm
