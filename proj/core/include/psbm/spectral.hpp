#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psbm/model.hpp"
#include "psbm/rng.hpp"

namespace psbm {

// Vanilla adjacency-spectral bipartition of the unrevealed-induced subgraph,
// aligned to the blocks through revealed neighbors. k=2 only.

struct SpectralConfig {
  int max_iterations = 5000;
  double tolerance = 1e-6;  // eigen-residual ||A y - lambda y|| / ||y||
  Seed seed{0};             // start vectors
};

struct SpectralResult {
  // Indexed by graph node. eigenvector holds the second-eigenvector entry
  // (0 on revealed nodes); decision is -1 on revealed nodes.
  std::vector<double> eigenvector;
  std::vector<int> decision;
  int iterations = 0;   // total power-iteration steps (both vectors)
  double residual = 0.0;  // final residual of the second eigenvector
  bool converged = false;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// Power iteration for the leading eigenvector, deflation, power iteration
// again for the second; unrevealed nodes are split by the sign of the second
// eigenvector. The two sign-clusters are mapped to labels by the pairing
// that agrees with the most revealed-neighbor labels (ties keep cluster 0 on
// label 0), which makes the decisions invariant to a global sign flip.
SpectralResult spectral_partition(const LabeledGraph& graph, int k,
                                  const SpectralConfig& cfg = {});

// Same CSV schema as recovery_report_csv; confidence is |eigenvector entry|,
// no_information always 0.
std::string spectral_result_csv(const SpectralResult& result,
                                const LabeledGraph& graph);

// Fraction of unrevealed nodes whose decision differs from the truth
// (0 when there are none).
double spectral_error_rate(const SpectralResult& result,
                           const LabeledGraph& graph);

}  // namespace psbm
