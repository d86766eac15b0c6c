#include "psbm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psbm {

void ModelParams::validate() const {
  if (n <= 0) throw std::invalid_argument("ModelParams: n must be positive");
  if (k < 2) throw std::invalid_argument("ModelParams: k must be >= 2");
  // q == p is the zero-signal boundary (snr 0, theta 0); only q > p is out.
  if (!(q >= 0.0 && q <= p && p <= 1.0))
    throw std::invalid_argument("ModelParams: need 0 <= q <= p <= 1");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("ModelParams: delta must be in [0,1]");
}

void TreeParams::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("TreeParams: theta must be in [0,1]");
  if (!(d >= 0.0)) throw std::invalid_argument("TreeParams: d must be >= 0");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("TreeParams: delta must be in [0,1]");
  if (k < 2) throw std::invalid_argument("TreeParams: k must be >= 2");
}

std::size_t LabeledGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nbrs : adj) twice += nbrs.size();
  return twice / 2;
}

void LabeledGraph::check() const {
  if (static_cast<int>(adj.size()) != n || static_cast<int>(truth.size()) != n ||
      static_cast<int>(revealed.size()) != n)
    throw std::invalid_argument("LabeledGraph: field sizes disagree with n");
  for (int u = 0; u < n; ++u) {
    for (int v : adj[u]) {
      if (v < 0 || v >= n) throw std::invalid_argument("LabeledGraph: neighbor out of range");
      if (v == u) throw std::invalid_argument("LabeledGraph: self-loop");
    }
    if (truth[u] < 0 || truth[u] >= k)
      throw std::invalid_argument("LabeledGraph: label out of range");
  }
}

namespace {

// q + (p-q)/k: the average edge probability over a uniformly random
// same/other-block split; shows up in every derived quantity.
double mean_edge_prob(const ModelParams& params) {
  return params.q + (params.p - params.q) / params.k;
}

}  // namespace

double snr(const ModelParams& params) {
  params.validate();
  const double base = mean_edge_prob(params);
  if (base <= 0.0) throw std::invalid_argument("snr: p = q = 0 is degenerate");
  const double diff = params.p - params.q;
  return (1.0 - params.delta) * params.n * diff * diff /
         (static_cast<double>(params.k) * params.k * base);
}

TreeParams tree_params_from_sbm(const ModelParams& params) {
  params.validate();
  const double base = mean_edge_prob(params);
  if (base <= 0.0)
    throw std::invalid_argument("tree_params_from_sbm: p = q = 0 is degenerate");
  TreeParams tp;
  tp.d = params.n * base;
  tp.theta = (params.p - params.q) / (params.k * base);
  tp.delta = params.delta;
  tp.k = params.k;
  return tp;
}

int coupling_depth(const ModelParams& params, double c) {
  params.validate();
  if (params.n < 2) throw std::invalid_argument("coupling_depth: n must be >= 2");
  const double d = params.n * mean_edge_prob(params);
  if (d <= 1.0)
    throw std::invalid_argument("coupling_depth: branching number d <= 1, depth undefined");
  const double denom = std::log(static_cast<double>(params.k) * params.n * mean_edge_prob(params));
  return static_cast<int>(std::floor(c * std::log(static_cast<double>(params.n)) / denom));
}

SnrReport snr_report(const ModelParams& params, double c) {
  SnrReport r;
  r.snr = snr(params);
  const TreeParams tp = tree_params_from_sbm(params);
  r.alpha = (1.0 - tp.delta) * tp.theta * tp.theta * tp.d;
  r.coupling_depth = coupling_depth(params, c);
  return r;
}

}  // namespace psbm
