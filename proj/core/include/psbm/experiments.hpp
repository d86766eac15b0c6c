#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "psbm/model.hpp"
#include "psbm/rng.hpp"

namespace psbm {

// Monte-Carlo harnesses behind the command-line tool: the phase-boundary
// sweep, edge-list ingestion, and the blog-network study.

struct DatasetMissingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  int n = 5000;
  int k = 2;
  double delta = 0.05;
  double edge_density_sum = 0.006;  // p + q, held fixed across the grid
  std::vector<double> snr_grid;
  int depth = 3;  // neighborhood depth (graph mode) / tree depth (tree mode)
  int replicates = 3;
  int tree_samples = 10000;  // root samples per point in tree mode
  bool tree_mode = false;    // sample broadcast trees instead of graphs
  bool theory_only = false;  // emit bounds without any simulation
  int threads = 0;
  Seed seed{0};
};

struct SweepRow {
  double snr = 0.0;
  double p = 0.0, q = 0.0;
  double theta = 0.0, d = 0.0, alpha = 0.0;
  int replicates_done = 0;
  std::int64_t decisions = 0;  // labels estimated behind the statistics
  double error_mean = 0.0;
  double error_median = 0.0;
  double error_q25 = 0.0;
  double error_q75 = 0.0;
  double theory_upper = 0.0;     // operational misclassification bound
  double theory_lower = 0.0;     // minimax lower bound (k=2: TV; k>2: chi^2)
  bool lower_assumptions_ok = false;
  bool vacuous = false;   // no unrevealed nodes (delta = 1)
  std::string failure;    // non-empty when this point errored out
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by snr
  std::uint64_t config_hash = 0;
  Seed seed{0};
};

SweepResult run_sweep(const SweepConfig& cfg);
std::string sweep_csv(const SweepResult& result);

// Edge list + labels sidecar -> LabeledGraph. Node ids and label values may
// be arbitrary non-negative integers; both are densified (sorted order
// preserved). Self-loops and duplicate edges are dropped. With
// largest_component, the graph is restricted to its biggest connected
// component (ties to the one holding the smallest node). Throws
// DatasetMissingError when either file does not exist, std::runtime_error
// (with line numbers) on malformed content or an empty edge set.
LabeledGraph ingest_edgelist(const std::string& edge_path,
                             const std::string& labels_path,
                             bool largest_component = true);

struct BlogStudyConfig {
  std::string edge_path = "data/polblogs/edges.txt";
  std::string labels_path = "data/polblogs/labels.txt";
  std::vector<double> deltas = {0.1, 0.05, 0.025};
  int min_depth = 1;
  int max_depth = 5;
  int replicates = 50;
  bool largest_component = true;
  bool run_spectral = true;
  int threads = 0;
  Seed seed{0};
};

struct BlogStudyCell {
  std::string algorithm;  // "amp" or "spectral"
  double delta = 0.0;
  int depth = 0;  // 0 for spectral (depth-free)
  int replicates_done = 0;
  double median = 0.0, mean = 0.0;
  double min = 0.0, q25 = 0.0, q75 = 0.0, max = 0.0;
};

struct BlogStudyReport {
  int n = 0;
  std::int64_t edges = 0;
  std::vector<BlogStudyCell> cells;
  std::uint64_t config_hash = 0;
  Seed seed{0};
};

// For each delta: draws `replicates` reveal sets; per reveal set estimates
// (p, q) from revealed pairs, maps them to channel parameters, runs
// recover_all at every depth, and (optionally) the spectral baseline.
// Medians/quantiles are taken across reveal sets.
BlogStudyReport run_blog_study(const BlogStudyConfig& cfg);
std::string blog_study_csv(const BlogStudyReport& report);

// FNV-1a over a canonical rendering of the config; echoed into every
// emitted row so output files are traceable to their run.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace psbm
