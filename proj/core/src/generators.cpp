#include "psbm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>

namespace psbm {

namespace {

void check_perm(const LabelPermutation& perm, int k) {
  if (perm.empty()) return;
  if (static_cast<int>(perm.size()) != k)
    throw std::invalid_argument("label permutation size must equal k");
  std::vector<char> seen(k, 0);
  for (int v : perm) {
    if (v < 0 || v >= k || seen[v])
      throw std::invalid_argument("label permutation must be a bijection on 0..k-1");
    seen[v] = 1;
  }
}

int apply_perm(const LabelPermutation& perm, int label) {
  return perm.empty() ? label : perm[label];
}

// Visits every index in [0, total) that an independent Bernoulli(prob) trial
// accepts, in order, skipping the gaps geometrically. O(accepted) draws.
template <typename Fn>
void skip_sample(std::int64_t total, double prob, std::mt19937_64& eng, Fn&& accept) {
  if (total <= 0 || prob <= 0.0) return;
  if (prob >= 1.0) {
    for (std::int64_t i = 0; i < total; ++i) accept(i);
    return;
  }
  std::geometric_distribution<std::int64_t> gap(prob);
  std::int64_t pos = gap(eng);
  while (pos < total) {
    accept(pos);
    pos += 1 + gap(eng);
  }
}

// Decode pair index t in [0, m(m-1)/2) to (i, j), i < j, ordered by rows:
// row i holds the pairs (i, i+1..m-1).
std::pair<int, int> decode_pair(std::int64_t t, int m) {
  std::int64_t lo = 0, hi = m - 1;  // row candidates [lo, hi)
  auto row_start = [m](std::int64_t i) { return i * m - i * (i + 1) / 2; };
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (row_start(mid) <= t)
      lo = mid;
    else
      hi = mid;
  }
  const int i = static_cast<int>(lo);
  const int j = static_cast<int>(lo + 1 + (t - row_start(lo)));
  return {i, j};
}

// One broadcast step. Copy-with-probability-theta plus an unconditional
// uniform pick over all k labels adds up to the copy probability
// theta + (1-theta)/k; phrasing it this way keeps the stream consumption
// independent of label values, which the permutation equivariance relies on.
int broadcast_label(int parent_label, const TreeParams& tp,
                    const LabelPermutation& perm, std::mt19937_64& eng) {
  std::bernoulli_distribution copy(tp.theta);
  std::uniform_int_distribution<int> pick(0, tp.k - 1);
  if (copy(eng)) return parent_label;
  return apply_perm(perm, pick(eng));
}

}  // namespace

LabeledGraph gen_psbm(const ModelParams& params, Seed seed, const LabelPermutation& perm) {
  params.validate();
  check_perm(perm, params.k);
  if (params.n % params.k != 0)
    throw std::invalid_argument("gen_psbm: n must be divisible by k for the balanced partition");

  const int n = params.n;
  const int k = params.k;
  const int m = n / k;

  // Balanced block assignment, shuffled. Edge generation iterates blocks of
  // this base assignment so the edge stream is identical under any label
  // permutation (the permutation renames blocks, it does not move nodes).
  std::vector<int> block(n);
  for (int i = 0; i < n; ++i) block[i] = i / m;
  auto label_eng = make_engine(derive(seed, stream::labels));
  std::shuffle(block.begin(), block.end(), label_eng);

  std::vector<std::vector<int>> members(k);
  for (int c = 0; c < k; ++c) members[c].reserve(m);
  for (int i = 0; i < n; ++i) members[block[i]].push_back(i);

  LabeledGraph g;
  g.n = n;
  g.k = k;
  g.adj.assign(n, {});
  g.truth.resize(n);
  for (int i = 0; i < n; ++i) g.truth[i] = apply_perm(perm, block[i]);

  auto edge_eng = make_engine(derive(seed, stream::structure));
  auto add_edge = [&g](int u, int v) {
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  };
  for (int c = 0; c < k; ++c) {
    const auto& mem = members[c];
    const std::int64_t pairs = static_cast<std::int64_t>(m) * (m - 1) / 2;
    skip_sample(pairs, params.p, edge_eng, [&](std::int64_t t) {
      auto [i, j] = decode_pair(t, m);
      add_edge(mem[i], mem[j]);
    });
  }
  for (int c1 = 0; c1 < k; ++c1) {
    for (int c2 = c1 + 1; c2 < k; ++c2) {
      const auto& a = members[c1];
      const auto& b = members[c2];
      const std::int64_t pairs = static_cast<std::int64_t>(m) * m;
      skip_sample(pairs, params.q, edge_eng, [&](std::int64_t t) {
        add_edge(a[t / m], b[t % m]);
      });
    }
  }
  for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());

  g.revealed.resize(n);
  auto reveal_eng = make_engine(derive(seed, stream::reveals));
  std::bernoulli_distribution reveal(params.delta);
  for (int i = 0; i < n; ++i) g.revealed[i] = reveal(reveal_eng) ? 1 : 0;
  return g;
}

namespace {

constexpr std::int64_t kMaxTreeNodes = 100'000'000;

BroadcastTree make_root(const TreeParams& tp, std::optional<int> forced_root,
                        const LabelPermutation& perm, std::mt19937_64& label_eng) {
  BroadcastTree t;
  t.k = tp.k;
  int root_label;
  if (forced_root) {
    if (*forced_root < 0 || *forced_root >= tp.k)
      throw std::invalid_argument("forced root label out of range");
    root_label = *forced_root;
  } else {
    std::uniform_int_distribution<int> pick(0, tp.k - 1);
    root_label = apply_perm(perm, pick(label_eng));
  }
  t.parent = {-1};
  t.depth = {0};
  t.label = {root_label};
  t.revealed = {0};
  t.child_begin = {1};
  t.child_count = {0};
  return t;
}

}  // namespace

BroadcastTree gen_regular_tree(const TreeParams& tp, int depth, Seed seed,
                               std::optional<int> forced_root,
                               const LabelPermutation& perm) {
  tp.validate();
  check_perm(perm, tp.k);
  if (depth < 1) throw std::invalid_argument("gen_regular_tree: depth must be >= 1");

  const int n_labeled = static_cast<int>(std::llround(tp.delta * tp.d));
  const int n_unlabeled = static_cast<int>(std::llround((1.0 - tp.delta) * tp.d));
  if (n_labeled < 0 || n_unlabeled < 0)
    throw std::invalid_argument("gen_regular_tree: negative children counts");

  // Project the node count before allocating anything.
  std::int64_t level = 1, total = 1;
  for (int t = 0; t < depth; ++t) {
    total += level * (n_labeled + n_unlabeled);
    if (total > kMaxTreeNodes)
      throw std::invalid_argument("gen_regular_tree: tree would exceed the node budget");
    level *= n_unlabeled;
  }

  auto label_eng = make_engine(derive(seed, stream::labels));
  BroadcastTree t = make_root(tp, forced_root, perm, label_eng);
  t.parent.reserve(total);
  t.depth.reserve(total);
  t.label.reserve(total);
  t.revealed.reserve(total);
  t.child_begin.reserve(total);
  t.child_count.reserve(total);

  // BFS frontier of unrevealed nodes; every frontier node above the bottom
  // layer gets its revealed children first, then the unrevealed ones.
  for (int v = 0; v < t.size(); ++v) {
    if (t.revealed[v] || t.depth[v] >= depth) {
      t.child_begin[v] = t.size();
      continue;
    }
    t.child_begin[v] = t.size();
    t.child_count[v] = n_labeled + n_unlabeled;
    for (int c = 0; c < n_labeled + n_unlabeled; ++c) {
      const bool is_labeled = c < n_labeled;
      t.parent.push_back(v);
      t.depth.push_back(t.depth[v] + 1);
      t.label.push_back(broadcast_label(t.label[v], tp, perm, label_eng));
      t.revealed.push_back(is_labeled ? 1 : 0);
      t.child_begin.push_back(0);
      t.child_count.push_back(0);
    }
  }
  return t;
}

BroadcastTree gen_galton_watson_tree(const TreeParams& tp, int depth, Seed seed,
                                     std::optional<int> forced_root,
                                     const LabelPermutation& perm) {
  tp.validate();
  check_perm(perm, tp.k);
  if (depth < 1)
    throw std::invalid_argument("gen_galton_watson_tree: depth must be >= 1");

  auto label_eng = make_engine(derive(seed, stream::labels));
  auto struct_eng = make_engine(derive(seed, stream::structure));
  auto reveal_eng = make_engine(derive(seed, stream::reveals));
  std::poisson_distribution<int> offspring(tp.d);
  std::bernoulli_distribution reveal(tp.delta);

  BroadcastTree t = make_root(tp, forced_root, perm, label_eng);
  for (int v = 0; v < t.size(); ++v) {
    t.child_begin[v] = t.size();
    if (t.revealed[v] || t.depth[v] >= depth) continue;
    const int count = tp.d > 0.0 ? offspring(struct_eng) : 0;
    if (t.size() + static_cast<std::int64_t>(count) > kMaxTreeNodes)
      throw std::invalid_argument("gen_galton_watson_tree: tree would exceed the node budget");
    t.child_count[v] = count;
    for (int c = 0; c < count; ++c) {
      t.parent.push_back(v);
      t.depth.push_back(t.depth[v] + 1);
      t.label.push_back(broadcast_label(t.label[v], tp, perm, label_eng));
      t.revealed.push_back(reveal(reveal_eng) ? 1 : 0);
      t.child_begin.push_back(0);
      t.child_count.push_back(0);
    }
  }
  return t;
}

void redraw_reveals(LabeledGraph& graph, double delta, Seed seed) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("redraw_reveals: delta must be in [0,1]");
  auto eng = make_engine(derive(seed, stream::reveals));
  std::bernoulli_distribution reveal(delta);
  for (int i = 0; i < graph.n; ++i) graph.revealed[i] = reveal(eng) ? 1 : 0;
}

void permute_labels(std::vector<int>& labels, const LabelPermutation& perm) {
  if (perm.empty()) return;
  for (int& l : labels) {
    if (l < 0 || l >= static_cast<int>(perm.size()))
      throw std::invalid_argument("permute_labels: label out of range");
    l = perm[l];
  }
}

void BroadcastTree::check() const {
  const int n = size();
  if (n == 0) throw std::invalid_argument("BroadcastTree: empty");
  if (parent[0] != -1 || depth[0] != 0 || revealed[0])
    throw std::invalid_argument("BroadcastTree: malformed root");
  for (int v = 0; v < n; ++v) {
    if (label[v] < 0 || label[v] >= k)
      throw std::invalid_argument("BroadcastTree: label out of range");
    if (v > 0) {
      const int p = parent[v];
      if (p < 0 || p >= v) throw std::invalid_argument("BroadcastTree: bad parent order");
      if (depth[v] != depth[p] + 1)
        throw std::invalid_argument("BroadcastTree: child depth must be parent depth + 1");
    }
    for (int c = child_begin[v]; c < child_begin[v] + child_count[v]; ++c) {
      if (c < 0 || c >= n || parent[c] != v)
        throw std::invalid_argument("BroadcastTree: child range inconsistent");
    }
  }
}

}  // namespace psbm
