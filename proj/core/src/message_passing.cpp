#include "psbm/message_passing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psbm {

double f_theta(double theta, double x) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("f_theta: theta must be in [0,1]");
  if (theta == 1.0) return x;
  if (theta == 0.0 || x == 0.0) return 0.0;
  const double a = std::fabs(x);
  const double u = std::exp(-a);
  const double one_minus_u = -std::expm1(-a);
  const double g = std::log1p(2.0 * theta * one_minus_u /
                              ((1.0 - theta) + (1.0 + theta) * u));
  return std::signbit(x) ? -g : g;
}

double vote_weight(double theta, int k) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw std::invalid_argument("vote_weight: theta must be in [0,1)");
  if (k < 2) throw std::invalid_argument("vote_weight: k must be >= 2");
  return std::log1p(k * theta / (1.0 - theta));
}

namespace {

int spin(int label) { return label == 0 ? 1 : -1; }

void require_binary(const BroadcastTree& tree, const TreeParams& tp) {
  if (tp.k != 2 || tree.k != 2)
    throw std::invalid_argument("binary message passing requires k = 2");
  if (tp.theta >= 1.0)
    throw std::invalid_argument("message passing requires theta < 1");
}

// Shared bottom-up pass. Children precede nothing: BFS order guarantees every
// child id is larger than its parent's, so one reverse sweep suffices.
template <typename Propagate>
MessageState binary_pass(const BroadcastTree& tree, const TreeParams& tp,
                         Propagate&& propagate) {
  const int n = tree.size();
  const double w = vote_weight(tp.theta, 2);
  MessageState state;
  state.m.assign(n, 0.0);
  int max_depth = 0;
  for (int v = n - 1; v >= 0; --v) {
    max_depth = std::max(max_depth, tree.depth[v]);
    if (tree.revealed[v]) continue;
    double m = 0.0;
    for (int u = tree.child_begin[v]; u < tree.child_begin[v] + tree.child_count[v]; ++u) {
      if (tree.revealed[u])
        m += spin(tree.label[u]) * w;
      else
        m += propagate(state.m[u]);
    }
    state.m[v] = m;
  }
  state.layers = max_depth;
  return state;
}

}  // namespace

double init_message_binary(const BroadcastTree& tree, int v, const TreeParams& tp) {
  require_binary(tree, tp);
  const double w = vote_weight(tp.theta, 2);
  double m = 0.0;
  for (int u = tree.child_begin[v]; u < tree.child_begin[v] + tree.child_count[v]; ++u)
    if (tree.revealed[u]) m += spin(tree.label[u]) * w;
  return m;
}

MessageState bp_binary_messages(const BroadcastTree& tree, const TreeParams& tp) {
  require_binary(tree, tp);
  return binary_pass(tree, tp, [&tp](double m) { return f_theta(tp.theta, m); });
}

double bp_binary(const BroadcastTree& tree, const TreeParams& tp) {
  return bp_binary_messages(tree, tp).m[tree.root()];
}

MessageState amp_binary_messages(const BroadcastTree& tree, const TreeParams& tp) {
  require_binary(tree, tp);
  return binary_pass(tree, tp, [&tp](double m) { return tp.theta * m; });
}

AmpResult amp_binary(const BroadcastTree& tree, const TreeParams& tp, Seed tie_seed) {
  AmpResult r;
  r.message = amp_binary_messages(tree, tp).m[tree.root()];
  if (r.message > 0.0) {
    r.decision = 0;
  } else if (r.message < 0.0) {
    r.decision = 1;
  } else {
    auto eng = make_engine(derive(tie_seed, stream::decisions));
    r.decision = std::bernoulli_distribution(0.5)(eng) ? 0 : 1;
    r.tie_coin_used = true;
  }
  return r;
}

PosteriorState bp_k(const BroadcastTree& tree, const TreeParams& tp) {
  tp.validate();
  if (tp.k != tree.k) throw std::invalid_argument("bp_k: tree and params disagree on k");
  if (tp.theta >= 1.0) throw std::invalid_argument("bp_k: requires theta < 1");
  const int n = tree.size();
  const int k = tp.k;
  const double w = vote_weight(tp.theta, k);
  const double ratio = k * tp.theta / (1.0 - tp.theta);

  // Per-node posterior X_v over labels; scores kept in log domain until the
  // per-node normalization.
  std::vector<std::vector<double>> post(n);
  std::vector<double> score(k);
  for (int v = n - 1; v >= 0; --v) {
    if (tree.revealed[v]) continue;
    std::fill(score.begin(), score.end(), 0.0);
    for (int u = tree.child_begin[v]; u < tree.child_begin[v] + tree.child_count[v]; ++u) {
      if (tree.revealed[u]) {
        score[tree.label[u]] += w;
      } else {
        for (int i = 0; i < k; ++i) score[i] += std::log1p(ratio * post[u][i]);
      }
    }
    const double top = *std::max_element(score.begin(), score.end());
    double z = 0.0;
    std::vector<double> x(k);
    for (int i = 0; i < k; ++i) {
      x[i] = std::exp(score[i] - top);
      z += x[i];
    }
    for (int i = 0; i < k; ++i) x[i] /= z;
    post[v] = std::move(x);
  }
  return PosteriorState{std::move(post[tree.root()])};
}

AmpKResult amp_k(const BroadcastTree& tree, const TreeParams& tp, int ref_label,
                 double init_weight_override) {
  tp.validate();
  if (tp.k != tree.k) throw std::invalid_argument("amp_k: tree and params disagree on k");
  if (tp.theta >= 1.0) throw std::invalid_argument("amp_k: requires theta < 1");
  const int k = tp.k;
  if (ref_label < 0 || ref_label >= k)
    throw std::invalid_argument("amp_k: reference label out of range");
  const int n = tree.size();
  const double w =
      init_weight_override > 0.0 ? init_weight_override : vote_weight(tp.theta, k);

  std::vector<std::vector<double>> msg(n);
  for (int v = n - 1; v >= 0; --v) {
    if (tree.revealed[v]) continue;
    std::vector<double> m(k, 0.0);
    for (int u = tree.child_begin[v]; u < tree.child_begin[v] + tree.child_count[v]; ++u) {
      if (tree.revealed[u]) {
        // M_i picks up (1{label = i} - 1{label = ref}) * w.
        const int l = tree.label[u];
        if (l != ref_label) {
          m[l] += w;
        } else {
          for (int i = 0; i < k; ++i)
            if (i != ref_label) m[i] -= w;
        }
      } else {
        for (int i = 0; i < k; ++i) m[i] += tp.theta * msg[u][i];
      }
    }
    m[ref_label] = 0.0;
    msg[v] = std::move(m);
  }

  AmpKResult r;
  r.messages = std::move(msg[tree.root()]);
  r.ref_label = ref_label;
  int best = -1;
  double best_val = 0.0;
  for (int i = 0; i < k; ++i) {
    if (i == ref_label) continue;
    if (best == -1 || r.messages[i] > best_val) {
      best = i;
      best_val = r.messages[i];
    }
  }
  r.decision = best_val > 0.0 ? best : ref_label;
  return r;
}

int sparse_subtree_depth(const TreeParams& tp, int max_t) {
  tp.validate();
  const double grow = (1.0 - tp.delta) * tp.d;
  double mass = tp.delta;
  for (int t = 1; t <= max_t; ++t) {
    mass *= grow;
    if (mass > 1.0) return t;
  }
  return max_t;
}

SparseInit sparse_init(const BroadcastTree& tree, const TreeParams& tp, int boundary_depth) {
  tp.validate();
  if (tp.delta * std::llround((1.0 - tp.delta) * tp.d) >= 1.0)
    throw std::invalid_argument(
        "sparse_init: expected revealed children per node is >= 1, use the standard init");

  const int n = tree.size();
  SparseInit s;
  s.t0 = sparse_subtree_depth(tp);
  int max_depth = 0;
  for (int v = 0; v < n; ++v) max_depth = std::max(max_depth, tree.depth[v]);
  s.boundary_depth = boundary_depth >= 0 ? boundary_depth : std::max(max_depth - s.t0, 0);

  s.weighted_counts.assign(n, std::vector<double>(tree.k, 0.0));
  std::vector<std::uint8_t> is_boundary(n, 0);
  for (int v = 0; v < n; ++v)
    if (!tree.revealed[v] && tree.depth[v] == s.boundary_depth) is_boundary[v] = 1;

  for (int v = 0; v < n; ++v) {
    if (!tree.revealed[v]) continue;
    const int rel = tree.depth[v] - s.boundary_depth;
    if (rel < 1 || rel > s.t0) continue;
    // Walk up to the boundary ancestor. A revealed node on the way screens
    // the vote off: given that ancestor's label, v tells the root nothing.
    // (Cannot happen on generated trees, where revealed nodes are leaves,
    // but local trees extracted from graphs can have revealed interiors.)
    int anc = v;
    bool screened = false;
    for (int step = 0; step < rel; ++step) {
      anc = tree.parent[anc];
      if (step + 1 < rel && tree.revealed[anc]) {
        screened = true;
        break;
      }
    }
    if (screened || anc < 0 || !is_boundary[anc]) continue;
    s.weighted_counts[anc][tree.label[v]] += std::pow(tp.theta, rel);
  }

  s.no_labels.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!is_boundary[v]) continue;
    double total = 0.0;
    for (double c : s.weighted_counts[v]) total += c;
    if (total == 0.0) s.no_labels[v] = 1;
  }
  return s;
}

}  // namespace psbm
