#include "psbm/tree_sim.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "psbm/message_passing.hpp"

namespace psbm {

namespace {

using std::int64_t;

int64_t binom(std::mt19937_64& eng, int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  return std::binomial_distribution<int64_t>(trials, p)(eng);
}

// One multinomial draw by chained binomials.
std::vector<int64_t> multinom(std::mt19937_64& eng, int64_t trials,
                              const std::vector<double>& probs) {
  std::vector<int64_t> out(probs.size(), 0);
  int64_t rem = trials;
  double mass = 1.0;
  for (std::size_t i = 0; i + 1 < probs.size() && rem > 0; ++i) {
    const double p = mass > 0.0 ? probs[i] / mass : 0.0;
    out[i] = binom(eng, rem, p > 1.0 ? 1.0 : p);
    rem -= out[i];
    mass -= probs[i];
  }
  out.back() += rem;
  return out;
}

struct Counts {
  int64_t labeled = 0;    // round(delta d)
  int64_t unlabeled = 0;  // round((1-delta) d)
};

Counts children_counts(const TreeParams& tp) {
  Counts c;
  c.labeled = std::llround(tp.delta * tp.d);
  c.unlabeled = std::llround((1.0 - tp.delta) * tp.d);
  return c;
}

int draw_root(const TreeParams& tp, std::optional<int> forced_root,
              std::mt19937_64& eng) {
  if (forced_root) {
    if (*forced_root < 0 || *forced_root >= tp.k)
      throw std::invalid_argument("forced root label out of range");
    return *forced_root;
  }
  return std::uniform_int_distribution<int>(0, tp.k - 1)(eng);
}

}  // namespace

RootSample sample_amp_root_binary(const TreeParams& tp, int depth, Seed seed,
                                  std::optional<int> forced_root) {
  tp.validate();
  if (tp.k != 2) throw std::invalid_argument("sample_amp_root_binary: k must be 2");
  if (depth < 1) throw std::invalid_argument("sample_amp_root_binary: depth must be >= 1");
  const auto [n_labeled, n_unlabeled] = children_counts(tp);
  const double w = vote_weight(tp.theta, 2);
  const double copy = (1.0 + tp.theta) / 2.0;  // P(child label = parent label)

  auto eng = make_engine(derive(seed, stream::labels));
  RootSample r;
  r.root_label = draw_root(tp, forced_root, eng);

  // plus = unrevealed nodes labeled 0 at the current layer, total their count.
  int64_t plus = r.root_label == 0 ? 1 : 0;
  int64_t total = 1;
  double attenuation = 1.0;
  for (int layer = 0; layer < depth; ++layer) {
    const int64_t minus = total - plus;
    // Revealed children of this layer: how many land on label 0.
    const int64_t votes_plus =
        binom(eng, plus * n_labeled, copy) + binom(eng, minus * n_labeled, 1.0 - copy);
    const int64_t votes_total = total * n_labeled;
    r.message += attenuation * w * static_cast<double>(2 * votes_plus - votes_total);
    attenuation *= tp.theta;
    if (layer + 1 < depth) {
      plus = binom(eng, plus * n_unlabeled, copy) +
             binom(eng, minus * n_unlabeled, 1.0 - copy);
      total *= n_unlabeled;
    }
  }

  if (r.message > 0.0) {
    r.decision = 0;
  } else if (r.message < 0.0) {
    r.decision = 1;
  } else {
    auto coin = make_engine(derive(seed, stream::decisions));
    r.decision = std::bernoulli_distribution(0.5)(coin) ? 0 : 1;
    r.tie_coin_used = true;
  }
  return r;
}

RootSampleK sample_amp_root_k(const TreeParams& tp, int depth, int ref_label, Seed seed,
                              std::optional<int> forced_root) {
  tp.validate();
  if (depth < 1) throw std::invalid_argument("sample_amp_root_k: depth must be >= 1");
  const int k = tp.k;
  if (ref_label < 0 || ref_label >= k)
    throw std::invalid_argument("sample_amp_root_k: reference label out of range");
  const auto [n_labeled, n_unlabeled] = children_counts(tp);
  const double w = vote_weight(tp.theta, k);

  auto eng = make_engine(derive(seed, stream::labels));
  RootSampleK r;
  r.root_label = draw_root(tp, forced_root, eng);

  // channel[a] = transition law of a child of an a-labeled parent.
  std::vector<std::vector<double>> channel(k, std::vector<double>(k, (1.0 - tp.theta) / k));
  for (int a = 0; a < k; ++a) channel[a][a] += tp.theta;

  std::vector<int64_t> counts(k, 0);  // unrevealed nodes per label, current layer
  counts[r.root_label] = 1;
  std::vector<double> weighted(k, 0.0);  // sum over layers of theta^layer * votes
  double attenuation = 1.0;
  for (int layer = 0; layer < depth; ++layer) {
    std::vector<int64_t> votes(k, 0);
    std::vector<int64_t> next(k, 0);
    for (int a = 0; a < k; ++a) {
      if (counts[a] == 0) continue;
      const auto rev = multinom(eng, counts[a] * n_labeled, channel[a]);
      for (int b = 0; b < k; ++b) votes[b] += rev[b];
      if (layer + 1 < depth) {
        const auto unrev = multinom(eng, counts[a] * n_unlabeled, channel[a]);
        for (int b = 0; b < k; ++b) next[b] += unrev[b];
      }
    }
    for (int b = 0; b < k; ++b) weighted[b] += attenuation * static_cast<double>(votes[b]);
    attenuation *= tp.theta;
    counts = std::move(next);
  }

  r.messages.assign(k, 0.0);
  int best = -1;
  double best_val = 0.0;
  for (int i = 0; i < k; ++i) {
    if (i == ref_label) continue;
    r.messages[i] = w * (weighted[i] - weighted[ref_label]);
    if (best == -1 || r.messages[i] > best_val) {
      best = i;
      best_val = r.messages[i];
    }
  }
  r.decision = best_val > 0.0 ? best : ref_label;
  return r;
}

}  // namespace psbm
