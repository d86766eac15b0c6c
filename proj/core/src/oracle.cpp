#include "psbm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace psbm {

namespace {

constexpr int kMaxUnrevealedNonRoot = 14;
constexpr int kMaxRevealedLeaves = 12;

// Streaming logsumexp accumulator.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;  // sum of exp(x - max)

  void add(double x) {
    if (std::isinf(x) && x < 0) return;
    if (x <= max) {
      sum += std::exp(x - max);
    } else {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    }
  }

  double value() const {
    if (sum == 0.0) return -std::numeric_limits<double>::infinity();
    return max + std::log(sum);
  }
};

void for_each_composition(int total, int slots,
                          const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> counts(static_cast<std::size_t>(slots), 0);
  // Recursive enumeration of all ways to write `total` as an ordered sum of
  // `slots` non-negative integers.
  std::function<void(int, int)> rec = [&](int slot, int remaining) {
    if (slot == slots - 1) {
      counts[static_cast<std::size_t>(slot)] = remaining;
      fn(counts);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(slot)] = c;
      rec(slot + 1, remaining - c);
    }
  };
  if (slots == 0) {
    if (total == 0) fn(counts);
    return;
  }
  rec(0, total);
}

double log_multinomial_coef(int total, const std::vector<int>& counts) {
  double lg = std::lgamma(static_cast<double>(total) + 1.0);
  for (int c : counts) lg -= std::lgamma(static_cast<double>(c) + 1.0);
  return lg;
}

}  // namespace

EnumerationResult exact_posterior_enumeration(const BroadcastTree& tree,
                                              const TreeParams& tp) {
  tp.validate();
  tree.check();
  if (tree.k != tp.k) throw std::invalid_argument("tree/params label count mismatch");

  const int k = tp.k;
  const double theta = tp.theta;
  const double p_same = theta + (1.0 - theta) / k;
  const double p_diff = (1.0 - theta) / k;
  const double lc_same = std::log(p_same);
  const double lc_diff =
      p_diff > 0.0 ? std::log(p_diff) : -std::numeric_limits<double>::infinity();

  std::vector<int> free_nodes;  // unrevealed, non-root
  for (int v = 1; v < tree.size(); ++v) {
    if (!tree.revealed[static_cast<std::size_t>(v)]) free_nodes.push_back(v);
  }
  const int m = static_cast<int>(free_nodes.size());
  if (m > kMaxUnrevealedNonRoot) {
    throw std::length_error("posterior enumeration budget exceeded: " +
                            std::to_string(m) + " unrevealed non-root nodes");
  }

  std::vector<int> labels(tree.label.begin(), tree.label.end());
  std::vector<int> digits(static_cast<std::size_t>(m), 0);

  std::vector<LogSum> per_root(static_cast<std::size_t>(k));
  std::int64_t configs = 1;
  for (int i = 0; i < m; ++i) configs *= k;

  for (int r = 0; r < k; ++r) {
    labels[0] = r;
    std::fill(digits.begin(), digits.end(), 0);
    for (std::int64_t it = 0; it < configs; ++it) {
      for (int i = 0; i < m; ++i) {
        labels[static_cast<std::size_t>(free_nodes[static_cast<std::size_t>(i)])] =
            digits[static_cast<std::size_t>(i)];
      }
      double ll = 0.0;
      for (int v = 1; v < tree.size(); ++v) {
        const int pv = tree.parent[static_cast<std::size_t>(v)];
        ll += (labels[static_cast<std::size_t>(v)] == labels[static_cast<std::size_t>(pv)])
                  ? lc_same
                  : lc_diff;
      }
      per_root[static_cast<std::size_t>(r)].add(ll);
      // Mixed-radix increment.
      for (int i = 0; i < m; ++i) {
        if (++digits[static_cast<std::size_t>(i)] < k) break;
        digits[static_cast<std::size_t>(i)] = 0;
      }
    }
  }

  EnumerationResult out;
  out.configurations_enumerated = configs;
  out.posterior.assign(static_cast<std::size_t>(k), 0.0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    logs[static_cast<std::size_t>(r)] = per_root[static_cast<std::size_t>(r)].value();
    best = std::max(best, logs[static_cast<std::size_t>(r)]);
  }
  if (std::isinf(best)) {
    // Every configuration has zero likelihood; only reachable with theta == 1
    // and contradictory revealed labels. Fall back to uniform.
    std::fill(out.posterior.begin(), out.posterior.end(), 1.0 / k);
    return out;
  }
  double total = 0.0;
  for (int r = 0; r < k; ++r) {
    out.posterior[static_cast<std::size_t>(r)] =
        std::exp(logs[static_cast<std::size_t>(r)] - best);
    total += out.posterior[static_cast<std::size_t>(r)];
  }
  for (double& p : out.posterior) p /= total;
  return out;
}

namespace {

// A finite distribution over canonical outcome keys.
using Dist = std::map<std::string, double>;

struct DistanceEnumerator {
  int k;
  double theta;
  int dl;  // revealed children per internal node
  int du;  // unrevealed children per internal node
  std::vector<std::vector<double>> channel;  // channel[a][b] = P(child=b | parent=a)
  std::map<int, Dist> memo;                  // key: a * 64 + depth

  Dist& subtree_dist(int a, int depth) {
    const int key = a * 64 + depth;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    Dist result;
    if (depth == 0) {
      result[""] = 1.0;
      return memo.emplace(key, std::move(result)).first->second;
    }

    // Mixture over child labels of the depth-1 observable distributions.
    Dist mix;
    for (int b = 0; b < k; ++b) {
      const double w = channel[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (w <= 0.0) continue;
      for (const auto& [ck, cp] : subtree_dist(b, depth - 1)) mix[ck] += w * cp;
    }
    std::vector<std::pair<std::string, double>> support(mix.begin(), mix.end());

    // Revealed children: label-count composition with multinomial weight.
    std::vector<std::pair<std::string, double>> own;  // (counts key, probability)
    for_each_composition(dl, k, [&](const std::vector<int>& counts) {
      double lp = log_multinomial_coef(dl, counts);
      for (int b = 0; b < k; ++b) {
        const int c = counts[static_cast<std::size_t>(b)];
        if (c == 0) continue;
        const double pb =
            channel[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (pb <= 0.0) return;  // zero-probability composition
        lp += c * std::log(pb);
      }
      std::string ck;
      for (int b = 0; b < k; ++b) {
        if (b) ck += ',';
        ck += std::to_string(counts[static_cast<std::size_t>(b)]);
      }
      own.emplace_back(std::move(ck), std::exp(lp));
    });

    // Unrevealed children: unordered multiset of du iid draws from `mix`.
    for_each_composition(du, static_cast<int>(support.size()),
                         [&](const std::vector<int>& mult) {
      double lp = log_multinomial_coef(du, mult);
      std::string mk;
      for (std::size_t s = 0; s < support.size(); ++s) {
        const int c = mult[s];
        if (c == 0) continue;
        lp += c * std::log(support[s].second);
        mk += '(';
        mk += support[s].first;
        mk += 'x';
        mk += std::to_string(c);
        mk += ')';
      }
      const double pc = std::exp(lp);
      for (const auto& [ok, op] : own) {
        result[ok + "|" + mk] += op * pc;
      }
      if (result.size() > 2'000'000) {
        throw std::length_error("distance enumeration support exploded");
      }
    });

    return memo.emplace(key, std::move(result)).first->second;
  }
};

}  // namespace

DistanceResult exact_distance_enumeration(const TreeParams& tp, int depth,
                                          int root_i, int root_j) {
  tp.validate();
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  if (root_i < 0 || root_i >= tp.k || root_j < 0 || root_j >= tp.k) {
    throw std::invalid_argument("root labels out of range");
  }

  const int dl = static_cast<int>(std::llround(tp.delta * tp.d));
  const int du = static_cast<int>(std::llround((1.0 - tp.delta) * tp.d));

  // Total revealed nodes across the whole tree: dl per internal node, and the
  // internal nodes at level l number du^l.
  std::int64_t revealed_total = 0;
  std::int64_t internal_at_level = 1;
  for (int l = 0; l < depth; ++l) {
    revealed_total += static_cast<std::int64_t>(dl) * internal_at_level;
    internal_at_level *= du;
    if (revealed_total > kMaxRevealedLeaves) break;
  }
  if (revealed_total > kMaxRevealedLeaves) {
    throw std::length_error("distance enumeration budget exceeded: " +
                            std::to_string(revealed_total) + " revealed nodes");
  }

  DistanceEnumerator en;
  en.k = tp.k;
  en.theta = tp.theta;
  en.dl = dl;
  en.du = du;
  en.channel.assign(static_cast<std::size_t>(tp.k),
                    std::vector<double>(static_cast<std::size_t>(tp.k),
                                        (1.0 - tp.theta) / tp.k));
  for (int a = 0; a < tp.k; ++a) {
    en.channel[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] += tp.theta;
  }

  // std::map node handles stay put on insert, so these references survive the
  // second subtree_dist call.
  const Dist& mu_i = en.subtree_dist(root_i, depth);
  const Dist& mu_j = en.subtree_dist(root_j, depth);

  DistanceResult out;
  double chi2_sum = 0.0;
  double tv_sum = 0.0;
  std::int64_t support = 0;

  auto it_i = mu_i.begin();
  auto it_j = mu_j.begin();
  while (it_i != mu_i.end() || it_j != mu_j.end()) {
    double pi = 0.0, pj = 0.0;
    if (it_j == mu_j.end() || (it_i != mu_i.end() && it_i->first < it_j->first)) {
      pi = it_i->second;
      ++it_i;
    } else if (it_i == mu_i.end() || it_j->first < it_i->first) {
      pj = it_j->second;
      ++it_j;
    } else {
      pi = it_i->second;
      pj = it_j->second;
      ++it_i;
      ++it_j;
    }
    ++support;
    tv_sum += std::abs(pi - pj);
    if (pj > 0.0) {
      chi2_sum += pi * pi / pj;
    } else if (pi > 0.0) {
      chi2_sum = std::numeric_limits<double>::infinity();
    }
  }

  out.chi2 = std::max(0.0, chi2_sum - 1.0);
  out.tv = 0.5 * tv_sum;
  out.support_size = support;
  return out;
}

}  // namespace psbm
