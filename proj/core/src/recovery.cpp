#include "psbm/recovery.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <vector>

#include "psbm/message_passing.hpp"

namespace psbm {

namespace {

// Reused across extractions on one thread: epoch stamps avoid an O(n) clear
// per node, which recover_all would otherwise pay n times over.
struct Scratch {
  std::vector<std::int64_t> stamp;
  std::int64_t epoch = 0;
  std::unordered_set<std::int64_t> counted_cycle_edges;
};

Scratch& scratch_for(int n) {
  thread_local Scratch s;
  if (static_cast<int>(s.stamp.size()) < n) s.stamp.resize(static_cast<std::size_t>(n), 0);
  s.counted_cycle_edges.clear();
  ++s.epoch;
  return s;
}

constexpr double spin_of(int label) { return label == 0 ? 1.0 : -1.0; }

}  // namespace

LocalTree extract_local_tree(const LabeledGraph& graph, int v, int t_bar,
                             bool sever_at_revealed) {
  if (v < 0 || v >= graph.n) throw std::invalid_argument("node out of range");
  if (graph.revealed[static_cast<std::size_t>(v)]) {
    throw std::invalid_argument("local tree origin must be unrevealed");
  }
  if (t_bar < 1) throw std::invalid_argument("t_bar must be >= 1");

  Scratch& s = scratch_for(graph.n);
  const std::int64_t epoch = s.epoch;

  LocalTree lt;
  lt.origin = v;
  BroadcastTree& t = lt.tree;
  t.k = graph.k;

  auto admit = [&](int g_node, int parent, int depth) {
    s.stamp[static_cast<std::size_t>(g_node)] = epoch;
    lt.graph_node.push_back(g_node);
    t.parent.push_back(parent);
    t.depth.push_back(depth);
    t.label.push_back(graph.truth[static_cast<std::size_t>(g_node)]);
    t.revealed.push_back(graph.revealed[static_cast<std::size_t>(g_node)]);
  };
  admit(v, -1, 0);

  for (int head = 0; head < static_cast<int>(lt.graph_node.size()); ++head) {
    const int u = lt.graph_node[static_cast<std::size_t>(head)];
    const int dep = t.depth[static_cast<std::size_t>(head)];
    if (dep == t_bar) continue;
    if (sever_at_revealed && t.revealed[static_cast<std::size_t>(head)]) continue;
    const int parent_graph =
        t.parent[static_cast<std::size_t>(head)] >= 0
            ? lt.graph_node[static_cast<std::size_t>(t.parent[static_cast<std::size_t>(head)])]
            : -1;
    for (int w : graph.adj[static_cast<std::size_t>(u)]) {
      if (w == parent_graph) continue;
      if (s.stamp[static_cast<std::size_t>(w)] == epoch) {
        const std::int64_t lo = std::min(u, w);
        const std::int64_t hi = std::max(u, w);
        if (s.counted_cycle_edges.insert(lo * graph.n + hi).second) {
          ++lt.cycle_edges_dropped;
        }
        continue;
      }
      admit(w, head, dep + 1);
    }
  }

  const int m = static_cast<int>(lt.graph_node.size());
  t.child_begin.assign(static_cast<std::size_t>(m), 0);
  t.child_count.assign(static_cast<std::size_t>(m), 0);
  for (int i = 1; i < m; ++i) {
    const int p = t.parent[static_cast<std::size_t>(i)];
    if (t.child_count[static_cast<std::size_t>(p)] == 0) {
      t.child_begin[static_cast<std::size_t>(p)] = i;
    }
    ++t.child_count[static_cast<std::size_t>(p)];
  }
  lt.depth_used = t.depth.back();
  return lt;
}

namespace {

// Attenuated revealed votes in v's subtree, at most t0 levels down; a
// revealed node screens everything below itself. Calls sink(label, theta^r).
template <typename Sink>
void walk_subtree_votes(const BroadcastTree& t, int v, int t0, double theta,
                        Sink&& sink) {
  std::vector<std::pair<int, int>> stack;  // (node, relative depth)
  stack.emplace_back(v, 0);
  while (!stack.empty()) {
    auto [cur, rel] = stack.back();
    stack.pop_back();
    const int begin = t.child_begin[static_cast<std::size_t>(cur)];
    const int end = begin + t.child_count[static_cast<std::size_t>(cur)];
    for (int c = begin; c < end; ++c) {
      if (t.revealed[static_cast<std::size_t>(c)]) {
        sink(t.label[static_cast<std::size_t>(c)],
             std::pow(theta, static_cast<double>(rel + 1)));
      } else if (rel + 1 < t0) {
        stack.emplace_back(c, rel + 1);
      }
    }
  }
}

NodeRecovery decide_on_tree(const LocalTree& lt, const RecoverConfig& cfg,
                            Seed tie_seed) {
  const BroadcastTree& t = lt.tree;
  const int k = cfg.tp.k;
  const double theta = cfg.tp.theta;
  const double w = cfg.init_weight_override > 0.0 ? cfg.init_weight_override
                                                  : vote_weight(theta, k);

  const int t0 = std::clamp(sparse_subtree_depth(cfg.tp), 1,
                            std::max(1, cfg.t_bar - 1));
  const int split = std::max(0, lt.depth_used - t0);

  NodeRecovery out;
  out.cycle_edges_dropped = lt.cycle_edges_dropped;
  out.depth_used = lt.depth_used;
  out.split_layer = split;

  const int m = t.size();
  bool any_vote = false;

  auto children_of = [&](int v) {
    const int begin = t.child_begin[static_cast<std::size_t>(v)];
    return std::pair<int, int>(begin, begin + t.child_count[static_cast<std::size_t>(v)]);
  };

  if (k == 2) {
    std::vector<double> msg(static_cast<std::size_t>(m), 0.0);
    for (int v = m - 1; v >= 0; --v) {
      const int dep = t.depth[static_cast<std::size_t>(v)];
      if (dep > split || t.revealed[static_cast<std::size_t>(v)]) continue;
      auto [begin, end] = children_of(v);
      double acc = 0.0;
      if (dep == split) {
        bool has_revealed_child = false;
        for (int c = begin; c < end; ++c) {
          if (t.revealed[static_cast<std::size_t>(c)]) {
            has_revealed_child = true;
            acc += w * spin_of(t.label[static_cast<std::size_t>(c)]);
          }
        }
        if (has_revealed_child) {
          any_vote = true;
        } else {
          walk_subtree_votes(t, v, t0, theta, [&](int label, double atten) {
            any_vote = true;
            acc += w * atten * spin_of(label);
          });
        }
      } else {
        for (int c = begin; c < end; ++c) {
          if (t.revealed[static_cast<std::size_t>(c)]) {
            any_vote = true;
            acc += w * spin_of(t.label[static_cast<std::size_t>(c)]);
          } else {
            acc += theta * msg[static_cast<std::size_t>(c)];
          }
        }
      }
      msg[static_cast<std::size_t>(v)] = acc;
    }
    const double root = msg[0];
    out.confidence = std::abs(root);
    out.no_information = !any_vote;
    if (root > 0.0) {
      out.decision = 0;
    } else if (root < 0.0) {
      out.decision = 1;
    } else {
      auto eng = make_engine(tie_seed);
      out.decision = static_cast<int>(eng() & 1u);
    }
    return out;
  }

  // k > 2: per-node message vector against reference label 0 (slot 0 == 0).
  constexpr int ref = 0;
  std::vector<double> msg(static_cast<std::size_t>(m) * static_cast<std::size_t>(k), 0.0);
  std::vector<double> counts(static_cast<std::size_t>(k));
  for (int v = m - 1; v >= 0; --v) {
    const int dep = t.depth[static_cast<std::size_t>(v)];
    if (dep > split || t.revealed[static_cast<std::size_t>(v)]) continue;
    auto [begin, end] = children_of(v);
    double* mv = &msg[static_cast<std::size_t>(v) * static_cast<std::size_t>(k)];
    if (dep == split) {
      std::fill(counts.begin(), counts.end(), 0.0);
      bool has_revealed_child = false;
      for (int c = begin; c < end; ++c) {
        if (t.revealed[static_cast<std::size_t>(c)]) {
          has_revealed_child = true;
          counts[static_cast<std::size_t>(t.label[static_cast<std::size_t>(c)])] += 1.0;
        }
      }
      if (has_revealed_child) {
        any_vote = true;
      } else {
        walk_subtree_votes(t, v, t0, theta, [&](int label, double atten) {
          any_vote = true;
          counts[static_cast<std::size_t>(label)] += atten;
        });
      }
      for (int i = 0; i < k; ++i) {
        if (i != ref) mv[i] = (counts[static_cast<std::size_t>(i)] - counts[ref]) * w;
      }
    } else {
      for (int c = begin; c < end; ++c) {
        if (t.revealed[static_cast<std::size_t>(c)]) {
          any_vote = true;
          const int l = t.label[static_cast<std::size_t>(c)];
          for (int i = 0; i < k; ++i) {
            if (i == ref) continue;
            mv[i] += ((l == i ? 1.0 : 0.0) - (l == ref ? 1.0 : 0.0)) * w;
          }
        } else {
          const double* mc = &msg[static_cast<std::size_t>(c) * static_cast<std::size_t>(k)];
          for (int i = 0; i < k; ++i) {
            if (i != ref) mv[i] += theta * mc[i];
          }
        }
      }
    }
  }

  const double* root = &msg[0];
  int best = ref;
  double best_val = 0.0;
  double magnitude = 0.0;
  for (int i = 0; i < k; ++i) {
    magnitude = std::max(magnitude, std::abs(root[i]));
    if (i != ref && root[i] > best_val) {
      best = i;
      best_val = root[i];
    }
  }
  out.confidence = magnitude;
  out.no_information = !any_vote;
  out.decision = best;
  return out;
}

NodeRecovery recover_node_impl(const LabeledGraph& graph, int v,
                               const RecoverConfig& cfg) {
  LocalTree lt = extract_local_tree(graph, v, cfg.t_bar, cfg.sever_at_revealed);
  return decide_on_tree(lt, cfg, derive(cfg.seed, stream::decisions,
                                        static_cast<std::uint64_t>(v)));
}

}  // namespace

NodeRecovery recover_node(const LabeledGraph& graph, int v,
                          const RecoverConfig& cfg) {
  cfg.tp.validate();
  if (graph.k != cfg.tp.k) throw std::invalid_argument("graph/params label count mismatch");
  return recover_node_impl(graph, v, cfg);
}

RecoveryReport recover_all(const LabeledGraph& graph, const RecoverConfig& cfg) {
  cfg.tp.validate();
  if (graph.k != cfg.tp.k) throw std::invalid_argument("graph/params label count mismatch");

  std::vector<int> targets;
  for (int v = 0; v < graph.n; ++v) {
    if (!graph.revealed[static_cast<std::size_t>(v)]) targets.push_back(v);
  }

  RecoveryReport report;
  report.decision.assign(static_cast<std::size_t>(graph.n), -1);
  report.confidence.assign(static_cast<std::size_t>(graph.n), 0.0);
  report.no_information.assign(static_cast<std::size_t>(graph.n), 0);
  report.unrevealed_count = static_cast<std::int64_t>(targets.size());
  report.vacuous = targets.empty();
  if (report.vacuous) return report;

  int workers = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(targets.size()));

  std::atomic<std::size_t> next{0};
  std::atomic<std::int64_t> wrong{0};
  std::atomic<std::int64_t> no_info{0};
  std::atomic<std::int64_t> cycles{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&]() {
    std::int64_t local_wrong = 0, local_no_info = 0, local_cycles = 0;
    try {
      constexpr std::size_t kChunk = 64;
      for (;;) {
        const std::size_t base = next.fetch_add(kChunk);
        if (base >= targets.size()) break;
        const std::size_t stop = std::min(targets.size(), base + kChunk);
        for (std::size_t i = base; i < stop; ++i) {
          const int v = targets[i];
          const NodeRecovery r = recover_node_impl(graph, v, cfg);
          report.decision[static_cast<std::size_t>(v)] = r.decision;
          report.confidence[static_cast<std::size_t>(v)] = r.confidence;
          report.no_information[static_cast<std::size_t>(v)] = r.no_information ? 1 : 0;
          if (r.no_information || r.decision != graph.truth[static_cast<std::size_t>(v)]) {
            ++local_wrong;
          }
          if (r.no_information) ++local_no_info;
          local_cycles += r.cycle_edges_dropped;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
    wrong += local_wrong;
    no_info += local_no_info;
    cycles += local_cycles;
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  report.wrong_count = wrong.load();
  report.no_information_count = no_info.load();
  report.misclassification_rate =
      static_cast<double>(report.wrong_count) / static_cast<double>(targets.size());
  report.mean_cycle_edges_dropped =
      static_cast<double>(cycles.load()) / static_cast<double>(targets.size());
  return report;
}

ModelParams estimate_params(const LabeledGraph& graph) {
  std::vector<int> revealed;
  for (int v = 0; v < graph.n; ++v) {
    if (graph.revealed[static_cast<std::size_t>(v)]) revealed.push_back(v);
  }

  std::int64_t same_pairs = 0, cross_pairs = 0;
  std::int64_t same_edges = 0, cross_edges = 0;
  for (std::size_t a = 0; a < revealed.size(); ++a) {
    const int u = revealed[a];
    const auto& adj_u = graph.adj[static_cast<std::size_t>(u)];
    for (std::size_t b = a + 1; b < revealed.size(); ++b) {
      const int v = revealed[b];
      const bool same = graph.truth[static_cast<std::size_t>(u)] ==
                        graph.truth[static_cast<std::size_t>(v)];
      const bool edge = std::binary_search(adj_u.begin(), adj_u.end(), v);
      if (same) {
        ++same_pairs;
        same_edges += edge;
      } else {
        ++cross_pairs;
        cross_edges += edge;
      }
    }
  }
  if (same_pairs == 0 || cross_pairs == 0) {
    throw std::runtime_error("parameter estimation needs revealed pairs within "
                             "and across blocks");
  }

  ModelParams est;
  est.n = graph.n;
  est.k = graph.k;
  est.p = static_cast<double>(same_edges) / static_cast<double>(same_pairs);
  est.q = static_cast<double>(cross_edges) / static_cast<double>(cross_pairs);
  est.delta = static_cast<double>(revealed.size()) / static_cast<double>(graph.n);
  return est;
}

std::string recovery_report_csv(const RecoveryReport& report,
                                const LabeledGraph& graph) {
  std::string out = "node,decision,truth,confidence,no_information\n";
  char buf[64];
  for (int v = 0; v < graph.n; ++v) {
    if (graph.revealed[static_cast<std::size_t>(v)]) continue;
    out += std::to_string(v);
    out += ',';
    out += std::to_string(report.decision[static_cast<std::size_t>(v)]);
    out += ',';
    out += std::to_string(graph.truth[static_cast<std::size_t>(v)]);
    out += ',';
    std::snprintf(buf, sizeof(buf), "%.17g", report.confidence[static_cast<std::size_t>(v)]);
    out += buf;
    out += ',';
    out += report.no_information[static_cast<std::size_t>(v)] ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace psbm
