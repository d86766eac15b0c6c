#include "psbm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "psbm/generators.hpp"
#include "psbm/io.hpp"
#include "psbm/message_passing.hpp"
#include "psbm/recovery.hpp"
#include "psbm/spectral.hpp"
#include "psbm/theory.hpp"
#include "psbm/tree_sim.hpp"

namespace psbm {

namespace {

double quantile_sorted(const std::vector<double>& v, double f) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const double pos = f * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

// p - q achieving the requested snr with p + q held at `sum`:
// (1-delta) n D^2 = snr k^2 (sum/2 - D (k-2)/(2k)), the positive root.
double solve_gap(double snr, int n, int k, double delta, double sum) {
  const double a = (1.0 - delta) * static_cast<double>(n);
  const double b = snr * k * (k - 2) / 2.0;
  const double c = snr * k * k * sum / 2.0;
  if (snr == 0.0) return 0.0;
  if (a <= 0.0) throw std::invalid_argument("delta = 1 leaves no signal to place");
  return (-b + std::sqrt(b * b + 4.0 * a * c)) / (2.0 * a);
}

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.snr_grid.empty()) throw std::invalid_argument("snr grid is empty");
  if (cfg.n < 2 || cfg.k < 2) throw std::invalid_argument("need n >= 2 and k >= 2");
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (cfg.depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (cfg.tree_samples < 1) throw std::invalid_argument("tree_samples must be >= 1");
  if (!(cfg.delta >= 0.0 && cfg.delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in [0,1]");
  }
  if (!(cfg.edge_density_sum > 0.0 && cfg.edge_density_sum <= 2.0)) {
    throw std::invalid_argument("edge density sum must lie in (0,2]");
  }
  for (double s : cfg.snr_grid) {
    if (!(s >= 0.0)) throw std::invalid_argument("snr grid entries must be >= 0");
  }

  std::string canon = "sweep|n=" + std::to_string(cfg.n) + "|k=" + std::to_string(cfg.k) +
                      "|delta=" + io::format_double(cfg.delta) +
                      "|sum=" + io::format_double(cfg.edge_density_sum) + "|grid=";
  for (double s : cfg.snr_grid) canon += io::format_double(s) + ",";
  canon += "|depth=" + std::to_string(cfg.depth) +
           "|replicates=" + std::to_string(cfg.replicates) +
           "|tree=" + flag(cfg.tree_mode) + "|samples=" + std::to_string(cfg.tree_samples) +
           "|theory_only=" + flag(cfg.theory_only);

  SweepResult result;
  result.seed = cfg.seed;
  result.config_hash = fnv1a64(canon);

  std::vector<double> grid = cfg.snr_grid;
  std::sort(grid.begin(), grid.end());

  for (std::size_t point = 0; point < grid.size(); ++point) {
    SweepRow row;
    row.snr = grid[point];
    try {
      const double gap = solve_gap(row.snr, cfg.n, cfg.k, cfg.delta, cfg.edge_density_sum);
      row.p = (cfg.edge_density_sum + gap) / 2.0;
      row.q = (cfg.edge_density_sum - gap) / 2.0;
      ModelParams params{cfg.n, cfg.k, row.p, row.q, cfg.delta};
      params.validate();
      const TreeParams tp = tree_params_from_sbm(params);
      row.theta = tp.theta;
      row.d = tp.d;
      row.alpha = (1.0 - tp.delta) * tp.theta * tp.theta * tp.d;

      const Regime regime = std::llround(tp.delta * tp.d) >= 1 ? Regime::standard
                                                               : Regime::sparse;
      const TheoryCurve curve = theory_curve(tp, cfg.depth, regime);
      row.theory_upper = curve.upper_bound.back();
      const LowerBoundReport lb =
          cfg.k == 2 ? tv_lower_bound_k2(tp) : chi2_lower_bound_k(tp);
      row.theory_lower = lb.minimax_error_lb;
      row.lower_assumptions_ok = lb.assumptions_ok;

      if (!cfg.theory_only) {
        std::vector<double> rates;
        if (cfg.tree_mode) {
          std::int64_t wrong = 0;
          for (int i = 0; i < cfg.tree_samples; ++i) {
            const std::uint64_t tag =
                static_cast<std::uint64_t>(point) * 100000000ull +
                static_cast<std::uint64_t>(i);
            if (cfg.k == 2) {
              const RootSample s =
                  sample_amp_root_binary(tp, cfg.depth, derive(cfg.seed, stream::labels, tag));
              wrong += s.decision != s.root_label;
            } else {
              const RootSampleK s =
                  sample_amp_root_k(tp, cfg.depth, 0, derive(cfg.seed, stream::labels, tag));
              wrong += s.decision != s.root_label;
            }
          }
          rates.push_back(static_cast<double>(wrong) / cfg.tree_samples);
          row.decisions = cfg.tree_samples;
        } else {
          for (int r = 0; r < cfg.replicates; ++r) {
            const std::uint64_t tag = static_cast<std::uint64_t>(point) * 100000ull +
                                      static_cast<std::uint64_t>(r);
            const LabeledGraph graph =
                gen_psbm(params, derive(cfg.seed, stream::structure, tag));
            RecoverConfig rc;
            rc.tp = tp;
            rc.t_bar = cfg.depth;
            rc.threads = cfg.threads;
            rc.seed = derive(cfg.seed, stream::decisions, tag);
            const RecoveryReport rep = recover_all(graph, rc);
            row.vacuous = row.vacuous || rep.vacuous;
            row.decisions += rep.unrevealed_count;
            rates.push_back(rep.misclassification_rate);
          }
        }
        std::sort(rates.begin(), rates.end());
        row.replicates_done = static_cast<int>(rates.size());
        row.error_mean = mean_of(rates);
        row.error_median = quantile_sorted(rates, 0.5);
        row.error_q25 = quantile_sorted(rates, 0.25);
        row.error_q75 = quantile_sorted(rates, 0.75);
      }
    } catch (const std::exception& e) {
      row.failure = e.what();
      for (char& c : row.failure) {
        if (c == ',' || c == '\n') c = ';';
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "snr,p,q,theta,d,alpha,replicates,decisions,error_mean,error_median,"
      "error_q25,error_q75,theory_upper,theory_lower,lower_assumptions_ok,"
      "vacuous,failure,config_hash,seed\n";
  for (const SweepRow& r : result.rows) {
    out += io::format_double(r.snr) + ',' + io::format_double(r.p) + ',' +
           io::format_double(r.q) + ',' + io::format_double(r.theta) + ',' +
           io::format_double(r.d) + ',' + io::format_double(r.alpha) + ',' +
           std::to_string(r.replicates_done) + ',' + std::to_string(r.decisions) + ',' +
           io::format_double(r.error_mean) + ',' + io::format_double(r.error_median) +
           ',' + io::format_double(r.error_q25) + ',' + io::format_double(r.error_q75) +
           ',' + io::format_double(r.theory_upper) + ',' +
           io::format_double(r.theory_lower) + ',' + flag(r.lower_assumptions_ok) + ',' +
           flag(r.vacuous) + ',' + r.failure + ',' +
           std::to_string(result.config_hash) + ',' + std::to_string(result.seed.value) +
           '\n';
  }
  return out;
}

LabeledGraph ingest_edgelist(const std::string& edge_path,
                             const std::string& labels_path,
                             bool largest_component) {
  if (!io::file_exists(edge_path)) {
    throw DatasetMissingError("dataset file missing: " + edge_path);
  }
  if (!io::file_exists(labels_path)) {
    throw DatasetMissingError("dataset file missing: " + labels_path);
  }

  std::vector<io::LabelRow> rows;
  std::vector<std::pair<int, int>> raw_edges;
  try {
    rows = io::parse_labels(io::read_file(labels_path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(labels_path + ": " + e.what());
  }
  try {
    raw_edges = io::parse_edge_list(io::read_file(edge_path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(edge_path + ": " + e.what());
  }
  if (rows.empty()) throw std::runtime_error(labels_path + ": no labels");
  if (raw_edges.empty()) throw std::runtime_error(edge_path + ": empty edge list");

  // Densify node ids (labels file defines the node set) and label values.
  std::map<int, int> node_of;
  std::set<int> label_values;
  for (const auto& row : rows) {
    if (!node_of.emplace(row.node, 0).second) {
      throw std::runtime_error(labels_path + ": node " + std::to_string(row.node) +
                               " labeled twice");
    }
    label_values.insert(row.label);
  }
  int next = 0;
  for (auto& [id, dense] : node_of) dense = next++;
  std::map<int, int> label_of;
  next = 0;
  for (int l : label_values) label_of[l] = next++;

  LabeledGraph g;
  g.n = static_cast<int>(node_of.size());
  g.k = std::max(2, static_cast<int>(label_of.size()));
  g.adj.assign(static_cast<std::size_t>(g.n), {});
  g.truth.assign(static_cast<std::size_t>(g.n), 0);
  g.revealed.assign(static_cast<std::size_t>(g.n), 0);
  for (const auto& row : rows) {
    const int v = node_of[row.node];
    g.truth[static_cast<std::size_t>(v)] = label_of[row.label];
    g.revealed[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(row.revealed);
  }
  for (const auto& [ru, rw] : raw_edges) {
    const auto iu = node_of.find(ru);
    const auto iw = node_of.find(rw);
    if (iu == node_of.end() || iw == node_of.end()) {
      throw std::runtime_error(edge_path + ": edge (" + std::to_string(ru) + "," +
                               std::to_string(rw) + ") references an unlabeled node");
    }
    if (iu->second == iw->second) continue;  // self-loop
    g.adj[static_cast<std::size_t>(iu->second)].push_back(iw->second);
    g.adj[static_cast<std::size_t>(iw->second)].push_back(iu->second);
  }
  for (auto& nbrs : g.adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  if (!largest_component) return g;

  // Largest connected component (first one found wins ties: BFS in id order
  // reaches the component holding the smallest node first).
  std::vector<int> comp(static_cast<std::size_t>(g.n), -1);
  int best_comp = -1;
  std::int64_t best_size = 0;
  int n_comps = 0;
  std::vector<int> queue;
  for (int s = 0; s < g.n; ++s) {
    if (comp[static_cast<std::size_t>(s)] != -1) continue;
    const int c = n_comps++;
    std::int64_t size = 0;
    queue.assign(1, s);
    comp[static_cast<std::size_t>(s)] = c;
    while (!queue.empty()) {
      const int u = queue.back();
      queue.pop_back();
      ++size;
      for (int w : g.adj[static_cast<std::size_t>(u)]) {
        if (comp[static_cast<std::size_t>(w)] == -1) {
          comp[static_cast<std::size_t>(w)] = c;
          queue.push_back(w);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_comp = c;
    }
  }

  std::vector<int> keep_id(static_cast<std::size_t>(g.n), -1);
  int m = 0;
  for (int v = 0; v < g.n; ++v) {
    if (comp[static_cast<std::size_t>(v)] == best_comp) keep_id[static_cast<std::size_t>(v)] = m++;
  }
  LabeledGraph lcc;
  lcc.n = m;
  lcc.k = g.k;
  lcc.adj.assign(static_cast<std::size_t>(m), {});
  lcc.truth.assign(static_cast<std::size_t>(m), 0);
  lcc.revealed.assign(static_cast<std::size_t>(m), 0);
  for (int v = 0; v < g.n; ++v) {
    const int nv = keep_id[static_cast<std::size_t>(v)];
    if (nv < 0) continue;
    lcc.truth[static_cast<std::size_t>(nv)] = g.truth[static_cast<std::size_t>(v)];
    lcc.revealed[static_cast<std::size_t>(nv)] = g.revealed[static_cast<std::size_t>(v)];
    for (int w : g.adj[static_cast<std::size_t>(v)]) {
      lcc.adj[static_cast<std::size_t>(nv)].push_back(keep_id[static_cast<std::size_t>(w)]);
    }
  }
  return lcc;
}

namespace {

BlogStudyCell make_cell(const std::string& algorithm, double delta, int depth,
                        std::vector<double> rates) {
  std::sort(rates.begin(), rates.end());
  BlogStudyCell cell;
  cell.algorithm = algorithm;
  cell.delta = delta;
  cell.depth = depth;
  cell.replicates_done = static_cast<int>(rates.size());
  cell.mean = mean_of(rates);
  cell.median = quantile_sorted(rates, 0.5);
  cell.min = quantile_sorted(rates, 0.0);
  cell.q25 = quantile_sorted(rates, 0.25);
  cell.q75 = quantile_sorted(rates, 0.75);
  cell.max = quantile_sorted(rates, 1.0);
  return cell;
}

}  // namespace

BlogStudyReport run_blog_study(const BlogStudyConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (cfg.min_depth < 1 || cfg.max_depth < cfg.min_depth) {
    throw std::invalid_argument("need 1 <= min_depth <= max_depth");
  }
  if (cfg.deltas.empty()) throw std::invalid_argument("no reveal fractions given");
  for (double d : cfg.deltas) {
    if (!(d > 0.0 && d < 1.0)) {
      throw std::invalid_argument("reveal fractions must lie in (0,1)");
    }
  }

  const LabeledGraph base =
      ingest_edgelist(cfg.edge_path, cfg.labels_path, cfg.largest_component);

  std::string canon = "blog|edges=" + cfg.edge_path + "|labels=" + cfg.labels_path +
                      "|deltas=";
  for (double d : cfg.deltas) canon += io::format_double(d) + ",";
  canon += "|depths=" + std::to_string(cfg.min_depth) + ".." + std::to_string(cfg.max_depth) +
           "|replicates=" + std::to_string(cfg.replicates) +
           "|lcc=" + flag(cfg.largest_component) + "|spectral=" + flag(cfg.run_spectral);

  BlogStudyReport report;
  report.n = base.n;
  report.edges = base.edge_count();
  report.seed = cfg.seed;
  report.config_hash = fnv1a64(canon);

  const bool spectral_possible = cfg.run_spectral && base.k == 2;
  for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
    const double delta = cfg.deltas[di];
    std::map<int, std::vector<double>> amp_rates;
    std::vector<double> spectral_rates;

    for (int rep = 0; rep < cfg.replicates; ++rep) {
      const std::uint64_t tag = di * 1000000ull + static_cast<std::uint64_t>(rep);
      LabeledGraph g = base;
      redraw_reveals(g, delta, derive(cfg.seed, stream::reveals, tag));

      bool amp_ok = true;
      TreeParams tp;
      try {
        ModelParams est = estimate_params(g);
        est.validate();
        tp = tree_params_from_sbm(est);
        vote_weight(tp.theta, est.k);  // rejects theta = 1 (q-hat = 0)
      } catch (const std::exception&) {
        amp_ok = false;  // degenerate reveal draw; skip this replicate's runs
      }
      if (amp_ok) {
        for (int depth = cfg.min_depth; depth <= cfg.max_depth; ++depth) {
          RecoverConfig rc;
          rc.tp = tp;
          rc.t_bar = depth;
          rc.threads = cfg.threads;
          rc.seed = derive(cfg.seed, stream::decisions, tag);
          amp_rates[depth].push_back(recover_all(g, rc).misclassification_rate);
        }
      }
      if (spectral_possible) {
        SpectralConfig sc;
        sc.seed = derive(cfg.seed, stream::spectral, tag);
        spectral_rates.push_back(spectral_error_rate(spectral_partition(g, 2, sc), g));
      }
    }

    for (int depth = cfg.min_depth; depth <= cfg.max_depth; ++depth) {
      report.cells.push_back(make_cell("amp", delta, depth, amp_rates[depth]));
    }
    if (spectral_possible) {
      report.cells.push_back(make_cell("spectral", delta, 0, spectral_rates));
    }
  }
  return report;
}

std::string blog_study_csv(const BlogStudyReport& report) {
  std::string out =
      "algorithm,delta,depth,replicates,median,mean,min,q25,q75,max,"
      "config_hash,seed\n";
  for (const BlogStudyCell& c : report.cells) {
    out += c.algorithm + ',' + io::format_double(c.delta) + ',' +
           std::to_string(c.depth) + ',' + std::to_string(c.replicates_done) + ',' +
           io::format_double(c.median) + ',' + io::format_double(c.mean) + ',' +
           io::format_double(c.min) + ',' + io::format_double(c.q25) + ',' +
           io::format_double(c.q75) + ',' + io::format_double(c.max) + ',' +
           std::to_string(report.config_hash) + ',' + std::to_string(report.seed.value) +
           '\n';
  }
  return out;
}

}  // namespace psbm
