// Command-line front end: graph generation, tree simulation, per-node
// recovery, phase-boundary sweeps, the blog-network study, and theory curves.
// Exit codes: 0 success, 2 configuration error, 3 dataset missing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psbm/experiments.hpp"
#include "psbm/generators.hpp"
#include "psbm/io.hpp"
#include "psbm/message_passing.hpp"
#include "psbm/model.hpp"
#include "psbm/recovery.hpp"
#include "psbm/spectral.hpp"
#include "psbm/theory.hpp"
#include "psbm/tree_sim.hpp"

namespace {

using nlohmann::json;
using namespace psbm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDatasetMissing = 3;

// Flat key=value configuration with typed getters; CLI flags override file
// keys by writing into the same map before the getters run.
struct Options {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  }

  double get_double(const std::string& key, double dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) {
      throw std::invalid_argument(key + ": not a number: " + it->second);
    }
    return v;
  }

  long long get_int(const std::string& key, long long dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) {
      throw std::invalid_argument(key + ": not an integer: " + it->second);
    }
    return v;
  }

  bool get_bool(const std::string& key, bool dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    if (it->second == "1" || it->second == "true" || it->second == "on") return true;
    if (it->second == "0" || it->second == "false" || it->second == "off") return false;
    throw std::invalid_argument(key + ": not a boolean: " + it->second);
  }
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    if (!item.empty()) {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) {
        throw std::invalid_argument("grid entry is not a number: " + item);
      }
    }
    start = end + 1;
  }
  return out;
}

// Shared flag surface. Each subcommand merges: config file keys, then flags.
struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> replicates;
  std::optional<int> depth;
  std::optional<double> delta;
  std::string snr_grid;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value configuration file");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out", out, "output path prefix");
    cmd->add_option("--replicates", replicates, "replicate count");
    cmd->add_option("--depth", depth, "neighborhood / tree depth");
    cmd->add_option("--delta", delta, "revealed fraction");
    cmd->add_option("--snr-grid", snr_grid, "comma-separated snr values");
  }

  Options resolve() const {
    Options opt;
    if (!config_path.empty()) opt.kv = io::read_config(config_path);
    if (seed) opt.kv["seed"] = std::to_string(*seed);
    if (replicates) opt.kv["replicates"] = std::to_string(*replicates);
    if (depth) opt.kv["depth"] = std::to_string(*depth);
    if (delta) opt.kv["delta"] = io::format_double(*delta);
    if (!snr_grid.empty()) opt.kv["snr_grid"] = snr_grid;
    if (!out.empty()) opt.kv["out"] = out;
    return opt;
  }
};

void write_or_print(const std::string& out_key, const std::string& suffix,
                    const std::string& content) {
  if (out_key.empty()) {
    std::cout << content;
  } else {
    io::write_file(out_key + suffix, content);
  }
}

int run_gen(const Options& opt) {
  ModelParams params;
  params.n = static_cast<int>(opt.get_int("n", 1000));
  params.k = static_cast<int>(opt.get_int("k", 2));
  params.p = opt.get_double("p", 0.02);
  params.q = opt.get_double("q", 0.005);
  params.delta = opt.get_double("delta", 0.1);
  params.validate();
  const Seed seed{static_cast<std::uint64_t>(opt.get_int("seed", 1))};

  const LabeledGraph g = gen_psbm(params, seed);
  const SnrReport rep = snr_report(params);

  json summary;
  summary["n"] = g.n;
  summary["k"] = g.k;
  summary["p"] = params.p;
  summary["q"] = params.q;
  summary["delta"] = params.delta;
  summary["edges"] = g.edge_count();
  std::int64_t revealed = 0;
  for (auto r : g.revealed) revealed += r;
  summary["revealed"] = revealed;
  summary["snr"] = rep.snr;
  summary["alpha"] = rep.alpha;
  summary["coupling_depth"] = rep.coupling_depth;
  summary["seed"] = seed.value;

  const std::string out = opt.get_string("out", "");
  if (out.empty()) {
    std::cout << summary.dump(2) << "\n";
  } else {
    io::write_graph(g, out + ".edges", out + ".labels");
    io::write_file(out + ".json", summary.dump(2) + "\n");
    std::cout << "wrote " << out << ".edges, " << out << ".labels, " << out
              << ".json\n";
  }
  return kExitOk;
}

int run_tree_sim(const Options& opt) {
  TreeParams tp;
  tp.theta = opt.get_double("theta", 1.0 / 3.0);
  tp.d = opt.get_double("d", 15.0);
  tp.delta = opt.get_double("delta", 0.2);
  tp.k = static_cast<int>(opt.get_int("k", 2));
  tp.validate();
  const int depth = static_cast<int>(opt.get_int("depth", 4));
  const int samples = static_cast<int>(opt.get_int("replicates", 10000));
  if (depth < 1 || samples < 1) {
    throw std::invalid_argument("depth and replicates must be >= 1");
  }
  const Seed seed{static_cast<std::uint64_t>(opt.get_int("seed", 1))};

  std::string csv = "sample,root_label,decision,message_magnitude\n";
  std::int64_t wrong = 0;
  for (int i = 0; i < samples; ++i) {
    int root = 0, decision = 0;
    double magnitude = 0.0;
    const Seed s = derive(seed, stream::labels, static_cast<std::uint64_t>(i));
    if (tp.k == 2) {
      const RootSample r = sample_amp_root_binary(tp, depth, s);
      root = r.root_label;
      decision = r.decision;
      magnitude = std::abs(r.message);
    } else {
      const RootSampleK r = sample_amp_root_k(tp, depth, 0, s);
      root = r.root_label;
      decision = r.decision;
      for (double m : r.messages) magnitude = std::max(magnitude, std::abs(m));
    }
    wrong += decision != root;
    csv += std::to_string(i) + ',' + std::to_string(root) + ',' +
           std::to_string(decision) + ',' + io::format_double(magnitude) + '\n';
  }

  json summary;
  summary["theta"] = tp.theta;
  summary["d"] = tp.d;
  summary["delta"] = tp.delta;
  summary["k"] = tp.k;
  summary["depth"] = depth;
  summary["samples"] = samples;
  summary["error_rate"] = static_cast<double>(wrong) / samples;
  summary["seed"] = seed.value;
  const double alpha = (1.0 - tp.delta) * tp.theta * tp.theta * tp.d;
  summary["alpha"] = alpha;
  try {
    const Regime regime = std::llround(tp.delta * tp.d) >= 1 ? Regime::standard
                                                             : Regime::sparse;
    const TheoryCurve curve = theory_curve(tp, depth, regime);
    summary["theory_upper"] = curve.upper_bound.back();
    summary["eps_exact"] = curve.eps.back();
  } catch (const std::exception& e) {
    summary["theory_upper"] = nullptr;
    summary["theory_note"] = e.what();
  }

  const std::string out = opt.get_string("out", "");
  if (!out.empty()) io::write_file(out + ".csv", csv);
  write_or_print(out, ".json", summary.dump(2) + "\n");
  if (!out.empty()) std::cout << "wrote " << out << ".csv, " << out << ".json\n";
  return kExitOk;
}

int run_recover(const Options& opt) {
  const std::string edges = opt.get_string("edges", "");
  const std::string labels = opt.get_string("labels", "");
  if (edges.empty() || labels.empty()) {
    throw std::invalid_argument("recover needs edges= and labels= paths");
  }
  LabeledGraph g = ingest_edgelist(edges, labels,
                                   opt.get_bool("largest_component", true));
  const Seed seed{static_cast<std::uint64_t>(opt.get_int("seed", 1))};
  if (opt.has("delta")) {
    redraw_reveals(g, opt.get_double("delta", 0.1), derive(seed, stream::reveals));
  }

  TreeParams tp;
  if (opt.has("theta") && opt.has("d")) {
    tp.theta = opt.get_double("theta", 0.0);
    tp.d = opt.get_double("d", 0.0);
    tp.k = g.k;
    std::int64_t revealed = 0;
    for (auto r : g.revealed) revealed += r;
    tp.delta = static_cast<double>(revealed) / g.n;
  } else {
    ModelParams est = estimate_params(g);
    est.validate();
    tp = tree_params_from_sbm(est);
  }
  tp.validate();

  RecoverConfig rc;
  rc.tp = tp;
  rc.t_bar = static_cast<int>(opt.get_int("depth", 3));
  rc.sever_at_revealed = opt.get_bool("sever_at_revealed", false);
  rc.threads = static_cast<int>(opt.get_int("threads", 0));
  rc.seed = seed;
  const RecoveryReport report = recover_all(g, rc);

  json summary;
  summary["n"] = g.n;
  summary["k"] = g.k;
  summary["theta"] = tp.theta;
  summary["d"] = tp.d;
  summary["delta"] = tp.delta;
  summary["depth"] = rc.t_bar;
  summary["unrevealed"] = report.unrevealed_count;
  summary["wrong"] = report.wrong_count;
  summary["no_information"] = report.no_information_count;
  summary["misclassification_rate"] = report.misclassification_rate;
  summary["vacuous"] = report.vacuous;
  summary["mean_cycle_edges_dropped"] = report.mean_cycle_edges_dropped;
  summary["seed"] = seed.value;

  const std::string out = opt.get_string("out", "");
  if (!out.empty()) io::write_file(out + ".csv", recovery_report_csv(report, g));
  write_or_print(out, ".json", summary.dump(2) + "\n");
  if (!out.empty()) std::cout << "wrote " << out << ".csv, " << out << ".json\n";
  return kExitOk;
}

int run_sweep_cmd(const Options& opt) {
  SweepConfig cfg;
  cfg.n = static_cast<int>(opt.get_int("n", 5000));
  cfg.k = static_cast<int>(opt.get_int("k", 2));
  cfg.delta = opt.get_double("delta", 0.05);
  cfg.edge_density_sum = opt.get_double("edge_density_sum", 0.006);
  cfg.snr_grid = parse_grid(opt.get_string("snr_grid", "0.25,0.5,1.5,2.5,4"));
  cfg.depth = static_cast<int>(opt.get_int("depth", 3));
  cfg.replicates = static_cast<int>(opt.get_int("replicates", 3));
  cfg.tree_mode = opt.get_bool("tree_mode", false);
  cfg.tree_samples = static_cast<int>(opt.get_int("tree_samples", 10000));
  cfg.theory_only = opt.get_bool("theory_only", false);
  cfg.threads = static_cast<int>(opt.get_int("threads", 0));
  cfg.seed = Seed{static_cast<std::uint64_t>(opt.get_int("seed", 1))};

  const SweepResult result = run_sweep(cfg);

  json summary;
  summary["points"] = result.rows.size();
  summary["config_hash"] = result.config_hash;
  summary["seed"] = result.seed.value;
  json points = json::array();
  for (const SweepRow& r : result.rows) {
    json p;
    p["snr"] = r.snr;
    p["error_median"] = r.error_median;
    p["theory_upper"] = r.theory_upper;
    p["theory_lower"] = r.theory_lower;
    p["vacuous"] = r.vacuous;
    if (!r.failure.empty()) p["failure"] = r.failure;
    points.push_back(p);
  }
  summary["rows"] = points;

  const std::string out = opt.get_string("out", "");
  if (!out.empty()) io::write_file(out + ".csv", sweep_csv(result));
  write_or_print(out, ".json", summary.dump(2) + "\n");
  if (!out.empty()) std::cout << "wrote " << out << ".csv, " << out << ".json\n";
  return kExitOk;
}

int run_blog(const Options& opt) {
  BlogStudyConfig cfg;
  cfg.edge_path = opt.get_string("edges", "data/polblogs/edges.txt");
  cfg.labels_path = opt.get_string("labels", "data/polblogs/labels.txt");
  if (opt.has("deltas")) {
    cfg.deltas = parse_grid(opt.get_string("deltas", ""));
  } else if (opt.has("delta")) {
    cfg.deltas = {opt.get_double("delta", 0.1)};
  }
  cfg.min_depth = static_cast<int>(opt.get_int("min_depth", 1));
  cfg.max_depth = static_cast<int>(opt.get_int("max_depth", opt.get_int("depth", 5)));
  cfg.replicates = static_cast<int>(opt.get_int("replicates", 50));
  cfg.largest_component = opt.get_bool("largest_component", true);
  cfg.run_spectral = opt.get_bool("spectral", true);
  cfg.threads = static_cast<int>(opt.get_int("threads", 0));
  cfg.seed = Seed{static_cast<std::uint64_t>(opt.get_int("seed", 1))};

  const BlogStudyReport report = run_blog_study(cfg);

  json summary;
  summary["n"] = report.n;
  summary["edges"] = report.edges;
  summary["config_hash"] = report.config_hash;
  summary["seed"] = report.seed.value;
  json cells = json::array();
  for (const BlogStudyCell& c : report.cells) {
    json cell;
    cell["algorithm"] = c.algorithm;
    cell["delta"] = c.delta;
    cell["depth"] = c.depth;
    cell["median"] = c.median;
    cell["replicates"] = c.replicates_done;
    cells.push_back(cell);
  }
  summary["cells"] = cells;

  const std::string out = opt.get_string("out", "");
  if (!out.empty()) io::write_file(out + ".csv", blog_study_csv(report));
  write_or_print(out, ".json", summary.dump(2) + "\n");
  if (!out.empty()) std::cout << "wrote " << out << ".csv, " << out << ".json\n";
  return kExitOk;
}

int run_theory(const Options& opt) {
  TreeParams tp;
  tp.theta = opt.get_double("theta", 1.0 / 3.0);
  tp.d = opt.get_double("d", 15.0);
  tp.delta = opt.get_double("delta", 0.2);
  tp.k = static_cast<int>(opt.get_int("k", 2));
  tp.validate();
  const int depth = static_cast<int>(opt.get_int("depth", 10));
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");

  const Regime regime = std::llround(tp.delta * tp.d) >= 1 ? Regime::standard
                                                           : Regime::sparse;
  const TheoryCurve curve = theory_curve(tp, depth, regime);

  json summary;
  summary["theta"] = tp.theta;
  summary["d"] = tp.d;
  summary["delta"] = tp.delta;
  summary["k"] = tp.k;
  summary["alpha"] = curve.alpha;
  summary["regime"] = curve.regime == Regime::standard ? "standard" : "sparse";
  summary["t0"] = curve.t0;
  summary["mu1"] = curve.mu1;
  summary["sigma1_sq"] = curve.sigma1_sq;
  summary["upper_bound_at_depth"] = curve.upper_bound.back();
  const LowerBoundReport lb = tp.k == 2 ? tv_lower_bound_k2(tp)
                                        : chi2_lower_bound_k(tp);
  summary["minimax_error_lb"] = lb.minimax_error_lb;
  summary["lower_assumptions_ok"] = lb.assumptions_ok;

  const std::string out = opt.get_string("out", "");
  if (!out.empty()) io::write_file(out + ".csv", theory_curve_csv(curve));
  write_or_print(out, ".json", summary.dump(2) + "\n");
  if (!out.empty()) std::cout << "wrote " << out << ".csv, " << out << ".json\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partially labeled block model toolkit"};
  app.require_subcommand(1);

  CommonFlags gen_flags, tree_flags, recover_flags, sweep_flags, blog_flags,
      theory_flags;
  CLI::App* cmd_gen = app.add_subcommand("gen", "generate a planted graph");
  gen_flags.attach(cmd_gen);
  CLI::App* cmd_tree = app.add_subcommand("tree-sim", "sample root decisions on trees");
  tree_flags.attach(cmd_tree);
  CLI::App* cmd_recover = app.add_subcommand("recover", "label a graph from files");
  recover_flags.attach(cmd_recover);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "error vs snr across the boundary");
  sweep_flags.attach(cmd_sweep);
  CLI::App* cmd_blog = app.add_subcommand("polblogs", "blog-network reveal study");
  blog_flags.attach(cmd_blog);
  CLI::App* cmd_theory = app.add_subcommand("theory", "moment curves and bounds");
  theory_flags.attach(cmd_theory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen_flags.resolve());
    if (cmd_tree->parsed()) return run_tree_sim(tree_flags.resolve());
    if (cmd_recover->parsed()) return run_recover(recover_flags.resolve());
    if (cmd_sweep->parsed()) return run_sweep_cmd(sweep_flags.resolve());
    if (cmd_blog->parsed()) return run_blog(blog_flags.resolve());
    if (cmd_theory->parsed()) return run_theory(theory_flags.resolve());
  } catch (const DatasetMissingError& e) {
    std::cerr << "skip: " << e.what() << "\n";
    return kExitDatasetMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
