#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "psbm/io.hpp"
#include "psbm/model.hpp"

using psbm::io::file_exists;
using psbm::io::read_file;
using psbm::io::write_file;

namespace {

int run_cli(const std::string& args, const std::string& stdout_path = "cli_out.txt",
            const std::string& stderr_path = "cli_err.txt") {
  const std::string cmd = std::string("\"") + PSBM_CLI_PATH + "\" " + args + " > " +
                          stdout_path + " 2> " + stderr_path;
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("gen --help") == 0);
  CHECK(run_cli("") == 2);                  // a subcommand is required
  CHECK(run_cli("frobnicate") == 2);        // unknown subcommand
  CHECK(run_cli("gen --no-such-flag") == 2);
  CHECK(run_cli("recover") == 2);           // missing edges=/labels=
  CHECK(run_cli("sweep --snr-grid abc") == 2);
  const std::string err = read_file("cli_err.txt");
  CHECK(err.rfind("error:", 0) == 0);
}

TEST_CASE("gen writes a loadable graph triple") {
  CHECK(run_cli("gen --seed 5 --out cli_gen --delta 0.2") == 0);
  REQUIRE(file_exists("cli_gen.edges"));
  REQUIRE(file_exists("cli_gen.labels"));
  REQUIRE(file_exists("cli_gen.json"));
  const psbm::LabeledGraph g = psbm::io::read_graph("cli_gen.edges", "cli_gen.labels");
  CHECK(g.n == 1000);
  CHECK(g.k == 2);
  const std::string summary = read_file("cli_gen.json");
  CHECK(summary.find("\"snr\"") != std::string::npos);
  CHECK(summary.find("\"coupling_depth\"") != std::string::npos);
}

TEST_CASE("gen prints json when no output prefix is given") {
  CHECK(run_cli("gen --seed 5") == 0);
  const std::string out = read_file("cli_out.txt");
  CHECK(out.rfind("{", 0) == 0);
  CHECK(out.find("\"alpha\"") != std::string::npos);
}

TEST_CASE("tree-sim writes samples and a summary") {
  CHECK(run_cli("tree-sim --replicates 40 --depth 2 --seed 3 --out cli_ts") == 0);
  REQUIRE(file_exists("cli_ts.csv"));
  const std::string csv = read_file("cli_ts.csv");
  CHECK(csv.rfind("sample,root_label,decision,message_magnitude\n", 0) == 0);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 41);
  const std::string summary = read_file("cli_ts.json");
  CHECK(summary.find("\"error_rate\"") != std::string::npos);
  CHECK(summary.find("\"theory_upper\"") != std::string::npos);
}

TEST_CASE("recover runs end to end from files") {
  REQUIRE(run_cli("gen --seed 11 --out cli_rec_graph") == 0);
  write_file("cli_rec.cfg",
             "edges = cli_rec_graph.edges\n"
             "labels = cli_rec_graph.labels\n"
             "depth = 2\n");
  CHECK(run_cli("recover --config cli_rec.cfg --out cli_rec") == 0);
  const std::string summary = read_file("cli_rec.json");
  CHECK(summary.find("\"misclassification_rate\"") != std::string::npos);
  const std::string csv = read_file("cli_rec.csv");
  CHECK(csv.rfind("node,decision,truth,confidence,no_information\n", 0) == 0);
}

TEST_CASE("sweep honors config file with flag overrides") {
  write_file("cli_sweep.cfg",
             "n = 200\n"
             "delta = 0.1\n"
             "edge_density_sum = 0.04\n"
             "replicates = 1\n"
             "depth = 2\n"
             "snr_grid = 9.9\n");
  CHECK(run_cli("sweep --config cli_sweep.cfg --snr-grid 0.5,2 --out cli_sweep") == 0);
  const std::string csv = read_file("cli_sweep.csv");
  CHECK(csv.rfind("snr,p,q,theta,d,alpha,", 0) == 0);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 3);  // header + the two flag-provided grid points
  CHECK(csv.find("9.9") == std::string::npos);
}

TEST_CASE("theory emits curve and bounds") {
  CHECK(run_cli("theory --depth 6 --out cli_theory") == 0);
  const std::string csv = read_file("cli_theory.csv");
  CHECK(csv.rfind("t,mu,sigma2,eps,upper_bound\n", 0) == 0);
  const std::string summary = read_file("cli_theory.json");
  CHECK(summary.find("\"minimax_error_lb\"") != std::string::npos);
  CHECK(summary.find("\"regime\"") != std::string::npos);
}

TEST_CASE("missing dataset is a skip, not an error") {
  write_file("cli_blog.cfg",
             "edges = cli_no_such_dataset.txt\n"
             "labels = cli_no_such_labels.txt\n"
             "replicates = 1\n");
  CHECK(run_cli("polblogs --config cli_blog.cfg") == 3);
  const std::string err = read_file("cli_err.txt");
  CHECK(err.rfind("skip:", 0) == 0);
}
