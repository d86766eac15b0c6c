#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "psbm/model.hpp"

namespace psbm::io {

// Shortest decimal form that round-trips the exact double (%.17g).
std::string format_double(double x);

bool file_exists(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Edge lists: one "u v" line per edge, canonical form sorted with u < v.
// '#' and '%' lines are comments; blank lines are skipped. Parse errors
// throw std::runtime_error naming the 1-based line number.
std::string edge_list_to_string(const LabeledGraph& graph);
std::vector<std::pair<int, int>> parse_edge_list(const std::string& text);

// Labels sidecar: "node label" or "node label revealed_flag" lines, same
// comment rules. The writer always emits the three-column form.
struct LabelRow {
  int node = 0;
  int label = 0;
  int revealed = 0;
};
std::string labels_to_string(const LabeledGraph& graph);
std::vector<LabelRow> parse_labels(const std::string& text);

// Flat "key = value" configuration lines ('#' comments); later keys win.
std::map<std::string, std::string> parse_config(const std::string& text);
std::map<std::string, std::string> read_config(const std::string& path);

// Strict round-trip of a LabeledGraph through the two text formats: every
// node labeled exactly once, edges in range, no self-loops or duplicates.
void write_graph(const LabeledGraph& graph, const std::string& edge_path,
                 const std::string& labels_path);
LabeledGraph read_graph(const std::string& edge_path,
                        const std::string& labels_path);

}  // namespace psbm::io
