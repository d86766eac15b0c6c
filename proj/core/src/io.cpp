#include "psbm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psbm::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_comment_or_blank(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t[0] == '#' || t[0] == '%';
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

// Applies fn(line_no, trimmed_line) to every non-comment line.
template <typename Fn>
void for_each_data_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    fn(line_no, trim(line));
  }
}

std::vector<long> parse_ints(std::size_t line_no, const std::string& line,
                             std::size_t min_fields, std::size_t max_fields) {
  std::istringstream in(line);
  std::vector<long> out;
  long v = 0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) parse_fail(line_no, "expected integers, got \"" + line + "\"");
  if (out.size() < min_fields || out.size() > max_fields) {
    parse_fail(line_no, "expected " + std::to_string(min_fields) +
                            (max_fields != min_fields
                                 ? ".." + std::to_string(max_fields)
                                 : "") +
                            " fields, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool file_exists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed on " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed on " + path);
}

std::string edge_list_to_string(const LabeledGraph& graph) {
  std::string out;
  for (int u = 0; u < graph.n; ++u) {
    for (int w : graph.adj[static_cast<std::size_t>(u)]) {
      if (w <= u) continue;
      out += std::to_string(u);
      out += ' ';
      out += std::to_string(w);
      out += '\n';
    }
  }
  return out;
}

std::vector<std::pair<int, int>> parse_edge_list(const std::string& text) {
  std::vector<std::pair<int, int>> edges;
  for_each_data_line(text, [&](std::size_t line_no, const std::string& line) {
    const auto f = parse_ints(line_no, line, 2, 2);
    if (f[0] < 0 || f[1] < 0) parse_fail(line_no, "negative node id");
    edges.emplace_back(static_cast<int>(f[0]), static_cast<int>(f[1]));
  });
  return edges;
}

std::string labels_to_string(const LabeledGraph& graph) {
  std::string out;
  for (int v = 0; v < graph.n; ++v) {
    out += std::to_string(v);
    out += ' ';
    out += std::to_string(graph.truth[static_cast<std::size_t>(v)]);
    out += ' ';
    out += graph.revealed[static_cast<std::size_t>(v)] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<LabelRow> parse_labels(const std::string& text) {
  std::vector<LabelRow> rows;
  for_each_data_line(text, [&](std::size_t line_no, const std::string& line) {
    const auto f = parse_ints(line_no, line, 2, 3);
    if (f[0] < 0) parse_fail(line_no, "negative node id");
    if (f[1] < 0) parse_fail(line_no, "negative label");
    LabelRow row;
    row.node = static_cast<int>(f[0]);
    row.label = static_cast<int>(f[1]);
    row.revealed = f.size() == 3 ? static_cast<int>(f[2]) : 0;
    if (row.revealed != 0 && row.revealed != 1) {
      parse_fail(line_no, "revealed flag must be 0 or 1");
    }
    rows.push_back(row);
  });
  return rows;
}

std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  for_each_data_line(text, [&](std::size_t line_no, const std::string& line) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_fail(line_no, "empty key");
    kv[key] = value;
  });
  return kv;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  try {
    return parse_config(read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_graph(const LabeledGraph& graph, const std::string& edge_path,
                 const std::string& labels_path) {
  write_file(edge_path, edge_list_to_string(graph));
  write_file(labels_path, labels_to_string(graph));
}

LabeledGraph read_graph(const std::string& edge_path,
                        const std::string& labels_path) {
  const auto rows = parse_labels(read_file(labels_path));
  LabeledGraph g;
  g.n = static_cast<int>(rows.size());
  g.truth.assign(static_cast<std::size_t>(g.n), -1);
  g.revealed.assign(static_cast<std::size_t>(g.n), 0);
  int max_label = 0;
  for (const auto& row : rows) {
    if (row.node >= g.n) {
      throw std::runtime_error(labels_path + ": node " + std::to_string(row.node) +
                               " outside 0.." + std::to_string(g.n - 1));
    }
    if (g.truth[static_cast<std::size_t>(row.node)] != -1) {
      throw std::runtime_error(labels_path + ": node " + std::to_string(row.node) +
                               " labeled twice");
    }
    g.truth[static_cast<std::size_t>(row.node)] = row.label;
    g.revealed[static_cast<std::size_t>(row.node)] = static_cast<std::uint8_t>(row.revealed);
    max_label = std::max(max_label, row.label);
  }
  g.k = std::max(2, max_label + 1);
  g.adj.assign(static_cast<std::size_t>(g.n), {});

  const auto edges = parse_edge_list(read_file(edge_path));
  for (const auto& [u, w] : edges) {
    if (u >= g.n || w >= g.n) {
      throw std::runtime_error(edge_path + ": edge (" + std::to_string(u) + "," +
                               std::to_string(w) + ") outside node range");
    }
    if (u == w) {
      throw std::runtime_error(edge_path + ": self-loop at " + std::to_string(u));
    }
    g.adj[static_cast<std::size_t>(u)].push_back(w);
    g.adj[static_cast<std::size_t>(w)].push_back(u);
  }
  for (auto& nbrs : g.adj) {
    std::sort(nbrs.begin(), nbrs.end());
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
      throw std::runtime_error(edge_path + ": duplicate edge");
    }
  }
  return g;
}

}  // namespace psbm::io
