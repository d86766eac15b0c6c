#include "psbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

namespace psbm {

namespace {

struct Csr {
  std::vector<std::int64_t> offsets;
  std::vector<int> cols;
};

void multiply(const Csr& a, const std::vector<double>& x, std::vector<double>& out) {
  const std::size_t m = x.size();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::int64_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e) {
      acc += x[static_cast<std::size_t>(a.cols[static_cast<std::size_t>(e)])];
    }
    out[i] = acc;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void scale(std::vector<double>& a, double s) {
  for (double& x : a) x *= s;
}

// One eigenpair by power iteration. `deflate` (may be null) is an already
// converged eigenvector to project out each step. Returns iterations used.
int power_iterate(const Csr& a, std::vector<double>& x, double& lambda,
                  double& residual, const std::vector<double>* deflate,
                  double tol, int max_iters) {
  const std::size_t m = x.size();
  std::vector<double> z(m, 0.0);
  int iters = 0;
  residual = 0.0;
  lambda = 0.0;
  while (iters < max_iters) {
    ++iters;
    multiply(a, x, z);
    lambda = dot(x, z);
    double r2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = z[i] - lambda * x[i];
      r2 += d * d;
    }
    residual = std::sqrt(r2);  // ||x|| == 1
    if (residual <= tol) break;
    if (deflate != nullptr) {
      const double c = dot(*deflate, z);
      for (std::size_t i = 0; i < m; ++i) z[i] -= c * (*deflate)[i];
    }
    const double nz = norm(z);
    if (nz == 0.0) {
      // x is in the kernel: it is an exact eigenvector for eigenvalue 0.
      lambda = 0.0;
      residual = 0.0;
      break;
    }
    scale(z, 1.0 / nz);
    x.swap(z);
  }
  return iters;
}

}  // namespace

SpectralResult spectral_partition(const LabeledGraph& graph, int k,
                                  const SpectralConfig& cfg) {
  if (k != 2) throw std::invalid_argument("spectral baseline covers k=2 only");
  if (cfg.max_iterations < 1 || cfg.tolerance <= 0.0) {
    throw std::invalid_argument("bad spectral config");
  }

  SpectralResult out;
  out.eigenvector.assign(static_cast<std::size_t>(graph.n), 0.0);
  out.decision.assign(static_cast<std::size_t>(graph.n), -1);

  // Unrevealed-induced subgraph in CSR form.
  std::vector<int> index(static_cast<std::size_t>(graph.n), -1);
  std::vector<int> nodes;
  for (int v = 0; v < graph.n; ++v) {
    if (!graph.revealed[static_cast<std::size_t>(v)]) {
      index[static_cast<std::size_t>(v)] = static_cast<int>(nodes.size());
      nodes.push_back(v);
    }
  }
  const std::size_t m = nodes.size();
  if (m == 0) {
    out.converged = true;
    return out;
  }

  Csr a;
  a.offsets.assign(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::int64_t deg = 0;
    for (int w : graph.adj[static_cast<std::size_t>(nodes[i])]) {
      deg += index[static_cast<std::size_t>(w)] >= 0;
    }
    a.offsets[i + 1] = a.offsets[i] + deg;
  }
  a.cols.resize(static_cast<std::size_t>(a.offsets[m]));
  for (std::size_t i = 0; i < m; ++i) {
    std::int64_t e = a.offsets[i];
    for (int w : graph.adj[static_cast<std::size_t>(nodes[i])]) {
      const int j = index[static_cast<std::size_t>(w)];
      if (j >= 0) a.cols[static_cast<std::size_t>(e++)] = j;
    }
  }

  auto eng = make_engine(derive(cfg.seed, stream::spectral));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_unit = [&]() {
    std::vector<double> x(m);
    for (double& xi : x) xi = gauss(eng);
    const double nx = norm(x);
    if (nx == 0.0) {
      x.assign(m, 1.0 / std::sqrt(static_cast<double>(m)));
      return x;
    }
    scale(x, 1.0 / nx);
    return x;
  };

  // Leading eigenvector, driven well below the target tolerance so its
  // contamination does not pollute the second vector's residual.
  std::vector<double> v1 = random_unit();
  double lambda1 = 0.0, res1 = 0.0;
  const double tol1 = std::max(cfg.tolerance * 1e-3, 1e-12);
  out.iterations += power_iterate(a, v1, lambda1, res1, nullptr, tol1,
                                  cfg.max_iterations);

  // Second eigenvector via deflation, plus one explicit re-orthogonalization
  // of the start vector. Also driven past the reported tolerance: the sign
  // split below needs the exact-zero block of an indicator-shaped eigenvector
  // to sit well under the zero-class threshold.
  std::vector<double> v2 = random_unit();
  const double c0 = dot(v1, v2);
  for (std::size_t i = 0; i < m; ++i) v2[i] -= c0 * v1[i];
  const double n2 = norm(v2);
  if (n2 > 0.0) scale(v2, 1.0 / n2);
  double lambda2 = 0.0, res2 = 0.0;
  out.iterations += power_iterate(a, v2, lambda2, res2, &v1, tol1,
                                  cfg.max_iterations);

  out.lambda1 = lambda1;
  out.lambda2 = lambda2;
  out.residual = res2;
  out.converged = res2 <= cfg.tolerance;

  // Sign split with a numerical zero class. On a disconnected graph the
  // deflated second eigenvector is a component indicator: strictly one-signed
  // on its support and exactly zero elsewhere in exact arithmetic, so the
  // rounding noise left on the zero block must not be read as sign
  // information. Entries within tau of zero (relative to the largest
  // magnitude) count as zero; a one-signed vector splits into support vs.
  // zero class. Falls back to v1 when v2 does not split (degenerate top
  // eigenvalue can hand the separating direction to either vector).
  std::vector<int> cluster(m, 0);
  auto classify = [m, &cluster](const std::vector<double>& v) {
    double amax = 0.0;
    for (std::size_t i = 0; i < m; ++i) amax = std::max(amax, std::abs(v[i]));
    const double tau = amax * 1e-6;
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < m; ++i) {
      pos += v[i] > tau;
      neg += v[i] < -tau;
    }
    if (pos + neg == 0 || pos == m || neg == m) return false;
    if (pos > 0 && neg > 0) {
      for (std::size_t i = 0; i < m; ++i) cluster[i] = v[i] >= 0.0 ? 0 : 1;
    } else {
      for (std::size_t i = 0; i < m; ++i) cluster[i] = std::abs(v[i]) > tau ? 0 : 1;
    }
    return true;
  };
  const std::vector<double>& part = classify(v2) ? v2 : (classify(v1), v1);

  // Choose the cluster->label pairing that matches the most revealed-neighbor
  // labels. votes[c][l] counts revealed neighbors with truth l adjacent to
  // cluster-c nodes.
  std::int64_t votes[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < m; ++i) {
    const int v = nodes[i];
    out.eigenvector[static_cast<std::size_t>(v)] = part[i];
    for (int w : graph.adj[static_cast<std::size_t>(v)]) {
      if (graph.revealed[static_cast<std::size_t>(w)]) {
        ++votes[cluster[i]][graph.truth[static_cast<std::size_t>(w)]];
      }
    }
  }
  const std::int64_t keep = votes[0][0] + votes[1][1];
  const std::int64_t swap = votes[0][1] + votes[1][0];
  const int cluster0_label = keep >= swap ? 0 : 1;
  for (std::size_t i = 0; i < m; ++i) {
    out.decision[static_cast<std::size_t>(nodes[i])] =
        cluster[i] == 0 ? cluster0_label : 1 - cluster0_label;
  }
  return out;
}

double spectral_error_rate(const SpectralResult& result,
                           const LabeledGraph& graph) {
  std::int64_t total = 0, wrong = 0;
  for (int v = 0; v < graph.n; ++v) {
    if (graph.revealed[static_cast<std::size_t>(v)]) continue;
    ++total;
    wrong += result.decision[static_cast<std::size_t>(v)] !=
             graph.truth[static_cast<std::size_t>(v)];
  }
  return total == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(total);
}

std::string spectral_result_csv(const SpectralResult& result,
                                const LabeledGraph& graph) {
  std::string out = "node,decision,truth,confidence,no_information\n";
  char buf[64];
  for (int v = 0; v < graph.n; ++v) {
    if (graph.revealed[static_cast<std::size_t>(v)]) continue;
    out += std::to_string(v);
    out += ',';
    out += std::to_string(result.decision[static_cast<std::size_t>(v)]);
    out += ',';
    out += std::to_string(graph.truth[static_cast<std::size_t>(v)]);
    out += ',';
    std::snprintf(buf, sizeof(buf), "%.17g",
                  std::abs(result.eigenvector[static_cast<std::size_t>(v)]));
    out += buf;
    out += ",0\n";
  }
  return out;
}

}  // namespace psbm
