#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "delaynet/errors.hpp"

namespace delaynet {

// Absolute tolerance for treating a Laplacian eigenvalue as zero; also the
// connectivity/spectrum cross-check tolerance.
inline constexpr double kZeroEigTol = 1e-9;

// Undirected simple graph on n >= 2 vertices, 0-based internally (1-based in
// I/O). Edges are stored as (min,max) pairs, sorted and deduplicated.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

inline Graph build_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 2) throw TooFewAgents(n);
  Graph g;
  g.n = n;
  g.edges.reserve(edges.size());
  for (auto [i, j] : edges) {
    if (i < 0 || i >= n) throw IndexOutOfRange(i, n);
    if (j < 0 || j >= n) throw IndexOutOfRange(j, n);
    if (i == j) throw SelfLoop(i);
    g.edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

// Named families accepted in config files.
inline Graph graph_family(const std::string& family, int n) {
  std::vector<std::pair<int, int>> e;
  if (family == "cycle") {
    if (n < 3) throw Error("cycle family needs n >= 3");
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  } else if (family == "path") {
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  } else if (family == "complete") {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  } else if (family == "star") {
    for (int i = 1; i < n; ++i) e.emplace_back(0, i);
  } else {
    throw Error("unknown graph family: " + family);
  }
  return build_graph(n, e);
}

inline bool is_connected(const Graph& g) {
  std::vector<std::vector<int>> adj(g.n);
  for (auto [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(g.n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == g.n;
}

// L = diag(W 1) - W with unit edge weights.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(g.n, g.n);
  for (auto [i, j] : g.edges) {
    L(i, j) -= 1.0;
    L(j, i) -= 1.0;
    L(i, i) += 1.0;
    L(j, j) += 1.0;
  }
  return L;
}

struct LaplacianSpectrum {
  std::vector<double> values;  // ascending; values[0] ~ 0
  double lambda2 = 0.0;        // second smallest; > 0 iff connected
  double lambda_max = 0.0;
};

inline LaplacianSpectrum laplacian_spectrum(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(g),
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigenFailure("symmetric eigensolver did not converge");
  LaplacianSpectrum s;
  s.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + g.n);
  std::sort(s.values.begin(), s.values.end());
  s.lambda2 = s.values[1];
  s.lambda_max = s.values.back();

  double trace = 0.0;
  for (double v : s.values) trace += v;
  const double expected = 2.0 * static_cast<double>(g.edges.size());
  if (s.values.front() < -kZeroEigTol || std::abs(s.values.front()) > kZeroEigTol ||
      std::abs(trace - expected) > kZeroEigTol * std::max(1.0, expected))
    throw EigenFailure("Laplacian spectrum failed sanity checks");
  return s;
}

}  // namespace delaynet
