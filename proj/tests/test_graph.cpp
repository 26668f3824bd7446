#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "delaynet/graph.hpp"
#include "support/oracles.hpp"

using namespace delaynet;
using Catch::Approx;

namespace {
Graph c4() { return graph_family("cycle", 4); }
Graph p3() { return graph_family("path", 3); }
}  // namespace

TEST_CASE("build_graph normalizes and deduplicates") {
  Graph g = build_graph(4, {{3, 0}, {0, 3}, {1, 0}, {0, 1}});
  REQUIRE(g.n == 4);
  REQUIRE(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 3}});
}

TEST_CASE("build_graph rejects invalid input") {
  CHECK_NOTHROW(build_graph(2, {{0, 1}}));
  CHECK_THROWS_AS(build_graph(1, {}), TooFewAgents);
  CHECK_THROWS_AS(build_graph(3, {{0, 0}}), SelfLoop);
  CHECK_THROWS_AS(build_graph(3, {{0, 3}}), IndexOutOfRange);
  CHECK_THROWS_AS(build_graph(3, {{-1, 2}}), IndexOutOfRange);
}

TEST_CASE("is_connected") {
  CHECK(is_connected(c4()));
  CHECK_FALSE(is_connected(build_graph(4, {{0, 1}, {2, 3}})));
  CHECK_FALSE(is_connected(build_graph(2, {})));
}

TEST_CASE("laplacian matches the degree-minus-adjacency definition") {
  const Eigen::MatrixXd L2 = laplacian(build_graph(2, {{0, 1}}));
  Eigen::MatrixXd want2(2, 2);
  want2 << 1, -1, -1, 1;
  CHECK((L2 - want2).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd L3 = laplacian(p3());
  Eigen::MatrixXd want3(3, 3);
  want3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((L3 - want3).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd L4 = laplacian(c4());
  CHECK(L4.diagonal().isConstant(2.0));
  CHECK(L4.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK(L4.isApprox(L4.transpose()));
}

TEST_CASE("spectra of the reference graphs") {
  const auto s2 = laplacian_spectrum(build_graph(2, {{0, 1}}));
  CHECK(s2.values[0] == Approx(0.0).margin(1e-12));
  CHECK(s2.values[1] == Approx(2.0).margin(1e-12));

  // 4-cycle eigenvalues from the circulant closed form 2 - 2 cos(2 pi k / 4).
  const auto s4 = laplacian_spectrum(c4());
  std::vector<double> want;
  for (int k = 0; k < 4; ++k)
    want.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / 4.0));
  std::sort(want.begin(), want.end());
  for (int k = 0; k < 4; ++k) CHECK(s4.values[k] == Approx(want[k]).margin(1e-9));
  CHECK(s4.lambda_max == Approx(4.0).margin(1e-9));
  CHECK(s4.lambda2 == Approx(2.0).margin(1e-9));

  const auto s3 = laplacian_spectrum(p3());
  CHECK(s3.values[0] == Approx(0.0).margin(1e-9));
  CHECK(s3.values[1] == Approx(1.0).margin(1e-9));
  CHECK(s3.values[2] == Approx(3.0).margin(1e-9));
}

TEST_CASE("graph families") {
  const auto k4 = laplacian_spectrum(graph_family("complete", 4));
  for (int i = 1; i < 4; ++i) CHECK(k4.values[i] == Approx(4.0).margin(1e-9));

  const auto star5 = laplacian_spectrum(graph_family("star", 5));
  CHECK(star5.values[1] == Approx(1.0).margin(1e-9));
  CHECK(star5.lambda_max == Approx(5.0).margin(1e-9));

  CHECK(graph_family("path", 2).edges.size() == 1);
  CHECK_THROWS_AS(graph_family("cycle", 2), Error);
  CHECK_THROWS_AS(graph_family("torus", 4), Error);
}

TEST_CASE("spectrum properties on random graphs") {
  std::mt19937 eng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const Graph g = testsupport::random_graph(eng, 2, 8, 0.4);
    const auto s = laplacian_spectrum(g);

    double sum = 0.0;
    for (double v : s.values) sum += v;
    CHECK(sum == Approx(2.0 * g.edges.size()).margin(1e-9));
    CHECK(s.values.front() >= -1e-9);
    CHECK(std::abs(s.values.front()) <= 1e-9);
    CHECK((s.lambda2 > 1e-9) == is_connected(g));

    const Eigen::MatrixXd L = laplacian(g);
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd v(g.n);
      for (int i = 0; i < g.n; ++i) v[i] = testsupport::uniform(eng, -1.0, 1.0);
      CHECK(v.dot(L * v) >= -1e-9);
    }
  }
}

TEST_CASE("spectrum is invariant under vertex relabeling") {
  std::mt19937 eng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testsupport::random_graph(eng, 3, 8, 0.5);
    std::vector<int> perm(g.n);
    for (int i = 0; i < g.n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), eng);

    std::vector<std::pair<int, int>> relabeled;
    for (auto [i, j] : g.edges) relabeled.emplace_back(perm[i], perm[j]);
    const auto a = laplacian_spectrum(g);
    const auto b = laplacian_spectrum(build_graph(g.n, relabeled));
    for (int k = 0; k < g.n; ++k)
      CHECK(a.values[k] == Approx(b.values[k]).margin(1e-9));
  }
}
