#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "delaynet/quasipoly.hpp"
#include "support/oracles.hpp"

using namespace delaynet;
using Catch::Approx;

namespace {

const double kSqrtHalf = std::sqrt(0.5);
constexpr double kTauMaxRef = 0.230037796128;  // equal-delay boundary, ref case
constexpr double kOmegaStar = 6.82842712475;   // lambda_max * zeta_max

InteractionPattern make2(double a12, double a21) {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, a12, a21, 1.0;
  return build_pattern(a);
}

}  // namespace

TEST_CASE("char_value") {
  const CharInstance in{4.0, {kSqrtHalf, 0.0}, 1.0, 2.0};
  CHECK(std::abs(char_value({0.0, 0.0}, in) -
                 std::complex<double>(4.0 * (1.0 + kSqrtHalf), 0.0)) < 1e-9);

  // At the equal-delay boundary the purely imaginary crossing point is a root.
  const CharInstance margin{4.0, {kSqrtHalf, 0.0}, kTauMaxRef, kTauMaxRef};
  CHECK(std::abs(char_value({0.0, kOmegaStar}, margin)) < 1e-6);

  // Delay-free root in closed form.
  const CharInstance free0{4.0, {kSqrtHalf, 0.0}, 0.0, 0.0};
  CHECK(std::abs(char_value({-4.0 * (1.0 + kSqrtHalf), 0.0}, free0)) < 1e-12);
}

TEST_CASE("imaginary-axis crossings") {
  SECTION("no intra delay, any cross delay: no crossing") {
    for (double tau2 : {0.5, 2.0, 10.0}) {
      const CharInstance in{4.0, {kSqrtHalf, 0.0}, 0.0, tau2};
      const auto res = imag_axis_crossings(in, 12.0);
      CHECK(res.crossings.empty());
      CHECK(res.converged);
    }
  }
  SECTION("equal delays at the boundary cross at +-omega*") {
    const CharInstance in{4.0, {kSqrtHalf, 0.0}, kTauMaxRef, kTauMaxRef};
    const auto res = imag_axis_crossings(in, 10.0);
    REQUIRE(res.crossings.size() == 2);
    CHECK(res.crossings[0] == Approx(-kOmegaStar).margin(1e-6));
    CHECK(res.crossings[1] == Approx(kOmegaStar).margin(1e-6));
    for (double w : res.crossings)
      CHECK(std::abs(char_value({0.0, w}, in)) < 1e-8);
    CHECK(res.rightmost_abscissa == 0.0);
  }
  SECTION("equal delays inside the margin: no crossing") {
    const CharInstance in{4.0, {kSqrtHalf, 0.0}, 0.1, 0.1};
    CHECK(imag_axis_crossings(in, 10.0).crossings.empty());
  }
}

TEST_CASE("crossings of conjugate eigenvalues mirror each other") {
  std::mt19937 eng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::complex<double> mu(testsupport::uniform(eng, -0.9, 0.9),
                                  testsupport::uniform(eng, 0.05, 0.9));
    const double lam = testsupport::uniform(eng, 1.0, 5.0);
    const double tau = testsupport::uniform(eng, 0.05, 0.6);
    const CharInstance a{lam, mu, tau, tau};
    const CharInstance b{lam, std::conj(mu), tau, tau};

    // f with conj(mu), evaluated at conj(s), equals conj(f(s)).
    for (int k = 0; k < 20; ++k) {
      const std::complex<double> s(testsupport::uniform(eng, -3.0, 3.0),
                                   testsupport::uniform(eng, -8.0, 8.0));
      CHECK(std::abs(char_value(std::conj(s), b) -
                     std::conj(char_value(s, a))) < 1e-12);
    }

    const double wmax = 2.0 * lam * (1.0 + std::abs(mu));
    const auto ra = imag_axis_crossings(a, wmax);
    const auto rb = imag_axis_crossings(b, wmax);
    REQUIRE(ra.crossings.size() == rb.crossings.size());
    for (std::size_t k = 0; k < ra.crossings.size(); ++k)
      CHECK(ra.crossings[k] ==
            Approx(-rb.crossings[rb.crossings.size() - 1 - k]).margin(1e-6));
  }
}

TEST_CASE("rightmost abscissa") {
  SECTION("delay-free closed form") {
    const CharInstance in{4.0, {kSqrtHalf, 0.0}, 0.0, 0.0};
    CHECK(rightmost_abscissa(in) ==
          Approx(-4.0 * (1.0 + kSqrtHalf)).margin(1e-9));
  }
  SECTION("marginal equal delays sit on the axis") {
    const CharInstance in{4.0, {kSqrtHalf, 0.0}, kTauMaxRef, kTauMaxRef};
    CHECK(std::abs(rightmost_abscissa(in)) < 1e-4);
  }
  SECTION("beyond the margin a right-half-plane root appears") {
    const CharInstance in{4.0, {kSqrtHalf, 0.0}, 0.3, 0.3};
    CHECK(rightmost_abscissa(in) > 1e-4);
  }
  SECTION("delay-free reduction on random instances") {
    std::mt19937 eng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const double lam = testsupport::uniform(eng, 0.5, 6.0);
      const std::complex<double> mu(testsupport::uniform(eng, -1.5, 1.5),
                                    testsupport::uniform(eng, -1.5, 1.5));
      const CharInstance in{lam, mu, 0.0, 0.0};
      CHECK(rightmost_abscissa(in) ==
            Approx(-lam * (1.0 + mu.real())).margin(1e-9));
    }
  }
}

TEST_CASE("network oracle on the reference network") {
  const auto gs = laplacian_spectrum(graph_family("cycle", 4));
  const auto ref = cross_spectrum(make2(1.0, 0.5));

  CHECK(network_stable_oracle(gs, ref, {0.0, 10.0}));
  CHECK(network_stable_oracle(gs, ref, {0.2, 0.2}));
  CHECK_FALSE(network_stable_oracle(gs, cross_spectrum(make2(2.0, 1.0)),
                                    {0.0, 2.0}));

  const auto scan = network_rightmost_scan(gs, ref, {0.2, 0.2});
  CHECK(scan.stable);
  CHECK(scan.converged);
  CHECK(scan.rightmost < -kOracleStableTol);
  CHECK(scan.instances.size() == 4);  // lambdas {2,4} x mus {+-sqrt(.5)}
}

TEST_CASE("oracle agrees with the equal-delay boundary") {
  std::mt19937 eng(29);
  int done = 0;
  while (done < 100) {
    const Graph g = testsupport::random_connected_graph(eng, 3, 6);
    const double a12 = testsupport::uniform(eng, -1.4, 1.4);
    const double a21 = testsupport::uniform(eng, -1.4, 1.4);
    if (std::abs(a12 * a21) > 0.9) continue;
    const auto gs = laplacian_spectrum(g);
    const auto ps = cross_spectrum(make2(a12, a21));
    const double tmax = margin_equal_delays(gs.lambda_max, ps);

    // Sample tau away from the 1% band around the boundary.
    const double frac = testsupport::uniform(eng, 0.5, 1.5);
    if (std::abs(frac - 1.0) < 0.01) continue;
    const double tau = frac * tmax;
    CHECK(network_stable_oracle(gs, ps, {tau, tau}) == (tau < tmax));
    ++done;
  }
}

TEST_CASE("axis scan CSV dump") {
  const CharInstance in{4.0, {kSqrtHalf, 0.0}, 0.1, 0.1};
  std::ostringstream os;
  axis_scan_csv(os, in, 8.0, 41);
  const std::string text = os.str();
  CHECK(text.rfind("omega,abs_f\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 42);
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(imag_axis_crossings({0.0, {0.5, 0.0}, 0.1, 0.1}, 5.0), Error);
  CHECK_THROWS_AS(imag_axis_crossings({1.0, {0.5, 0.0}, -0.1, 0.1}, 5.0), Error);
  CHECK_THROWS_AS(imag_axis_crossings({1.0, {0.5, 0.0}, 0.1, 0.1}, -5.0), Error);
  CHECK_THROWS_AS(rightmost_abscissa({1.0, {0.5, 0.0}, 0.1, 0.1}, {2.0, -2.0}),
                  Error);
}
