#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "delaynet/parallel.hpp"
#include "delaynet/stability.hpp"

namespace delaynet {

// One scalar factor of the network characteristic function:
//   f(s) = s + lambda e^{-tau1 s} + lambda mu e^{-tau2 s}
// with lambda a nonzero Laplacian eigenvalue and mu a cross eigenvalue.
struct CharInstance {
  double lambda = 1.0;
  std::complex<double> mu;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

inline void validate(const CharInstance& in) {
  if (!(in.lambda > 0.0) || !std::isfinite(in.lambda))
    throw Error("characteristic instance needs lambda > 0");
  if (!std::isfinite(in.tau1) || !std::isfinite(in.tau2) || in.tau1 < 0.0 ||
      in.tau2 < 0.0)
    throw Error("delays must be finite and non-negative");
}

inline std::complex<double> char_value(std::complex<double> s,
                                       const CharInstance& in) {
  return s + in.lambda * std::exp(-in.tau1 * s) +
         in.lambda * in.mu * std::exp(-in.tau2 * s);
}

inline std::complex<double> char_derivative(std::complex<double> s,
                                            const CharInstance& in) {
  return 1.0 - in.tau1 * in.lambda * std::exp(-in.tau1 * s) -
         in.tau2 * in.lambda * in.mu * std::exp(-in.tau2 * s);
}

struct RootScanResult {
  std::vector<double> crossings;  // imaginary-axis crossing frequencies, ascending
  std::vector<std::complex<double>> roots;  // roots located by a rectangle scan
  double rightmost_abscissa = -std::numeric_limits<double>::infinity();
  bool converged = true;
};

namespace detail {

inline constexpr double kRootFTol = 1e-10;      // |f| target for a root
inline constexpr double kCrossingFTol = 1e-8;   // |f(j w)| acceptance for a crossing
inline constexpr double kRootMergeTol = 1e-6;   // roots closer than this merge
inline constexpr int kNewtonMaxIter = 50;

// Damped complex Newton iteration on f; empty when it stagnates.
inline std::optional<std::complex<double>> newton_root(std::complex<double> s,
                                                       const CharInstance& in) {
  double fs = std::abs(char_value(s, in));
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    if (fs < kRootFTol) return s;
    const std::complex<double> d = char_derivative(s, in);
    if (std::abs(d) < 1e-300) return std::nullopt;
    const std::complex<double> full = char_value(s, in) / d;
    double damp = 1.0;
    bool moved = false;
    for (int h = 0; h < 30; ++h) {
      const std::complex<double> cand = s - damp * full;
      const double fc = std::abs(char_value(cand, in));
      if (fc < fs) {
        s = cand;
        fs = fc;
        moved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!moved) return std::nullopt;
  }
  return fs < kRootFTol ? std::optional<std::complex<double>>(s) : std::nullopt;
}

// Golden-section minimization of |f(j w)| on [lo, hi].
inline double minimize_on_axis(double lo, double hi, const CharInstance& in) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = std::abs(char_value({0.0, x1}, in));
  double f2 = std::abs(char_value({0.0, x2}, in));
  for (int it = 0; it < 90 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = std::abs(char_value({0.0, x1}, in));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = std::abs(char_value({0.0, x2}, in));
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace detail

// Scans |f(j w)| over [-omega_max, omega_max] on a 4001-point grid, then
// refines every local minimum; frequencies with |f| below the crossing
// tolerance are reported as imaginary-axis crossings.
inline RootScanResult imag_axis_crossings(const CharInstance& in,
                                          double omega_max) {
  validate(in);
  if (!(omega_max > 0.0)) throw Error("omega_max must be positive");

  constexpr int kHalfPoints = 2000;
  const double step = omega_max / kHalfPoints;
  std::vector<double> g(2 * kHalfPoints + 1);
  for (int k = 0; k < static_cast<int>(g.size()); ++k)
    g[k] = std::abs(char_value({0.0, -omega_max + k * step}, in));

  RootScanResult res;
  for (int k = 1; k + 1 < static_cast<int>(g.size()); ++k) {
    if (g[k] > g[k - 1] || g[k] > g[k + 1]) continue;
    const double lo = -omega_max + (k - 1) * step;
    const double w = detail::minimize_on_axis(lo, lo + 2.0 * step, in);
    if (std::abs(char_value({0.0, w}, in)) < detail::kCrossingFTol)
      res.crossings.push_back(w);
  }
  std::sort(res.crossings.begin(), res.crossings.end());
  res.crossings.erase(std::unique(res.crossings.begin(), res.crossings.end(),
                                  [](double a, double b) {
                                    return std::abs(a - b) <
                                           detail::kRootMergeTol;
                                  }),
                      res.crossings.end());
  for (double w : res.crossings) res.roots.emplace_back(0.0, w);
  res.rightmost_abscissa = res.crossings.empty()
                               ? -std::numeric_limits<double>::infinity()
                               : 0.0;
  return res;
}

inline std::pair<double, double> default_sigma_range(const CharInstance& in) {
  const double r = 2.0 * in.lambda * (1.0 + std::abs(in.mu));
  return {-r, r};
}

// Coarse grid on the rectangle sigma_range x [-wb, wb] with
// wb = 1.1 lambda (1 + |mu|), Newton refinement from every local minimum of
// |f|, deduplication, and the maximal real part of the roots found. Returns
// -inf as rightmost_abscissa when no root lies in the rectangle.
inline RootScanResult scan_rectangle(const CharInstance& in,
                                     std::pair<double, double> sigma_range) {
  validate(in);
  if (!(sigma_range.first < sigma_range.second))
    throw Error("sigma_range must be ordered");

  const double wb = 1.1 * in.lambda * (1.0 + std::abs(in.mu));
  constexpr int kNs = 121, kNw = 241;
  const double slo = sigma_range.first, shi = sigma_range.second;
  const double ds = (shi - slo) / (kNs - 1);
  const double dw = 2.0 * wb / (kNw - 1);

  std::vector<double> g(static_cast<std::size_t>(kNs) * kNw);
  auto at = [&](int i, int j) -> double& {
    return g[static_cast<std::size_t>(i) * kNw + j];
  };
  for (int i = 0; i < kNs; ++i)
    for (int j = 0; j < kNw; ++j)
      at(i, j) = std::abs(char_value({slo + i * ds, -wb + j * dw}, in));

  RootScanResult res;
  int attempts = 0, failures = 0;
  auto consider = [&](int i, int j) {
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || ii >= kNs || jj < 0 || jj >= kNw) continue;
        if (at(ii, jj) < at(i, j)) return;
      }
    ++attempts;
    const auto root =
        detail::newton_root({slo + i * ds, -wb + j * dw}, in);
    if (!root) {
      ++failures;
      return;
    }
    if (root->real() < slo - detail::kRootMergeTol ||
        root->real() > shi + detail::kRootMergeTol ||
        std::abs(root->imag()) > wb + detail::kRootMergeTol)
      return;
    for (const auto& r : res.roots)
      if (std::abs(r - *root) < detail::kRootMergeTol) return;
    res.roots.push_back(*root);
  };
  for (int i = 0; i < kNs; ++i)
    for (int j = 0; j < kNw; ++j) consider(i, j);

  res.converged = failures == 0;
  if (res.roots.empty() && attempts > 0 && failures == attempts)
    throw NoConvergence("rectangle scan: no candidate minimum refined");
  for (const auto& r : res.roots)
    res.rightmost_abscissa = std::max(res.rightmost_abscissa, r.real());
  return res;
}

inline double rightmost_abscissa(const CharInstance& in,
                                 std::pair<double, double> sigma_range) {
  return scan_rectangle(in, sigma_range).rightmost_abscissa;
}

inline double rightmost_abscissa(const CharInstance& in) {
  return rightmost_abscissa(in, default_sigma_range(in));
}

// Stability threshold used by the network-level oracle.
inline constexpr double kOracleStableTol = 1e-6;

struct OracleInstance {
  double lambda = 0.0;
  std::complex<double> mu;
  double rightmost = -std::numeric_limits<double>::infinity();
};

struct NetworkOracle {
  double rightmost = -std::numeric_limits<double>::infinity();
  bool stable = false;
  bool converged = true;
  std::vector<OracleInstance> instances;
};

// Scans every (lambda_i, mu_k) factor (deduplicated; conjugate mu share a
// rightmost root) and reports the network-level rightmost abscissa.
inline NetworkOracle network_rightmost_scan(const LaplacianSpectrum& gs,
                                            const PatternSpectrum& ps,
                                            const DelayPair& delays,
                                            unsigned nthreads = 0) {
  validate(delays);
  if (!(gs.lambda2 > kZeroEigTol)) throw DisconnectedGraph();

  std::vector<double> lambdas;
  for (double v : gs.values) {
    if (v <= kZeroEigTol) continue;
    if (lambdas.empty() || v - lambdas.back() > 1e-12) lambdas.push_back(v);
  }
  std::vector<std::complex<double>> mus;
  for (const auto& m : ps.mu) {
    const std::complex<double> key(m.real(), std::abs(m.imag()));
    bool dup = false;
    for (const auto& k : mus) dup = dup || std::abs(k - key) <= 1e-12;
    if (!dup) mus.push_back(key);
  }

  NetworkOracle out;
  for (double l : lambdas)
    for (const auto& m : mus) out.instances.push_back({l, m, 0.0});

  std::vector<bool> conv(out.instances.size(), true);
  parallel_for(
      out.instances.size(),
      [&](std::size_t k) {
        auto& inst = out.instances[k];
        CharInstance ci{inst.lambda, inst.mu, delays.tau1, delays.tau2};
        const auto scan = scan_rectangle(ci, default_sigma_range(ci));
        inst.rightmost = scan.rightmost_abscissa;
        conv[k] = scan.converged;
      },
      nthreads);

  for (std::size_t k = 0; k < out.instances.size(); ++k) {
    out.rightmost = std::max(out.rightmost, out.instances[k].rightmost);
    out.converged = out.converged && conv[k];
  }
  out.stable = out.rightmost < -kOracleStableTol;
  return out;
}

inline bool network_stable_oracle(const LaplacianSpectrum& gs,
                                  const PatternSpectrum& ps,
                                  const DelayPair& delays) {
  return network_rightmost_scan(gs, ps, delays).stable;
}

// CSV dump (omega, |f(j omega)|) for plotting.
inline void axis_scan_csv(std::ostream& os, const CharInstance& in,
                          double omega_max, int points = 2001) {
  validate(in);
  os << "omega,abs_f\n";
  char buf[80];
  for (int k = 0; k < points; ++k) {
    const double w = -omega_max + 2.0 * omega_max * k / (points - 1);
    const double a = std::abs(char_value({0.0, w}, in));
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", w, a);
    os << buf;
  }
}

}  // namespace delaynet
