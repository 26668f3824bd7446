#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "delaynet/errors.hpp"

namespace delaynet {

inline constexpr double kUnitDiagTol = 1e-12;

// The d x d interaction weight shared by every edge; unit diagonal.
struct InteractionPattern {
  Eigen::MatrixXd a;
  int dims() const { return static_cast<int>(a.rows()); }
};

inline InteractionPattern build_pattern(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw BadDimension("pattern matrix must be square");
  if (a.rows() < 2) throw BadDimension("pattern needs at least 2 layers");
  if (!a.allFinite()) throw BadDimension("pattern entries must be finite");
  for (int p = 0; p < a.rows(); ++p)
    if (std::abs(a(p, p) - 1.0) > kUnitDiagTol) throw NonUnitDiagonal(p);
  return InteractionPattern{a};
}

// Pattern with its diagonal removed; with a unit diagonal this is a - I.
inline Eigen::MatrixXd cross_matrix(const InteractionPattern& p) {
  Eigen::MatrixXd c = p.a;
  c.diagonal().setZero();
  return c;
}

// Eigenvalues of the cross matrix plus every scalar the delay margins use.
struct PatternSpectrum {
  std::vector<std::complex<double>> mu;    // sorted by (re, im)
  std::vector<std::complex<double>> zeta;  // 1 + mu
  std::vector<double> alpha;               // principal argument of zeta
  double c = 0.0;             // min_k min(|-pi/2 + alpha_k|, |pi/2 + alpha_k|)
  double zeta_max = 0.0;      // max_k |zeta_k|
  double zeta_prime_max = 0.0;  // max_k (1 + |Re mu_k| + |Im mu_k|)
  double b_max = 0.0;         // max_k |Im mu_k|
  double mu_max_abs = 0.0;    // spectral radius of the cross matrix
};

inline PatternSpectrum cross_spectrum(const InteractionPattern& p) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(cross_matrix(p), false);
  if (es.info() != Eigen::Success)
    throw EigenFailure("nonsymmetric eigensolver did not converge");

  PatternSpectrum s;
  const auto& ev = es.eigenvalues();
  s.mu.assign(ev.data(), ev.data() + p.dims());
  std::sort(s.mu.begin(), s.mu.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  constexpr double half_pi = std::numbers::pi / 2.0;
  s.c = half_pi;
  for (const auto& m : s.mu) {
    const std::complex<double> z = 1.0 + m;
    s.zeta.push_back(z);
    const double a = std::arg(z);
    s.alpha.push_back(a);
    s.c = std::min(s.c, std::min(std::abs(-half_pi + a), std::abs(half_pi + a)));
    s.zeta_max = std::max(s.zeta_max, std::abs(z));
    s.zeta_prime_max =
        std::max(s.zeta_prime_max, 1.0 + std::abs(m.real()) + std::abs(m.imag()));
    s.b_max = std::max(s.b_max, std::abs(m.imag()));
    s.mu_max_abs = std::max(s.mu_max_abs, std::abs(m));
  }
  return s;
}

// Row-sum bound: true implies the cross spectral radius is below 1.
inline bool gershgorin_bound(const InteractionPattern& p) {
  return cross_matrix(p).cwiseAbs().rowwise().sum().maxCoeff() < 1.0;
}

}  // namespace delaynet
