#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "delaynet/graph.hpp"
#include "delaynet/pattern.hpp"

namespace delaynet {

// Strictness tolerance for Hurwitz tests on pattern eigenvalues.
inline constexpr double kHurwitzTol = 1e-12;
// Absolute tolerance when comparing a delay against a margin boundary.
inline constexpr double kBoundaryTol = 1e-9;

// The margin formulas require a cross spectral radius strictly below 1; a
// radius within eigensolver noise of 1 (the marginal-pattern band) is refused
// rather than fed into the formulas.
inline bool sub_unit_radius(const PatternSpectrum& s) {
  return s.mu_max_abs < 1.0 - kBoundaryTol;
}

struct DelayPair {
  double tau1 = 0.0;  // intra-layer delay, seconds
  double tau2 = 0.0;  // cross-layer delay, seconds
};

inline void validate(const DelayPair& d) {
  if (!std::isfinite(d.tau1) || !std::isfinite(d.tau2) || d.tau1 < 0.0 ||
      d.tau2 < 0.0)
    throw Error("delays must be finite and non-negative");
}

enum class Verdict {
  ConsensusGuaranteed,
  UnstableGuaranteed,
  MarginalBoundary,
  OutsideTheory,
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ConsensusGuaranteed: return "ConsensusGuaranteed";
    case Verdict::UnstableGuaranteed: return "UnstableGuaranteed";
    case Verdict::MarginalBoundary: return "MarginalBoundary";
    case Verdict::OutsideTheory: return "OutsideTheory";
  }
  return "?";
}

// Every applicable delay margin for one (graph spectrum, pattern spectrum)
// pair, plus the regime verdict for a concrete delay pair. A margin is absent
// whenever the hypotheses behind its formula do not hold.
struct MarginReport {
  std::optional<double> tau_max;             // exact equal-delay boundary
  std::optional<double> tau_max_over_sqrt2;  // pair-delay sufficient bound (i)
  std::optional<double> tau_prime_max;       // pair-delay sufficient bound (ii)
  std::optional<double> tau_intra_only;      // cross-delay-free sufficient bound
  std::optional<double> tau_two_layer;       // two-layer specialization bound
  bool two_layer_pair_rule = false;  // tau_two_layer also covers tau1<=tau2
  bool tau1_zero_always = false;     // consensus for any tau2 when tau1 = 0
  bool hurwitz_delay_free = false;
  double mu_max_abs = 0.0;
  std::optional<Verdict> verdict;
  std::string justification;
};

// Delay-free consensus holds exactly when every pattern eigenvalue 1 + mu_k
// has positive real part.
inline bool delay_free_consensus(const PatternSpectrum& s) {
  for (const auto& m : s.mu)
    if (!(1.0 + m.real() > kHurwitzTol)) return false;
  return true;
}

inline bool delay_free_consensus(const InteractionPattern& p) {
  return delay_free_consensus(cross_spectrum(p));
}

// Exact boundary for tau1 = tau2: below it consensus, above it instability.
inline double margin_equal_delays(double lambda_max, const PatternSpectrum& s) {
  if (!(lambda_max > 0.0)) throw Error("lambda_max must be positive");
  if (!sub_unit_radius(s))
    throw HypothesisViolated("cross spectral radius must be below 1");
  return s.c / (lambda_max * s.zeta_max);
}

// Sufficient bounds for 0 <= tau1 <= tau2: consensus below the larger one.
inline std::pair<double, double> margin_unequal_delays(double lambda_max,
                                                       const PatternSpectrum& s) {
  const double tm = margin_equal_delays(lambda_max, s);
  return {tm / std::numbers::sqrt2, s.c / (lambda_max * s.zeta_prime_max)};
}

// Sufficient bound on tau1 when tau2 = 0; requires Re(mu_k) >= 0 for all k.
inline double margin_intra_only(double lambda_max, const PatternSpectrum& s) {
  if (!(lambda_max > 0.0)) throw Error("lambda_max must be positive");
  if (!sub_unit_radius(s))
    throw HypothesisViolated("cross spectral radius must be below 1");
  for (const auto& m : s.mu)
    if (m.real() < -kHurwitzTol)
      throw HypothesisViolated(
          "cross eigenvalue with negative real part; bound not applicable");
  return std::numbers::pi / (2.0 * lambda_max * (1.0 + s.b_max));
}

// Classifies a (graph, pattern, delays) instance. First matching rule wins;
// exact results are preferred over sufficient ones, and OutsideTheory is an
// honest "no claim", never a stability assertion.
inline MarginReport classify(const LaplacianSpectrum& gs, const PatternSpectrum& s,
                             const DelayPair& delays,
                             double boundary_tol = kBoundaryTol) {
  validate(delays);
  if (!(gs.lambda2 > kZeroEigTol)) throw DisconnectedGraph();

  MarginReport r;
  r.mu_max_abs = s.mu_max_abs;
  r.hurwitz_delay_free = delay_free_consensus(s);

  const bool sub_unit = sub_unit_radius(s);
  if (sub_unit) {
    r.tau_max = margin_equal_delays(gs.lambda_max, s);
    const auto pair = margin_unequal_delays(gs.lambda_max, s);
    r.tau_max_over_sqrt2 = pair.first;
    r.tau_prime_max = pair.second;
    bool re_nonneg = true;
    for (const auto& m : s.mu) re_nonneg = re_nonneg && m.real() >= -kHurwitzTol;
    if (re_nonneg) r.tau_intra_only = margin_intra_only(gs.lambda_max, s);
    r.tau1_zero_always = true;
  }

  const double t1 = delays.tau1, t2 = delays.tau2;
  auto decide = [&r](Verdict v, const char* why) {
    r.verdict = v;
    r.justification = why;
  };

  if (s.mu_max_abs >= 1.0 + boundary_tol && !r.hurwitz_delay_free) {
    decide(Verdict::UnstableGuaranteed, "delay-free-instability");
  } else if (t1 == 0.0 && t2 == 0.0) {
    decide(r.hurwitz_delay_free ? Verdict::ConsensusGuaranteed
                                : Verdict::UnstableGuaranteed,
           "delay-free-exact");
  } else if (sub_unit && t1 == 0.0) {
    decide(Verdict::ConsensusGuaranteed, "intra-delay-free");
  } else if (sub_unit && t2 == 0.0 && r.tau_intra_only &&
             t1 < *r.tau_intra_only) {
    decide(Verdict::ConsensusGuaranteed, "cross-delay-free-bound");
  } else if (sub_unit && t1 == t2) {
    if (std::abs(t1 - *r.tau_max) <= boundary_tol)
      decide(Verdict::MarginalBoundary, "equal-delay-margin");
    else if (t1 < *r.tau_max)
      decide(Verdict::ConsensusGuaranteed, "equal-delay-margin");
    else
      decide(Verdict::UnstableGuaranteed, "equal-delay-margin");
  } else if (sub_unit && t1 <= t2 &&
             t2 < std::max(*r.tau_max_over_sqrt2, *r.tau_prime_max)) {
    decide(Verdict::ConsensusGuaranteed, "pair-delay-bound");
  } else if (std::abs(s.mu_max_abs - 1.0) <= boundary_tol) {
    decide(Verdict::OutsideTheory,
           "outside-theory: cross spectral radius at unity; simulate");
  } else {
    decide(Verdict::OutsideTheory, "outside-theory");
  }
  return r;
}

// d = 2 specialization: mu = +-sqrt(a12*a21). Reports the closed-form bound
// pi / (2 lambda_max (1 + sqrt|a12*a21|)) alongside the general margins and
// cross-checks it against the general formula it coincides with.
inline MarginReport two_layer_margins(double a12, double a21, double lambda_max) {
  if (!(lambda_max > 0.0)) throw Error("lambda_max must be positive");
  const double prod = a12 * a21;
  if (!(std::abs(prod) < 1.0))
    throw HypothesisViolated("|a12*a21| must be below 1");

  Eigen::MatrixXd a(2, 2);
  a << 1.0, a12, a21, 1.0;
  const PatternSpectrum s = cross_spectrum(build_pattern(a));

  MarginReport r;
  r.mu_max_abs = s.mu_max_abs;
  r.hurwitz_delay_free = delay_free_consensus(s);
  r.tau_max = margin_equal_delays(lambda_max, s);
  const auto pair = margin_unequal_delays(lambda_max, s);
  r.tau_max_over_sqrt2 = pair.first;
  r.tau_prime_max = pair.second;
  if (prod <= 0.0) r.tau_intra_only = margin_intra_only(lambda_max, s);
  r.tau1_zero_always = true;

  const double bound =
      std::numbers::pi / (2.0 * lambda_max * (1.0 + std::sqrt(std::abs(prod))));
  r.tau_two_layer = bound;
  r.two_layer_pair_rule = prod < 0.0;

  // The specialization must reproduce the general-path value it shares:
  // real eigenvalues (prod > 0) match the equal-delay boundary, imaginary
  // ones (prod < 0) match the cross-delay-free bound.
  const double general = prod > 0.0 ? *r.tau_max : *r.tau_intra_only;
  if (std::abs(bound - general) > 1e-9)
    throw Error("two-layer margin disagrees with the general path");
  r.justification = "two-layer-specialization";
  return r;
}

}  // namespace delaynet
