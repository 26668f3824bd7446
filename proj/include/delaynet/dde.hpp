#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "delaynet/graph.hpp"
#include "delaynet/pattern.hpp"
#include "delaynet/stability.hpp"

namespace delaynet {

enum class HistoryKind { Constant, LinearToZero };

enum class TrajectoryClass { Converged, Bounded, Diverged };

inline const char* to_string(TrajectoryClass c) {
  switch (c) {
    case TrajectoryClass::Converged: return "Converged";
    case TrajectoryClass::Bounded: return "Bounded";
    case TrajectoryClass::Diverged: return "Diverged";
  }
  return "?";
}

// States are stacked agent-major: entry i*d + q is layer q of agent i.
struct SimConfig {
  Graph graph;
  InteractionPattern pattern;
  DelayPair delays;
  Eigen::VectorXd x0;  // size n*d; empty means "draw from seed"
  double horizon = 30.0;
  double step = 1e-3;
  HistoryKind history = HistoryKind::Constant;
  std::uint32_t seed = 0;
  int record_stride = 1;  // record every k-th integration step
  double divergence_threshold = 1e6;
};

struct Classification {
  TrajectoryClass kind = TrajectoryClass::Bounded;
  Eigen::VectorXd value;  // consensus estimate (size d), Converged only
  double at_time = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  int n = 0, d = 0;
  double step = 0.0;       // integration step actually used
  double record_dt = 0.0;  // spacing of the recorded samples
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> disagreement;
  bool aborted = false;
  double abort_time = std::numeric_limits<double>::quiet_NaN();
  Classification classification;
};

// Uniform in [-5, 5] per coordinate, reproducible across platforms (raw
// engine words, not std::uniform_real_distribution).
inline Eigen::VectorXd random_initial_state(int n, int d, std::uint32_t seed) {
  std::mt19937 eng(seed);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n) * d);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = -5.0 + 10.0 * (static_cast<double>(eng()) / 4294967296.0);
  return x;
}

// Norm of the component orthogonal to the consensus subspace, i.e. of
// (I - (1/n) 1 1^T (x) I_d) state.
inline double disagreement_norm(const Eigen::VectorXd& state, int n, int d) {
  if (state.size() != static_cast<Eigen::Index>(n) * d)
    throw Error("state must have n*d entries");
  double ss = 0.0;
  for (int q = 0; q < d; ++q) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += state[static_cast<Eigen::Index>(i) * d + q];
    mean /= n;
    for (int i = 0; i < n; ++i) {
      const double r = state[static_cast<Eigen::Index>(i) * d + q] - mean;
      ss += r * r;
    }
  }
  return std::sqrt(ss);
}

// Per-layer average of the initial state; with a constant initial history the
// per-layer sums are conserved, so a converging trajectory must settle here.
inline Eigen::VectorXd consensus_value(const Eigen::VectorXd& x0, int n, int d) {
  if (x0.size() != static_cast<Eigen::Index>(n) * d)
    throw Error("state must have n*d entries");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) v += x0.segment(static_cast<Eigen::Index>(i) * d, d);
  return v / n;
}

inline Classification classify_trajectory(const Trajectory& tr, double eps = 1e-6,
                                          double window = 1.0) {
  Classification cl;
  if (tr.aborted) {
    cl.kind = TrajectoryClass::Diverged;
    cl.at_time = tr.abort_time;
    return cl;
  }
  if (tr.disagreement.empty()) return cl;

  // Converged: below eps over the whole final window.
  std::size_t k = tr.disagreement.size();
  while (k > 0 && tr.disagreement[k - 1] < eps) --k;
  if (k < tr.disagreement.size()) {
    const double span = tr.times.back() - tr.times[k];
    if (span >= window - 1e-12) {
      cl.kind = TrajectoryClass::Converged;
      cl.at_time = tr.times[k];
      cl.value = consensus_value(tr.states.back(), tr.n, tr.d);
      return cl;
    }
  }

  const double d0 = tr.disagreement.front();
  if (tr.disagreement.back() > 1e3 * d0) {
    cl.kind = TrajectoryClass::Diverged;
    for (std::size_t i = 0; i < tr.disagreement.size(); ++i)
      if (tr.disagreement[i] > 1e3 * d0) {
        cl.at_time = tr.times[i];
        break;
      }
    return cl;
  }
  cl.kind = TrajectoryClass::Bounded;
  return cl;
}

// Fixed-step RK4 on
//   x'(t) = -(L (x) I_d) x(t - tau1) - (L (x) A_cross) x(t - tau2)
// with linear interpolation into the stored step history at stage times and a
// constant (or linear-to-zero) initial history on [-max delay, 0]. A step
// larger than a tenth of the smallest positive delay is shrunk to it.
inline Trajectory simulate(const SimConfig& cfg) {
  const int n = cfg.graph.n, d = cfg.pattern.dims();
  const Eigen::Index nd = static_cast<Eigen::Index>(n) * d;
  validate(cfg.delays);
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
    throw StepTooLarge("step must be positive and finite");
  if (cfg.horizon < cfg.step)
    throw StepTooLarge("horizon must cover at least one step");
  const int stride = std::max(cfg.record_stride, 1);

  const double tau1 = cfg.delays.tau1, tau2 = cfg.delays.tau2;
  double h = cfg.step;
  double minpos = std::numeric_limits<double>::infinity();
  if (tau1 > 0.0) minpos = std::min(minpos, tau1);
  if (tau2 > 0.0) minpos = std::min(minpos, tau2);
  if (std::isfinite(minpos) && h > minpos / 10.0) h = minpos / 10.0;

  Eigen::VectorXd x0 =
      cfg.x0.size() > 0 ? cfg.x0 : random_initial_state(n, d, cfg.seed);
  if (x0.size() != nd) throw Error("x0 must have n*d entries");

  const Eigen::MatrixXd L = laplacian(cfg.graph);
  const Eigen::MatrixXd across = cross_matrix(cfg.pattern);
  Eigen::MatrixXd m_intra = Eigen::MatrixXd::Zero(nd, nd);
  Eigen::MatrixXd m_cross = Eigen::MatrixXd::Zero(nd, nd);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (L(i, j) == 0.0) continue;
      for (int q = 0; q < d; ++q) {
        m_intra(i * d + q, j * d + q) = -L(i, j);
        for (int p = 0; p < d; ++p)
          m_cross(i * d + q, j * d + p) = -L(i, j) * across(q, p);
      }
    }

  const double dmax = std::max(tau1, tau2);
  const long K = dmax > 0.0
                     ? static_cast<long>(std::ceil(dmax / h - 1e-12)) + 1
                     : 0;
  long N = static_cast<long>(std::ceil(cfg.horizon / h - 1e-9));
  if (N < 1) N = 1;
  if (N % stride != 0) N += stride - (N % stride);

  std::vector<Eigen::VectorXd> hist(static_cast<std::size_t>(K + N + 1));
  for (long k = 0; k < K; ++k) {
    const double t = (k - K) * h;
    hist[k] = cfg.history == HistoryKind::LinearToZero && dmax > 0.0
                  ? Eigen::VectorXd(x0 * (1.0 + t / dmax))
                  : x0;
  }
  hist[K] = x0;

  // Lookup at t <= current time; j+1 never exceeds the last stored index
  // because positive delays are at least 10 h.
  auto delayed = [&](double t, Eigen::VectorXd& out) {
    const double a = t / h + K;
    long j = static_cast<long>(std::floor(a));
    double w = a - j;
    if (j < 0) {
      j = 0;
      w = 0.0;
    }
    if (w == 0.0)
      out = hist[j];
    else
      out.noalias() = (1.0 - w) * hist[j] + w * hist[j + 1];
  };

  Eigen::VectorXd xd1(nd), xd2(nd), ytmp(nd), k1(nd), k2(nd), k3(nd), k4(nd);
  auto deriv = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
    if (tau1 > 0.0) delayed(t - tau1, xd1);
    if (tau2 > 0.0) delayed(t - tau2, xd2);
    out.noalias() = m_intra * (tau1 > 0.0 ? xd1 : y);
    out.noalias() += m_cross * (tau2 > 0.0 ? xd2 : y);
  };

  Trajectory tr;
  tr.n = n;
  tr.d = d;
  tr.step = h;
  tr.record_dt = stride * h;
  tr.times.reserve(N / stride + 1);
  auto record = [&](long m) {
    tr.times.push_back((m - K) * h);
    tr.states.push_back(hist[m]);
    tr.disagreement.push_back(disagreement_norm(hist[m], n, d));
  };
  record(K);

  for (long m = K; m < K + N; ++m) {
    const double t = (m - K) * h;
    const Eigen::VectorXd& y = hist[m];
    deriv(t, y, k1);
    ytmp = y + (h / 2.0) * k1;
    deriv(t + h / 2.0, ytmp, k2);
    ytmp = y + (h / 2.0) * k2;
    deriv(t + h / 2.0, ytmp, k3);
    ytmp = y + h * k3;
    deriv(t + h, ytmp, k4);
    hist[m + 1] = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!hist[m + 1].allFinite()) throw NonFiniteState((m + 1 - K) * h);
    if (hist[m + 1].cwiseAbs().maxCoeff() > cfg.divergence_threshold) {
      tr.aborted = true;
      tr.abort_time = (m + 1 - K) * h;
      break;
    }
    if ((m + 1 - K) % stride == 0) record(m + 1);
  }

  tr.classification = classify_trajectory(tr);
  return tr;
}

// Largest per-layer drift of the agent-state sum across the recorded samples.
inline double layer_sum_drift(const Trajectory& tr) {
  if (tr.states.empty()) return 0.0;
  Eigen::VectorXd base = Eigen::VectorXd::Zero(tr.d);
  for (int i = 0; i < tr.n; ++i)
    base += tr.states.front().segment(static_cast<Eigen::Index>(i) * tr.d, tr.d);
  double drift = 0.0;
  for (const auto& x : tr.states) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(tr.d);
    for (int i = 0; i < tr.n; ++i)
      s += x.segment(static_cast<Eigen::Index>(i) * tr.d, tr.d);
    drift = std::max(drift, (s - base).cwiseAbs().maxCoeff());
  }
  return drift;
}

// Dominant angular frequency over the trailing window, from the zero
// crossings of the strongest centered state component. Returns 0 when fewer
// than three crossings are present.
inline double dominant_frequency(const Trajectory& tr, double tail_window = 10.0) {
  if (tr.times.size() < 8) return 0.0;
  const double t_end = tr.times.back();
  std::size_t i0 = 0;
  while (i0 + 1 < tr.times.size() && tr.times[i0] < t_end - tail_window) ++i0;
  const std::size_t count = tr.times.size() - i0;
  if (count < 8) return 0.0;

  auto centered = [&](std::size_t k, int i, int q) {
    double mean = 0.0;
    for (int a = 0; a < tr.n; ++a)
      mean += tr.states[k][static_cast<Eigen::Index>(a) * tr.d + q];
    mean /= tr.n;
    return tr.states[k][static_cast<Eigen::Index>(i) * tr.d + q] - mean;
  };

  int bi = 0, bq = 0;
  double best = -1.0;
  for (int i = 0; i < tr.n; ++i)
    for (int q = 0; q < tr.d; ++q) {
      double amp = 0.0;
      for (std::size_t k = i0; k < tr.times.size(); ++k)
        amp = std::max(amp, std::abs(centered(k, i, q)));
      if (amp > best) {
        best = amp;
        bi = i;
        bq = q;
      }
    }
  if (best <= 0.0) return 0.0;

  double first = 0.0, last = 0.0;
  int crossings = 0;
  double prev = centered(i0, bi, bq);
  for (std::size_t k = i0; k + 1 < tr.times.size(); ++k) {
    const double next = centered(k + 1, bi, bq);
    if ((prev < 0.0 && next >= 0.0) || (prev > 0.0 && next <= 0.0)) {
      const double tc =
          tr.times[k] + (tr.times[k + 1] - tr.times[k]) * prev / (prev - next);
      if (crossings == 0) first = tc;
      last = tc;
      ++crossings;
    }
    prev = next;
  }
  if (crossings < 3 || last <= first) return 0.0;
  return std::numbers::pi * (crossings - 1) / (last - first);
}

}  // namespace delaynet
