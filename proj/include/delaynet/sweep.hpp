#pragma once

#include <cstdio>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "delaynet/dde.hpp"
#include "delaynet/parallel.hpp"
#include "delaynet/quasipoly.hpp"
#include "delaynet/report.hpp"

namespace delaynet {

struct SweepOptions {
  bool with_oracle = false;
  bool with_sim = false;
  unsigned threads = 0;
};

struct SweepSummary {
  std::size_t points = 0;
  std::size_t consensus = 0;
  std::size_t unstable = 0;
  std::size_t warnings = 0;
};

inline std::vector<double> grid_points(const GridAxis& a) {
  std::vector<double> v;
  v.reserve(a.steps);
  if (a.steps == 1) {
    v.push_back(a.min);
    return v;
  }
  for (int k = 0; k < a.steps; ++k)
    v.push_back(a.min + (a.max - a.min) * k / (a.steps - 1));
  return v;
}

// Evaluates the (tau1, tau2) grid concurrently and streams CSV rows in grid
// order, flushing each completed prefix so an interrupted run keeps its
// partial results. Diagnostics go to `diag`, never into the CSV.
inline SweepSummary run_sweep(const RunConfig& cfg, const SweepOptions& opt,
                              std::ostream& csv, std::ostream& diag) {
  if (!cfg.grid_tau1 || !cfg.grid_tau2)
    throw ConfigError("sweep requires grid.tau1 and grid.tau2");
  const auto gs = laplacian_spectrum(cfg.graph);
  const auto ps = cross_spectrum(cfg.pattern);
  if (!(gs.lambda2 > kZeroEigTol)) throw DisconnectedGraph();

  const auto t1s = grid_points(*cfg.grid_tau1);
  const auto t2s = grid_points(*cfg.grid_tau2);
  const std::size_t total = t1s.size() * t2s.size();

  csv << "tau1,tau2,theory,oracle,sim\n";
  csv.flush();

  struct Row {
    std::string line;
    std::string warn;
    bool consensus = false;
    bool unstable = false;
  };
  std::vector<std::optional<Row>> rows(total);
  std::mutex emit_mu;
  std::size_t next = 0;
  SweepSummary sum;
  sum.points = total;

  parallel_for(
      total,
      [&](std::size_t k) {
        const DelayPair dp{t1s[k / t2s.size()], t2s[k % t2s.size()]};
        Row row;
        const MarginReport rep = classify(gs, ps, dp, cfg.tol.boundary);
        row.consensus = rep.verdict == Verdict::ConsensusGuaranteed;
        row.unstable = rep.verdict == Verdict::UnstableGuaranteed;

        std::string oracle = "-";
        if (opt.with_oracle)
          oracle = network_rightmost_scan(gs, ps, dp, 1).stable ? "stable"
                                                                : "unstable";
        std::string sim = "-";
        if (opt.with_sim) {
          SimConfig sc = make_sim_config(cfg, dp);
          Trajectory tr = simulate(sc);
          const auto cl = classify_trajectory(tr, cfg.tol.convergence_eps,
                                              cfg.tol.convergence_window);
          sim = to_string(cl.kind);
          if (row.consensus && cl.kind == TrajectoryClass::Diverged)
            row.warn = "theory guarantees consensus but the simulation "
                       "diverged";
          else if (row.consensus && cl.kind == TrajectoryClass::Bounded)
            row.warn = "theory guarantees consensus but the simulation only "
                       "stayed bounded (horizon may be too short)";
        }

        char buf[160];
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%s,%s,%s\n", dp.tau1,
                      dp.tau2, to_string(*rep.verdict), oracle.c_str(),
                      sim.c_str());
        row.line = buf;

        std::lock_guard<std::mutex> lock(emit_mu);
        rows[k] = std::move(row);
        while (next < total && rows[next]) {
          const Row& r = *rows[next];
          csv << r.line;
          csv.flush();
          if (!r.warn.empty()) {
            diag << "warning: " << r.warn << " at " << r.line;
            ++sum.warnings;
          }
          if (r.consensus) ++sum.consensus;
          if (r.unstable) ++sum.unstable;
          ++next;
        }
      },
      opt.threads);
  return sum;
}

}  // namespace delaynet
