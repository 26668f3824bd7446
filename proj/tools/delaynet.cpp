// Command-line front end: analyze / simulate / sweep / spectrum.
//
// Data goes to files under the output directory, diagnostics to stderr, and
// standard output carries a one-line summary per command. Exit codes for
// `analyze`: 0 consensus guaranteed, 2 instability guaranteed, 3 marginal or
// outside the covered theory, 1 error. Other commands: 0 success, 1 error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "delaynet/dde.hpp"
#include "delaynet/quasipoly.hpp"
#include "delaynet/report.hpp"
#include "delaynet/stability.hpp"
#include "delaynet/sweep.hpp"

namespace fs = std::filesystem;

namespace {

delaynet::json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw delaynet::ConfigError("cannot open config file: " + path);
  delaynet::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw delaynet::ConfigError("config " + path + ": " + e.what());
  }
  return j;
}

fs::path resolve_out(const delaynet::RunConfig& cfg, const std::string& flag) {
  fs::path dir = !flag.empty() ? fs::path(flag)
                               : fs::path(cfg.output.value_or("."));
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw delaynet::Error("cannot write " + p.string());
  f << text;
}

int run_analyze(const std::string& config_path, const std::string& out_flag,
                bool with_oracle) {
  using namespace delaynet;
  RunConfig cfg = parse_config(load_json(config_path));
  if (!cfg.delays) throw ConfigError("analyze requires a 'delays' block");

  const auto gs = laplacian_spectrum(cfg.graph);
  const auto ps = cross_spectrum(cfg.pattern);
  const MarginReport rep = classify(gs, ps, *cfg.delays, cfg.tol.boundary);

  json matrix = json::array();
  for (int r = 0; r < cfg.pattern.dims(); ++r) {
    json row = json::array();
    for (int c = 0; c < cfg.pattern.dims(); ++c)
      row.push_back(round_sig6(cfg.pattern.a(r, c)));
    matrix.push_back(row);
  }
  json edges = json::array();
  for (auto [i, j] : cfg.graph.edges) edges.push_back({i + 1, j + 1});

  json out{{"graph", {{"n", cfg.graph.n}, {"edges", edges}, {"spectrum", to_json(gs)}}},
           {"pattern", {{"matrix", matrix}, {"spectrum", to_json(ps)}}},
           {"delays", {{"tau1", cfg.delays->tau1}, {"tau2", cfg.delays->tau2}}},
           {"margins", to_json(rep)}};

  const fs::path dir = resolve_out(cfg, out_flag);
  if (with_oracle) {
    const auto oracle = network_rightmost_scan(gs, ps, *cfg.delays);
    out["oracle"] = to_json(oracle);
    // Scan dump for the binding factor: lambda_max with the eigenvalue that
    // attains zeta_max.
    std::complex<double> mu_bind = ps.mu.empty() ? 0.0 : ps.mu.front();
    for (const auto& m : ps.mu)
      if (std::abs(1.0 + m) >= std::abs(1.0 + mu_bind)) mu_bind = m;
    CharInstance ci{gs.lambda_max, mu_bind, cfg.delays->tau1, cfg.delays->tau2};
    std::ofstream scan(dir / "axis_scan.csv", std::ios::binary);
    axis_scan_csv(scan, ci, 1.1 * gs.lambda_max * (1.0 + std::abs(mu_bind)));
  }
  write_file(dir / "analysis.json", out.dump(2) + "\n");

  std::cout << to_string(*rep.verdict) << " (" << rep.justification << ")";
  if (rep.tau_max) std::cout << " tau_max=" << *rep.tau_max;
  std::cout << " -> " << (dir / "analysis.json").string() << "\n";

  switch (*rep.verdict) {
    case Verdict::ConsensusGuaranteed: return 0;
    case Verdict::UnstableGuaranteed: return 2;
    default: return 3;
  }
}

int run_simulate(const std::string& config_path, const std::string& out_flag,
                 std::optional<std::uint32_t> seed_flag) {
  using namespace delaynet;
  RunConfig cfg = parse_config(load_json(config_path));
  if (!cfg.delays) throw ConfigError("simulate requires a 'delays' block");
  if (seed_flag) {
    cfg.seed = *seed_flag;
    cfg.x0.reset();
  }

  SimConfig sc = make_sim_config(cfg, *cfg.delays);
  Trajectory tr = simulate(sc);
  tr.classification = classify_trajectory(tr, cfg.tol.convergence_eps,
                                          cfg.tol.convergence_window);

  const fs::path dir = resolve_out(cfg, out_flag);
  {
    std::ofstream f(dir / "trajectory.csv", std::ios::binary);
    write_trajectory_csv(f, tr);
  }
  {
    std::ofstream f(dir / "disagreement.csv", std::ios::binary);
    write_disagreement_csv(f, tr);
  }

  const Eigen::VectorXd x0 =
      sc.x0.size() > 0 ? sc.x0
                       : random_initial_state(tr.n, tr.d, sc.seed);
  const Eigen::VectorXd avg0 = consensus_value(x0, tr.n, tr.d);
  json summary{{"classification", to_string(tr.classification.kind)},
               {"final_disagreement",
                tr.disagreement.empty() ? 0.0 : tr.disagreement.back()},
               {"initial_average",
                std::vector<double>(avg0.data(), avg0.data() + tr.d)},
               {"layer_sum_drift", layer_sum_drift(tr)},
               {"dominant_frequency", dominant_frequency(tr)},
               {"aborted", tr.aborted},
               {"step", tr.step},
               {"record_dt", tr.record_dt},
               {"horizon", cfg.horizon},
               {"tau1", cfg.delays->tau1},
               {"tau2", cfg.delays->tau2}};
  if (tr.classification.kind == TrajectoryClass::Converged) {
    summary["consensus_value"] =
        std::vector<double>(tr.classification.value.data(),
                            tr.classification.value.data() + tr.d);
    summary["converged_at"] = tr.classification.at_time;
  }
  if (tr.aborted) summary["abort_time"] = tr.abort_time;
  if (!cfg.x0) summary["seed"] = sc.seed;
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  std::cout << to_string(tr.classification.kind)
            << " final_disagreement="
            << (tr.disagreement.empty() ? 0.0 : tr.disagreement.back())
            << " -> " << (dir / "summary.json").string() << "\n";
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_flag,
                  bool with_oracle, bool with_sim) {
  using namespace delaynet;
  RunConfig cfg = parse_config(load_json(config_path));
  const fs::path dir = resolve_out(cfg, out_flag);

  std::ofstream csv(dir / "sweep.csv", std::ios::binary);
  if (!csv) throw Error("cannot write " + (dir / "sweep.csv").string());
  SweepOptions opt;
  opt.with_oracle = with_oracle;
  opt.with_sim = with_sim;
  const SweepSummary sum = run_sweep(cfg, opt, csv, std::cerr);

  std::cout << sum.points << " grid points (" << sum.consensus
            << " consensus, " << sum.unstable << " unstable, " << sum.warnings
            << " warnings) -> " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int run_spectrum(const std::string& config_path, const std::string& out_flag) {
  using namespace delaynet;
  RunConfig cfg = parse_config(load_json(config_path));
  const auto gs = laplacian_spectrum(cfg.graph);
  const auto ps = cross_spectrum(cfg.pattern);

  json out{{"graph",
            {{"n", cfg.graph.n},
             {"connected", is_connected(cfg.graph)},
             {"spectrum", to_json(gs)}}},
           {"pattern", {{"d", cfg.pattern.dims()}, {"spectrum", to_json(ps)}}}};
  const fs::path dir = resolve_out(cfg, out_flag);
  write_file(dir / "spectrum.json", out.dump(2) + "\n");

  std::cout << "lambda_max=" << gs.lambda_max << " mu_max_abs=" << ps.mu_max_abs
            << " -> " << (dir / "spectrum.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "delaynet: consensus margins, root-scan oracle and delayed simulation "
      "for multilayer diffusive networks"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool with_oracle = false, with_sim = false;
  std::int64_t seed_value = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "classify a (graph, pattern, delays) instance");
  add_common(analyze);
  analyze->add_flag("--oracle", with_oracle,
                    "cross-check the verdict with the root-scan oracle");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "integrate the delayed dynamics and classify the trajectory");
  add_common(simulate);
  simulate->add_option("--seed", seed_value,
                       "override the initial-state seed from the config");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "evaluate a (tau1, tau2) grid into a phase-map CSV");
  add_common(sweep);
  sweep->add_flag("--oracle", with_oracle, "add the oracle column");
  sweep->add_flag("--sim", with_sim, "add the simulation column");

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "dump the graph and pattern spectra");
  add_common(spectrum);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(analyze))
      return run_analyze(config_path, out_dir, with_oracle);
    if (app.got_subcommand(simulate))
      return run_simulate(config_path, out_dir,
                          seed_value >= 0
                              ? std::optional<std::uint32_t>(
                                    static_cast<std::uint32_t>(seed_value))
                              : std::nullopt);
    if (app.got_subcommand(sweep))
      return run_sweep_cmd(config_path, out_dir, with_oracle, with_sim);
    if (app.got_subcommand(spectrum)) return run_spectrum(config_path, out_dir);
  } catch (const delaynet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
